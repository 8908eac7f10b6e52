//! Trend-conditional multifractal cross-correlation analysis.
//!
//! [`analyze`] runs the whole chain for a pair of increment series: profiles,
//! the index proxy built from `x`, fluctuation functions over the scale and q
//! grids, generalised Hurst exponents, Rényi exponents and singularity spectra
//! for the overall, upward and downward window populations.

mod fluct;
mod grid;
mod spectrum;

pub use fluct::{fluctuation_functions, generalized_mean, FluctuationOptions, FluctuationTable, TrendClass};
pub use grid::{QGrid, ScaleGrid, ScalePolicy};
pub use spectrum::{
    hurst_exponents, ols_slope, renyi, singularity_spectrum, Exponent, Spectrum, SpectrumPoint, SpectrumQuality,
    SpectrumScalars, MAX_Q_SPACING, MIN_REGRESSION_POINTS, MONOTONE_TOL,
};

use serde::{Deserialize, Serialize};

use crate::detrend::{IndexProxy, Profile};
use crate::error::{Error, Result};
use crate::series::IncrementSeries;

/// q values at which the summary reports `Delta h`.
pub const SUMMARY_QS: [f64; 3] = [-10.0, 2.0, 10.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct MfadccaConfig {
    /// Scale grid; `None` applies the length-dependent default policy.
    pub scales: Option<ScaleGrid>,
    pub qs: QGrid,
    pub options: FluctuationOptions,
}

/// Exponents, Rényi exponents and spectrum for one trend class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendExponents {
    pub class: TrendClass,
    pub h: Vec<Option<Exponent>>,
    pub tau: Vec<Option<f64>>,
    pub spectrum: Spectrum,
}

impl TrendExponents {
    fn build(table: &FluctuationTable, class: TrendClass) -> Self {
        let h = hurst_exponents(table, class);
        let hv: Vec<Option<f64>> = h.iter().map(|e| e.map(|e| e.h)).collect();
        Self { class, tau: renyi(&hv, &table.qs), spectrum: singularity_spectrum(&table.qs, &hv), h }
    }

    pub fn h_values(&self) -> Vec<Option<f64>> {
        self.h.iter().map(|e| e.map(|e| e.h)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaH {
    pub q: f64,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrendSummary {
    pub class: TrendClass,
    pub scalars: Option<SpectrumScalars>,
    pub quality: SpectrumQuality,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultifractalSummary {
    pub delta_h: Vec<DeltaH>,
    pub d_xy: Option<f64>,
    pub trends: Vec<TrendSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultifractalResult {
    pub table: FluctuationTable,
    pub overall: TrendExponents,
    pub up: TrendExponents,
    pub down: TrendExponents,
    pub summary: MultifractalSummary,
}

impl MultifractalResult {
    pub fn class(&self, class: TrendClass) -> &TrendExponents {
        match class {
            TrendClass::Overall => &self.overall,
            TrendClass::Up => &self.up,
            TrendClass::Down => &self.down,
        }
    }

    pub fn qs(&self) -> &[f64] {
        &self.table.qs
    }

    /// Exponent of `class` at `q`, if the grid contains `q` and it was estimable.
    pub fn h_at(&self, class: TrendClass, q: f64) -> Option<f64> {
        let i = self.qs().iter().position(|v| (v - q).abs() < 1e-9)?;
        self.class(class).h[i].map(|e| e.h)
    }

    pub fn delta_h_at(&self, q: f64) -> Option<f64> {
        asymmetry_degree(self.h_at(TrendClass::Up, q), self.h_at(TrendClass::Down, q))
    }
}

/// `Delta h(q) = h+(q) - h-(q)`.
pub fn asymmetry_degree(h_up: Option<f64>, h_down: Option<f64>) -> Option<f64> {
    Some(h_up? - h_down?)
}

/// `D = (|h(-10) - 0.5| + |h(10) - 0.5|) / 2`.
pub fn efficiency_degree(h_minus10: Option<f64>, h_plus10: Option<f64>) -> Option<f64> {
    Some(((h_minus10? - 0.5).abs() + (h_plus10? - 0.5).abs()) / 2.0)
}

/// Full analysis with the index proxy built from `x`.
pub fn analyze(x: &IncrementSeries, y: &IncrementSeries, config: &MfadccaConfig) -> Result<MultifractalResult> {
    analyze_values(x.values(), y.values(), config)
}

pub fn analyze_values(x: &[f64], y: &[f64], config: &MfadccaConfig) -> Result<MultifractalResult> {
    analyze_with_proxy(x, y, &IndexProxy::new(x)?, config)
}

/// As [`analyze_values`] with an explicit trend proxy.
pub fn analyze_with_proxy(
    x: &[f64],
    y: &[f64],
    proxy: &IndexProxy,
    config: &MfadccaConfig,
) -> Result<MultifractalResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < crate::series::MIN_SCALING_LENGTH {
        return Err(Error::TooShort { needed: crate::series::MIN_SCALING_LENGTH, got: x.len() });
    }
    let scales = match &config.scales {
        Some(g) => g.clone(),
        None => ScaleGrid::fluctuation_policy(x.len())?,
    };
    let px = Profile::centered(x)?;
    let py = Profile::centered(y)?;
    let table = fluctuation_functions(&px, &py, proxy, &scales, &config.qs, &config.options)?;
    Ok(from_table(table))
}

/// Single-series multifractal DFA: the overall branch of `analyze(x, x)`.
pub fn mfdfa(x: &[f64], config: &MfadccaConfig) -> Result<MultifractalResult> {
    analyze_values(x, x, config)
}

/// Exponents, spectra and summary scalars from a computed table.
pub fn from_table(table: FluctuationTable) -> MultifractalResult {
    let overall = TrendExponents::build(&table, TrendClass::Overall);
    let up = TrendExponents::build(&table, TrendClass::Up);
    let down = TrendExponents::build(&table, TrendClass::Down);
    let at = |t: &TrendExponents, q: f64| -> Option<f64> {
        let i = table.qs.iter().position(|v| (v - q).abs() < 1e-9)?;
        t.h[i].map(|e| e.h)
    };
    let delta_h = SUMMARY_QS.iter().map(|&q| DeltaH { q, value: asymmetry_degree(at(&up, q), at(&down, q)) }).collect();
    let d_xy = efficiency_degree(at(&overall, -10.0), at(&overall, 10.0));
    let trends = [&overall, &up, &down]
        .iter()
        .map(|t| TrendSummary { class: t.class, scalars: t.spectrum.scalars, quality: t.spectrum.quality })
        .collect();
    MultifractalResult { summary: MultifractalSummary { delta_h, d_xy, trends }, table, overall, up, down }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{fgn, iid_gaussian};

    #[test]
    fn scalar_examples() {
        assert_eq!(asymmetry_degree(Some(0.7), Some(0.7)), Some(0.0));
        assert_eq!(asymmetry_degree(None, Some(0.7)), None);
        assert_eq!(efficiency_degree(Some(0.5), Some(0.5)), Some(0.0));
        assert!((efficiency_degree(Some(0.6), Some(0.4)).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(efficiency_degree(Some(0.6), None), None);
    }

    #[test]
    fn white_noise_scales_with_one_half() {
        let x = fgn(0.5, 1 << 14, 5).unwrap();
        let r = mfdfa(&x, &MfadccaConfig::default()).unwrap();
        let h2 = r.h_at(TrendClass::Overall, 2.0).unwrap();
        assert!((h2 - 0.5).abs() < 0.05, "h(2) = {h2}");
    }

    #[test]
    fn tau_is_exactly_q_h_minus_one() {
        let x = iid_gaussian(4000, 2);
        let r = mfdfa(&x, &MfadccaConfig::default()).unwrap();
        for t in [&r.overall, &r.up, &r.down] {
            for ((h, tau), q) in t.h.iter().zip(&t.tau).zip(r.qs()) {
                if let (Some(h), Some(tau)) = (h, tau) {
                    assert_eq!(*tau, q * h.h - 1.0);
                }
            }
        }
    }

    #[test]
    fn positive_increments_leave_no_down_windows() {
        let x: Vec<f64> = iid_gaussian(3000, 4).iter().map(|v| 0.01 + v.abs()).collect();
        let y = iid_gaussian(3000, 5);
        let r = analyze_values(&x, &y, &MfadccaConfig::default()).unwrap();
        assert!(r.table.m_down.iter().all(|&m| m == 0));
        assert!(r.table.down.iter().flatten().all(Option::is_none));
        assert!(r.down.h.iter().all(Option::is_none));
        assert!(r.summary.delta_h.iter().all(|d| d.value.is_none()));
        // upward branch sees every window
        assert_eq!(r.table.m_up, r.table.segments);
    }

    #[test]
    fn overall_self_analysis_matches_single_series_path() {
        let x = iid_gaussian(2500, 8);
        let cfg = MfadccaConfig::default();
        let a = analyze_values(&x, &x, &cfg).unwrap();
        let b = mfdfa(&x, &cfg).unwrap();
        assert_eq!(a.overall.h, b.overall.h);
    }

    #[test]
    fn fluctuation_nondecreasing_in_q() {
        let x = iid_gaussian(3000, 9);
        let y = iid_gaussian(3000, 10);
        let r = analyze_values(&x, &y, &MfadccaConfig::default()).unwrap();
        for si in 0..r.table.scales.len() {
            for qi in 1..r.table.qs.len() {
                let (a, b) = (r.table.overall[qi - 1][si].unwrap(), r.table.overall[qi][si].unwrap());
                assert!(b >= a * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn permuting_y_keeps_trend_counts() {
        let x = iid_gaussian(2000, 11);
        let y = iid_gaussian(2000, 12);
        let mut yp = y.clone();
        yp.reverse();
        let cfg = MfadccaConfig::default();
        let a = analyze_values(&x, &y, &cfg).unwrap();
        let b = analyze_values(&x, &yp, &cfg).unwrap();
        assert_eq!(a.table.m_up, b.table.m_up);
        assert_eq!(a.table.m_down, b.table.m_down);
    }

    #[test]
    fn rescaling_with_fixed_proxy_leaves_exponents_unchanged() {
        let x = iid_gaussian(3000, 13);
        let y = iid_gaussian(3000, 14);
        let proxy = IndexProxy::new(&x).unwrap();
        let cfg = MfadccaConfig::default();
        let a = analyze_with_proxy(&x, &y, &proxy, &cfg).unwrap();
        let xs: Vec<f64> = x.iter().map(|v| v * 37.0).collect();
        let ys: Vec<f64> = y.iter().map(|v| v * 0.02).collect();
        let b = analyze_with_proxy(&xs, &ys, &proxy, &cfg).unwrap();
        for class in TrendClass::ALL {
            for (u, v) in a.class(class).h.iter().zip(&b.class(class).h) {
                match (u, v) {
                    (Some(u), Some(v)) => assert!((u.h - v.h).abs() < 1e-9),
                    (None, None) => {}
                    _ => panic!("missing pattern changed"),
                }
            }
        }
        let (da, db) = (a.summary.d_xy.unwrap(), b.summary.d_xy.unwrap());
        assert!((da - db).abs() < 1e-9);
    }

    #[test]
    fn rejects_short_or_mismatched() {
        let cfg = MfadccaConfig::default();
        assert!(analyze_values(&[0.1; 100], &[0.1; 100], &cfg).is_err());
        assert!(analyze_values(&iid_gaussian(500, 1), &iid_gaussian(400, 1), &cfg).is_err());
    }
}
