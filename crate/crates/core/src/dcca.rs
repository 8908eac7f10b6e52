//! Detrended cross-correlation coefficient and its trend-conditional variants.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detrend::{window_covariances, CovMode, IndexProxy, Profile, SegmentationPlan, Trend};
use crate::error::{invalid, Error, Result};
use crate::mfadcca::ScaleGrid;

/// Absolute gap between `|rho-|` and `|rho+|` needed for a verdict.
pub const VERDICT_MARGIN: f64 = 0.05;

/// Fewest windows a trend class needs at a scale before its coefficient is reported.
pub const MIN_TREND_WINDOWS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Asymmetric,
    InverseAsymmetric,
    Indeterminate,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Asymmetric => "asymmetric",
            Verdict::InverseAsymmetric => "inverse_asymmetric",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

/// `asymmetric` when `|rho-|` exceeds `|rho+|` by more than `margin`,
/// `inverse_asymmetric` in the opposite case.
pub fn asymmetry_verdict(rho_up: Option<f64>, rho_down: Option<f64>, margin: f64) -> Verdict {
    match (rho_up, rho_down) {
        (Some(u), Some(d)) if d.abs() > u.abs() + margin => Verdict::Asymmetric,
        (Some(u), Some(d)) if u.abs() > d.abs() + margin => Verdict::InverseAsymmetric,
        _ => Verdict::Indeterminate,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DccaCurve {
    pub scales: Vec<usize>,
    pub rho: Vec<f64>,
    pub rho_up: Vec<Option<f64>>,
    pub rho_down: Vec<Option<f64>>,
    pub n_up: Vec<usize>,
    pub n_down: Vec<usize>,
    pub n_flat: Vec<usize>,
}

impl DccaCurve {
    pub fn verdicts(&self, margin: f64) -> Vec<Verdict> {
        self.rho_up.iter().zip(&self.rho_down).map(|(u, d)| asymmetry_verdict(*u, *d, margin)).collect()
    }

    /// Index of the grid scale closest to `s` on a log axis.
    pub fn nearest_scale(&self, s: usize) -> Option<usize> {
        let t = (s as f64).ln();
        (0..self.scales.len()).min_by(|&a, &b| {
            let da = ((self.scales[a] as f64).ln() - t).abs();
            let db = ((self.scales[b] as f64).ln() - t).abs();
            da.total_cmp(&db)
        })
    }
}

struct ScaleCoef {
    rho: f64,
    up: Option<f64>,
    down: Option<f64>,
    counts: (usize, usize, usize),
}

fn ratio(xy: f64, xx: f64, yy: f64) -> Option<f64> {
    let d = (xx * yy).sqrt();
    (d > 0.0).then(|| xy / d)
}

fn check_inputs(x: &[f64], y: &[f64], scales: &ScaleGrid) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    for (v, name) in [(x, "x"), (y, "y")] {
        if v.iter().all(|a| *a == v[0]) {
            return Err(Error::ZeroVariance(name));
        }
    }
    let n = x.len();
    if let Some(&s) = scales.scales().iter().find(|&&s| s < 4 || s + 2 >= n) {
        return Err(invalid(format!("scale {s} needs 4 <= s < N - 2 (N = {n})")));
    }
    Ok(())
}

fn curve(x: &[f64], y: &[f64], proxy: &IndexProxy, scales: &ScaleGrid) -> Result<DccaCurve> {
    check_inputs(x, y, scales)?;
    let rx = Profile::cumulative(x)?;
    let ry = Profile::cumulative(y)?;
    let n = x.len();
    let rows: Vec<ScaleCoef> = scales
        .scales()
        .par_iter()
        .map(|&s| -> Result<ScaleCoef> {
            let plan = SegmentationPlan::overlapping(n, s)?;
            let cov = window_covariances(&rx, &ry, proxy, &plan, 2, CovMode::Signed)?;
            let (xx, yy) = (cov.xx.as_deref().unwrap(), cov.yy.as_deref().unwrap());
            let sums = |keep: &dyn Fn(Trend) -> bool| -> (usize, f64, f64, f64) {
                let mut acc = (0, 0.0, 0.0, 0.0);
                for i in 0..cov.xy.len() {
                    if keep(cov.trends[i]) {
                        acc.0 += 1;
                        acc.1 += cov.xy[i];
                        acc.2 += xx[i];
                        acc.3 += yy[i];
                    }
                }
                acc
            };
            let (_, a, b, c) = sums(&|_| true);
            if b <= 0.0 {
                return Err(Error::ZeroVariance("x"));
            }
            if c <= 0.0 {
                return Err(Error::ZeroVariance("y"));
            }
            let class = |t: Trend| {
                let (m, a, b, c) = sums(&|u| u == t);
                if m < MIN_TREND_WINDOWS {
                    None
                } else {
                    ratio(a, b, c)
                }
            };
            Ok(ScaleCoef {
                rho: ratio(a, b, c).unwrap(),
                up: class(Trend::Up),
                down: class(Trend::Down),
                counts: cov.counts(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(DccaCurve {
        scales: scales.scales().to_vec(),
        rho: rows.iter().map(|r| r.rho).collect(),
        rho_up: rows.iter().map(|r| r.up).collect(),
        rho_down: rows.iter().map(|r| r.down).collect(),
        n_up: rows.iter().map(|r| r.counts.0).collect(),
        n_down: rows.iter().map(|r| r.counts.1).collect(),
        n_flat: rows.iter().map(|r| r.counts.2).collect(),
    })
}

/// `rho(s) = F2_xy(s) / (F_x(s) F_y(s))` over all `N - s` overlapping windows.
pub fn rho_dcca(x: &[f64], y: &[f64], scales: &ScaleGrid) -> Result<Vec<f64>> {
    Ok(curve(x, y, &IndexProxy::new(x)?, scales)?.rho)
}

/// Overall and trend-conditional coefficients with the proxy built from `x`.
pub fn rho_dcca_asym(x: &[f64], y: &[f64], scales: &ScaleGrid) -> Result<DccaCurve> {
    curve(x, y, &IndexProxy::new(x)?, scales)
}

/// As [`rho_dcca_asym`] with an explicit trend proxy.
///
/// Numerator and denominators of each trend class are averaged over the same
/// windows, so every coefficient lies in `[-1, 1]`.
pub fn rho_dcca_with_proxy(x: &[f64], y: &[f64], proxy: &IndexProxy, scales: &ScaleGrid) -> Result<DccaCurve> {
    if proxy.len() != x.len() + 1 {
        return Err(Error::LengthMismatch(proxy.len().saturating_sub(1), x.len()));
    }
    curve(x, y, proxy, scales)
}
