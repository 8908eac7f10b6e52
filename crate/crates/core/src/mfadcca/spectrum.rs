use serde::Serialize;

use super::fluct::{FluctuationTable, TrendClass};

/// Fewest scale points accepted for a log-log regression.
pub const MIN_REGRESSION_POINTS: usize = 10;

/// Largest q spacing for which finite-difference derivatives are trusted.
pub const MAX_Q_SPACING: f64 = 0.5;

/// Rise in alpha between neighbouring q tolerated as finite-difference error
/// when checking monotonicity.
pub const MONOTONE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exponent {
    pub h: f64,
    pub stderr: f64,
    pub points: usize,
}

/// OLS slope of `ys` on `xs` with its standard error.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 3 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Some((slope, (ssr / (nf - 2.0) / sxx).sqrt()))
}

/// Generalised Hurst exponents per q for one trend class: the slope of
/// `ln F_q(s)` against `ln s` over the available scales.
pub fn hurst_exponents(table: &FluctuationTable, class: TrendClass) -> Vec<Option<Exponent>> {
    table
        .class(class)
        .iter()
        .map(|row| {
            let (xs, ys): (Vec<f64>, Vec<f64>) =
                row.iter().zip(&table.scales).filter_map(|(f, s)| f.map(|f| ((*s as f64).ln(), f.ln()))).unzip();
            if xs.len() < MIN_REGRESSION_POINTS {
                return None;
            }
            ols_slope(&xs, &ys).map(|(h, stderr)| Exponent { h, stderr, points: xs.len() })
        })
        .collect()
}

/// `tau(q) = q h(q) - 1`.
pub fn renyi(h: &[Option<f64>], qs: &[f64]) -> Vec<Option<f64>> {
    h.iter().zip(qs).map(|(h, q)| h.map(|h| q * h - 1.0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub q: f64,
    pub alpha: f64,
    pub f_alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SpectrumQuality {
    /// alpha(q) is non-increasing over the whole grid, up to [`MONOTONE_TOL`].
    pub monotone: bool,
    /// Largest f(alpha) does not exceed 1 (beyond rounding).
    pub f_bounded: bool,
    /// Neighbouring q values are at most [`MAX_Q_SPACING`] apart.
    pub fine_grid: bool,
    /// q points on the branch the scalars were computed from.
    pub branch_points: usize,
}

impl SpectrumQuality {
    pub fn ok(&self) -> bool {
        self.monotone && self.f_bounded && self.fine_grid
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumScalars {
    pub delta_alpha: f64,
    pub alpha0: f64,
    pub alpha_max: f64,
    pub alpha_min: f64,
    /// `(dL - dR) / (dL + dR)` with `dL = alpha0 - alpha_min`,
    /// `dR = alpha_max - alpha0`; absent when the width is zero.
    pub asymmetry: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub points: Vec<SpectrumPoint>,
    pub quality: SpectrumQuality,
    pub scalars: Option<SpectrumScalars>,
}

/// Legendre transform of `tau`: `alpha = h + q h'`, `f = q (alpha - h) + 1`.
///
/// `h'` is taken by central differences between neighbouring available q
/// values and one-sided differences at the ends. Scalars are computed on the
/// monotone branch around the maximum of `f`, so estimation noise at the
/// grid ends cannot fold the spectrum back on itself.
pub fn singularity_spectrum(qs: &[f64], h: &[Option<f64>]) -> Spectrum {
    let avail: Vec<(f64, f64)> = qs.iter().zip(h).filter_map(|(q, h)| h.map(|h| (*q, h))).collect();
    let empty = Spectrum { points: vec![], quality: SpectrumQuality::default(), scalars: None };
    let n = avail.len();
    if n < 3 {
        return empty;
    }
    let deriv = |i: usize| -> f64 {
        let (lo, hi) = match i {
            0 => (0, 1),
            i if i == n - 1 => (n - 2, n - 1),
            i => (i - 1, i + 1),
        };
        (avail[hi].1 - avail[lo].1) / (avail[hi].0 - avail[lo].0)
    };
    let points: Vec<SpectrumPoint> = (0..n)
        .map(|i| {
            let (q, hq) = avail[i];
            let alpha = hq + q * deriv(i);
            SpectrumPoint { q, alpha, f_alpha: q * (alpha - hq) + 1.0 }
        })
        .collect();

    let monotone = points.windows(2).all(|w| w[1].alpha <= w[0].alpha + MONOTONE_TOL);
    let f_bounded = points.iter().all(|p| p.f_alpha <= 1.0 + 1e-9);
    let fine_grid = avail.windows(2).all(|w| w[1].0 - w[0].0 <= MAX_Q_SPACING + 1e-12);

    let peak = (0..n).max_by(|&a, &b| points[a].f_alpha.total_cmp(&points[b].f_alpha)).unwrap();
    let mut lo = peak;
    while lo > 0 && points[lo - 1].alpha + MONOTONE_TOL >= points[lo].alpha {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < n && points[hi + 1].alpha <= points[hi].alpha + MONOTONE_TOL {
        hi += 1;
    }
    let branch = &points[lo..=hi];
    let alpha0 = points[peak].alpha;
    let alpha_max = branch.iter().map(|p| p.alpha).fold(f64::NEG_INFINITY, f64::max);
    let alpha_min = branch.iter().map(|p| p.alpha).fold(f64::INFINITY, f64::min);
    let delta_alpha = alpha_max - alpha_min;
    let (dl, dr) = (alpha0 - alpha_min, alpha_max - alpha0);
    let asymmetry = (dl + dr > 0.0).then(|| (dl - dr) / (dl + dr));

    Spectrum {
        quality: SpectrumQuality { monotone, f_bounded, fine_grid, branch_points: branch.len() },
        scalars: Some(SpectrumScalars { delta_alpha, alpha0, alpha_max, alpha_min, asymmetry }),
        points,
    }
}
