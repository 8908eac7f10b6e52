//! Chi-squared tail probabilities and quantiles.

use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::error::{invalid, Result};

/// `P(X > x)` for `X ~ chi2(m)`.
pub fn chi2_sf(m: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_ur(m as f64 / 2.0, x / 2.0)
}

/// `P(X <= x)` for `X ~ chi2(m)`.
pub fn chi2_cdf(m: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    gamma_lr(m as f64 / 2.0, x / 2.0)
}

fn ln_pdf(m: u32, x: f64) -> f64 {
    let a = m as f64 / 2.0;
    (a - 1.0) * (x / 2.0).ln() - x / 2.0 - ln_gamma(a) - std::f64::consts::LN_2
}

/// Upper-`level` quantile: the `x` with `P(X > x) = level`.
///
/// Newton steps on whichever tail is smaller (better conditioned), kept inside
/// a bisection bracket.
pub fn chi2_quantile(m: u32, level: f64) -> Result<f64> {
    if m == 0 {
        return Err(invalid("chi-squared needs at least one degree of freedom"));
    }
    if !(level > 0.0 && level <= 1.0) {
        return Err(invalid(format!("level {level} outside (0, 1]")));
    }
    if level == 1.0 {
        return Ok(0.0);
    }
    let upper = level < 0.5;
    let target = if upper { level } else { 1.0 - level };
    let tail = |x: f64| if upper { chi2_sf(m, x) } else { chi2_cdf(m, x) };
    // residual increasing in x for both tails
    let resid = |x: f64| if upper { target - tail(x) } else { tail(x) - target };

    let (mut lo, mut hi) = (0.0, m as f64 + 10.0);
    while resid(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let mut x = (m as f64).max(1e-3).min(hi);
    if !(x > lo && x < hi) {
        x = 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let r = resid(x);
        if r == 0.0 {
            return Ok(x);
        }
        if r > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        // d resid / dx = pdf in both cases
        let step = r / ln_pdf(m, x).exp();
        let mut next = x - step;
        if !(next > lo && next < hi) || !step.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.abs().max(1e-300) || hi - lo <= 1e-15 * hi {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}
