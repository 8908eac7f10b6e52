use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};

/// Binomial multiplicative cascade on `2^levels` cells with unit total mass.
///
/// At every level each cell hands fraction `p` of its mass to one child and
/// `1 - p` to the other; which child receives `p` is drawn per cell.
pub fn binomial_cascade(p: f64, levels: u32, seed: u64) -> Result<Vec<f64>> {
    if !(p > 0.5 && p < 1.0) {
        return Err(invalid(format!("cascade weight {p} outside (0.5, 1)")));
    }
    if !(10..=30).contains(&levels) {
        return Err(invalid(format!("cascade levels {levels} outside 10..=30")));
    }
    Ok(cascade_measure(p, levels, seed))
}

pub(crate) fn cascade_measure(p: f64, levels: u32, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mass = vec![1.0];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(mass.len() * 2);
        for m in &mass {
            let (a, b) = (m * p, m * (1.0 - p));
            if rng.random::<bool>() {
                next.extend_from_slice(&[a, b]);
            } else {
                next.extend_from_slice(&[b, a]);
            }
        }
        mass = next;
    }
    mass
}

/// Mass exponent `tau(q) = -log2(p^q + (1-p)^q)` of the cascade measure.
pub fn cascade_tau(p: f64, q: f64) -> f64 {
    -(p.powf(q) + (1.0 - p).powf(q)).ln() / std::f64::consts::LN_2
}

/// Generalised Hurst exponent of the cascade increments,
/// `h(q) = 1/q - ln(p^q + (1-p)^q) / (q ln 2)`, with its limit at `q = 0`.
pub fn cascade_hurst(p: f64, q: f64) -> f64 {
    if q.abs() < 1e-9 {
        -(p.log2() + (1.0 - p).log2()) / 2.0
    } else {
        (1.0 + cascade_tau(p, q)) / q
    }
}

/// Singularity strength `alpha(q) = d tau / dq`.
pub fn cascade_alpha(p: f64, q: f64) -> f64 {
    let (a, b) = (p.powf(q), (1.0 - p).powf(q));
    -(a * p.ln() + b * (1.0 - p).ln()) / ((a + b) * std::f64::consts::LN_2)
}

/// Width of the analytic spectrum over `[q_min, q_max]`.
pub fn cascade_spectrum_width(p: f64, q_min: f64, q_max: f64) -> f64 {
    cascade_alpha(p, q_min) - cascade_alpha(p, q_max)
}
