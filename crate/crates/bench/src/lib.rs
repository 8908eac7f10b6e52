//! Shared inputs for the benchmarks.

use mfadcca_core::synth::{fgn, simulate_garch};
use mfadcca_core::{GarchModel, GarchParams};

/// Two independent fGn series of length `n` (a power of two).
pub fn fgn_pair(hurst: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    (fgn(hurst, n, 1).expect("valid fGn"), fgn(hurst, n, 2).expect("valid fGn"))
}

/// A daily-sized GJR return path.
pub fn gjr_returns(n: usize) -> Vec<f64> {
    let p = GarchParams::new(1e-5, 0.05, 0.1, 0.85);
    simulate_garch(GarchModel::Gjr, &p, n, 3).expect("stationary parameters")
}
