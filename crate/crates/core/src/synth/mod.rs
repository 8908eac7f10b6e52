//! Synthetic series with known scaling or volatility structure.
//!
//! Every generator is a pure function of its parameters and a 64-bit seed;
//! the same inputs always give bit-identical output.

mod cascade;
mod fgn;
mod intraday;

pub use cascade::{binomial_cascade, cascade_alpha, cascade_hurst, cascade_spectrum_width, cascade_tau};
pub use fgn::{fgn, fgn_autocovariance};
pub use intraday::{simulate_intraday, IntradaySimSpec};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::garch::{next_variance, GarchModel, GarchParams};
use crate::series::{IncrementSeries, SeriesRole};

/// Draws discarded before a simulated GARCH path is recorded.
pub const GARCH_BURN_IN: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    Fgn { hurst: f64, length: usize },
    BinomialCascade { p: f64, levels: u32 },
    IidGaussian { length: usize },
    GarchSim { model: GarchModel, params: GarchParams, length: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, seed: u64) -> Self {
        Self { kind, seed }
    }

    /// Checks parameter ranges without generating anything.
    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            GeneratorKind::Fgn { hurst, length } => {
                if !(*hurst > 0.0 && *hurst < 1.0) {
                    return Err(invalid(format!("Hurst index {hurst} outside (0, 1)")));
                }
                if *length < 1024 || !length.is_power_of_two() {
                    return Err(invalid(format!("fGn length {length} must be a power of two >= 1024")));
                }
            }
            GeneratorKind::BinomialCascade { p, levels } => {
                if !(*p > 0.5 && *p < 1.0) {
                    return Err(invalid(format!("cascade weight {p} outside (0.5, 1)")));
                }
                if !(10..=30).contains(levels) {
                    return Err(invalid(format!("cascade levels {levels} outside 10..=30")));
                }
            }
            GeneratorKind::IidGaussian { length } => {
                if *length == 0 {
                    return Err(invalid("length must be positive"));
                }
            }
            GeneratorKind::GarchSim { model, params, length } => {
                params.check_stationary(*model)?;
                if *length == 0 {
                    return Err(invalid("length must be positive"));
                }
            }
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<IncrementSeries> {
        self.validate()?;
        let (values, role, id) = match &self.kind {
            GeneratorKind::Fgn { hurst, length } => {
                (fgn(*hurst, *length, self.seed)?, SeriesRole::Generic, format!("fgn_h{hurst}"))
            }
            GeneratorKind::BinomialCascade { p, levels } => {
                (binomial_cascade(*p, *levels, self.seed)?, SeriesRole::Generic, format!("cascade_p{p}"))
            }
            GeneratorKind::IidGaussian { length } => {
                (iid_gaussian(*length, self.seed), SeriesRole::Generic, "iid_gaussian".into())
            }
            GeneratorKind::GarchSim { model, params, length } => (
                simulate_garch(*model, params, *length, self.seed)?,
                SeriesRole::Return,
                format!("{}_sim", model.name()),
            ),
        };
        IncrementSeries::new(values, role, id)
    }
}

pub fn iid_gaussian(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// `r_t = e_t s_t` under the chosen recursion, after [`GARCH_BURN_IN`] discarded draws.
pub fn simulate_garch(model: GarchModel, params: &GarchParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    Ok(simulate_garch_with_variance(model, params, n, seed)?.0)
}

/// As [`simulate_garch`], also returning the conditional variance path.
pub fn simulate_garch_with_variance(
    model: GarchModel,
    params: &GarchParams,
    n: usize,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    params.check_stationary(model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut var = params.long_run_variance(model);
    let mut r_prev = 0.0;
    let mut returns = Vec::with_capacity(n);
    let mut variances = Vec::with_capacity(n);
    for t in 0..GARCH_BURN_IN + n {
        if t > 0 {
            var = next_variance(model, params, r_prev, var);
        }
        let e: f64 = StandardNormal.sample(&mut rng);
        let r = e * var.sqrt();
        if !r.is_finite() {
            return Err(invalid("GARCH simulation diverged"));
        }
        if t >= GARCH_BURN_IN {
            returns.push(r);
            variances.push(var);
        }
        r_prev = r;
    }
    Ok((returns, variances))
}

/// Two fGn series sharing the Hurst index with contemporaneous correlation `rho`.
pub fn correlated_fgn_pair(hurst: f64, rho: f64, n: usize, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(invalid(format!("correlation {rho} outside [-1, 1]")));
    }
    let x = fgn(hurst, n, seed)?;
    let z = fgn(hurst, n, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    let c = (1.0 - rho * rho).sqrt();
    let y = x.iter().zip(&z).map(|(a, b)| rho * a + c * b).collect();
    Ok((x, y))
}

/// Regime in which the coupled pair's y responds to x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoupledRegime {
    Down,
    Up,
}

/// A price-like `x` whose drift switches sign between regimes, and a `y`
/// that tracks `-coupling * x` only inside one regime.
///
/// `x_t = scale (drift d_t + e_t)`, `d_t = +-drift` alternating every
/// `regime_len` steps from a random phase; `y_t = scale (-c x_t/scale [regime] + n_t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub regime_len: usize,
    pub drift: f64,
    pub coupling: f64,
    pub scale: f64,
    pub coupled: CoupledRegime,
}

impl Default for CouplingSpec {
    fn default() -> Self {
        Self { regime_len: 200, drift: 0.5, coupling: 1.0, scale: 0.01, coupled: CoupledRegime::Down }
    }
}

pub fn coupled_pair(spec: &CouplingSpec, n: usize, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    if spec.regime_len == 0 || !(spec.scale > 0.0) {
        return Err(invalid("regime_len and scale must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase = rng.random_range(0..2 * spec.regime_len);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for t in 0..n {
        let up = ((t + phase) / spec.regime_len).is_multiple_of(2);
        let e: f64 = StandardNormal.sample(&mut rng);
        let eta: f64 = StandardNormal.sample(&mut rng);
        let xt = if up { spec.drift } else { -spec.drift } + e;
        let active = match spec.coupled {
            CoupledRegime::Down => !up,
            CoupledRegime::Up => up,
        };
        let yt = if active { -spec.coupling * xt + eta } else { eta };
        x.push(spec.scale * xt);
        y.push(spec.scale * yt);
    }
    Ok((x, y))
}
