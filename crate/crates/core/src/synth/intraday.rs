use chrono::NaiveDate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::GARCH_BURN_IN;
use crate::error::{invalid, Result};
use crate::garch::{next_variance, GarchModel, GarchParams};
use crate::series::IntradaySeries;

/// Intraday prices whose daily variance follows a (1,1) recursion.
///
/// Day `t` has i.i.d. Gaussian bar returns of variance `s2_t / bars_per_day`
/// and its summed return drives `s2_{t+1}`. The first day opens at midnight
/// and so has one return fewer than the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntradaySimSpec {
    pub model: GarchModel,
    pub params: GarchParams,
    pub days: usize,
    #[serde(default = "default_interval")]
    pub interval_minutes: u32,
    #[serde(default = "default_start")]
    pub start: NaiveDate,
    #[serde(default = "default_price")]
    pub initial_price: f64,
}

fn default_interval() -> u32 {
    5
}

fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2016, 6, 1).unwrap()
}

fn default_price() -> f64 {
    100.0
}

pub fn simulate_intraday(spec: &IntradaySimSpec, seed: u64) -> Result<IntradaySeries> {
    spec.params.check_stationary(spec.model)?;
    if spec.days < 2 {
        return Err(invalid("at least two days are needed"));
    }
    if spec.interval_minutes == 0 || 1440 % spec.interval_minutes != 0 {
        return Err(invalid(format!("interval {} must divide a day", spec.interval_minutes)));
    }
    if !(spec.initial_price > 0.0) {
        return Err(invalid("initial price must be positive"));
    }
    let bars = (1440 / spec.interval_minutes) as usize;
    let step = 60 * spec.interval_minutes as i64;
    let t0 = spec.start.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut var = spec.params.long_run_variance(spec.model);
    let mut r_prev = 0.0;
    for t in 0..GARCH_BURN_IN {
        if t > 0 {
            var = next_variance(spec.model, &spec.params, r_prev, var);
        }
        let e: f64 = StandardNormal.sample(&mut rng);
        r_prev = e * var.sqrt();
    }

    // bar k closes at t0 + k step; its return belongs to the day of that close,
    // matching how realized volatility assigns returns to days
    let total = spec.days * bars;
    let mut ts = Vec::with_capacity(total);
    let mut ps = Vec::with_capacity(total);
    let mut log_p = spec.initial_price.ln();
    ts.push(t0);
    ps.push(spec.initial_price);
    let mut sd = 0.0;
    let mut day_return = 0.0;
    for k in 1..total {
        if k == 1 || k % bars == 0 {
            if k > 1 {
                r_prev = day_return;
                day_return = 0.0;
            }
            var = next_variance(spec.model, &spec.params, r_prev, var);
            sd = (var / bars as f64).sqrt();
        }
        let e: f64 = StandardNormal.sample(&mut rng);
        let r = e * sd;
        day_return += r;
        log_p += r;
        ts.push(t0 + k as i64 * step);
        ps.push(log_p.exp());
    }
    if !log_p.is_finite() {
        return Err(invalid("intraday simulation diverged"));
    }
    IntradaySeries::new(ts, ps, spec.interval_minutes)
}
