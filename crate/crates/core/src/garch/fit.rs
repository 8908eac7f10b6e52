use nalgebra::DMatrix;
use serde::Serialize;
use statrs::function::erf::erfc;

use super::model::{GarchModel, GarchParams, ABS_NORMAL_MEAN};
use super::optim::{bfgs, hessian, nelder_mead, QuasiNewtonOptions, SimplexOptions};
use crate::chi2::chi2_sf;
use crate::error::{invalid, Error, Result};

/// Shortest return series accepted for estimation.
pub const MIN_FIT_LENGTH: usize = 300;

/// Lags in the squared-residual portmanteau test.
pub const Q2_LAGS: usize = 10;

const LN_2PI: f64 = 1.837_877_066_409_345_5;
const HESSIAN_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StdErrors {
    pub omega: Option<f64>,
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    pub beta: Option<f64>,
}

impl StdErrors {
    fn from_array(a: [Option<f64>; 4]) -> Self {
        Self { omega: a[0], alpha1: a[1], alpha2: a[2], beta: a[3] }
    }

    pub fn as_array(&self) -> [Option<f64>; 4] {
        [self.omega, self.alpha1, self.alpha2, self.beta]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GarchFit {
    pub model: GarchModel,
    /// `alpha2` held at zero.
    pub symmetric: bool,
    pub params: GarchParams,
    /// `None` for a fixed parameter or when the Hessian is not invertible.
    pub std_errors: StdErrors,
    pub loglik: f64,
    /// `(-2 loglik + 2k) / N`.
    pub aic: f64,
    pub n_obs: usize,
    pub q2_stat: f64,
    pub q2_pvalue: f64,
    pub converged: bool,
    /// Log-likelihood at each starting point of the restart schedule.
    pub start_logliks: Vec<f64>,
}

impl GarchFit {
    /// Two-sided normal p-value of each free parameter.
    pub fn p_values(&self) -> [Option<f64>; 4] {
        let p = self.params.as_array();
        let se = self.std_errors.as_array();
        std::array::from_fn(|i| se[i].map(|s| erfc((p[i] / s).abs() / std::f64::consts::SQRT_2)))
    }

    /// `***`, `**`, `*` at 1%, 5% and 10%.
    pub fn stars(&self) -> [&'static str; 4] {
        self.p_values().map(|p| match p {
            Some(p) if p < 0.01 => "***",
            Some(p) if p < 0.05 => "**",
            Some(p) if p < 0.10 => "*",
            _ => "",
        })
    }

    pub fn conditional_variances(&self, r: &[f64]) -> Vec<f64> {
        super::model::conditional_variances(self.model, &self.params, r, sample_variance(r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShockAsymmetry {
    NegativeShockDominant,
    PositiveShockDominant,
    Insignificant,
}

impl ShockAsymmetry {
    pub fn name(self) -> &'static str {
        match self {
            ShockAsymmetry::NegativeShockDominant => "negative_shock_dominant",
            ShockAsymmetry::PositiveShockDominant => "positive_shock_dominant",
            ShockAsymmetry::Insignificant => "insignificant",
        }
    }
}

/// Direction of the volatility response from the sign and significance of
/// `alpha2`. A negative EGARCH `alpha2` raises volatility after falls; in
/// the GJR parameterisation the same response appears as a positive `alpha2`
/// and the reading below follows the reversed convention for that model.
pub fn asymmetry_sign(model: GarchModel, alpha2: f64, se: Option<f64>) -> ShockAsymmetry {
    let Some(se) = se.filter(|s| *s > 0.0) else { return ShockAsymmetry::Insignificant };
    if (alpha2 / se).abs() <= 1.96 {
        return ShockAsymmetry::Insignificant;
    }
    let negative = alpha2 < 0.0;
    match (model, negative) {
        (GarchModel::Egarch, true) | (GarchModel::Gjr, false) => ShockAsymmetry::NegativeShockDominant,
        _ => ShockAsymmetry::PositiveShockDominant,
    }
}

pub fn fit_asymmetry(fit: &GarchFit) -> ShockAsymmetry {
    asymmetry_sign(fit.model, fit.params.alpha2, fit.std_errors.alpha2)
}

fn sample_variance(r: &[f64]) -> f64 {
    let n = r.len() as f64;
    let m = r.iter().sum::<f64>() / n;
    r.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n
}

/// Gaussian log-likelihood `sum -(ln 2pi + ln s2_t + r_t^2 / s2_t) / 2` with
/// `s2_1` the sample variance; `None` if the recursion leaves `(0, inf)`.
pub fn log_likelihood(model: GarchModel, p: &GarchParams, r: &[f64], var0: f64) -> Option<f64> {
    if !(var0 > 0.0) {
        return None;
    }
    let ll = match model {
        GarchModel::Gjr => {
            let mut v = var0;
            let mut acc = 0.0;
            for (t, &rt) in r.iter().enumerate() {
                if t > 0 {
                    let prev = r[t - 1];
                    let a = if prev < 0.0 { p.alpha1 + p.alpha2 } else { p.alpha1 };
                    v = p.omega + a * prev * prev + p.beta * v;
                    if !(v > 0.0 && v.is_finite()) {
                        return None;
                    }
                }
                acc += v.ln() + rt * rt / v;
            }
            acc
        }
        GarchModel::Egarch => {
            // carried as ln s2 so each step needs a single exp
            let mut lv = var0.ln();
            let mut inv_sd = (-0.5 * lv).exp();
            let mut acc = 0.0;
            for (t, &rt) in r.iter().enumerate() {
                if t > 0 {
                    let z = r[t - 1] * inv_sd;
                    lv = p.omega + p.alpha1 * z.abs() + p.alpha2 * z + p.beta * lv;
                    if !(lv.abs() < 700.0) {
                        return None;
                    }
                    inv_sd = (-0.5 * lv).exp();
                }
                let z = rt * inv_sd;
                acc += lv + z * z;
            }
            acc
        }
    };
    let ll = -0.5 * (r.len() as f64 * LN_2PI + ll);
    ll.is_finite().then_some(ll)
}

fn logistic(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Unconstrained coordinates for each model.
///
/// GJR: `ln w`, persistence `P = a1 + a2/2 + b` in (0, 1), the share of `P`
/// carried by `b`, and the split of the shock response between up moves
/// (`a1`) and down moves (`a1 + a2`). EGARCH: `w, a1, a2` free and
/// `b = tanh`. The symmetric variants drop the `a2` coordinate.
#[derive(Debug, Clone, Copy)]
struct Transform {
    model: GarchModel,
    symmetric: bool,
}

impl Transform {
    fn dim(&self) -> usize {
        if self.symmetric {
            3
        } else {
            4
        }
    }

    fn decode(&self, t: &[f64]) -> GarchParams {
        match self.model {
            GarchModel::Gjr => {
                let omega = t[0].exp();
                let pers = logistic(t[1]);
                let share = logistic(t[2]);
                let beta = pers * share;
                let shock = 2.0 * pers * (1.0 - share);
                let up = if self.symmetric { 0.5 } else { logistic(t[3]) };
                let a1 = shock * up;
                let down = shock * (1.0 - up);
                GarchParams::new(omega, a1, down - a1, beta)
            }
            GarchModel::Egarch => {
                if self.symmetric {
                    GarchParams::new(t[0], t[1], 0.0, t[2].tanh())
                } else {
                    GarchParams::new(t[0], t[1], t[2], t[3].tanh())
                }
            }
        }
    }

    fn encode(&self, p: &GarchParams) -> Vec<f64> {
        let clamp = |v: f64| v.clamp(1e-6, 1.0 - 1e-6);
        match self.model {
            GarchModel::Gjr => {
                let pers = clamp(p.alpha1 + p.alpha2 / 2.0 + p.beta);
                let share = clamp(p.beta / pers);
                let shock = 2.0 * pers * (1.0 - share);
                let mut t = vec![p.omega.max(1e-300).ln(), logit(pers), logit(share)];
                if !self.symmetric {
                    t.push(logit(clamp(p.alpha1 / shock)));
                }
                t
            }
            GarchModel::Egarch => {
                let b = p.beta.clamp(-1.0 + 1e-9, 1.0 - 1e-9).atanh();
                if self.symmetric {
                    vec![p.omega, p.alpha1, b]
                } else {
                    vec![p.omega, p.alpha1, p.alpha2, b]
                }
            }
        }
    }

    /// Indices into `[w, a1, a2, b]` that are free.
    fn free(&self) -> Vec<usize> {
        if self.symmetric {
            vec![0, 1, 3]
        } else {
            vec![0, 1, 2, 3]
        }
    }
}

/// Deterministic starting points spanning low to high persistence.
fn starts(model: GarchModel, symmetric: bool, var: f64) -> Vec<GarchParams> {
    let a2 = |v: f64| if symmetric { 0.0 } else { v };
    match model {
        GarchModel::Gjr => {
            [(0.05, 0.05, 0.50), (0.05, 0.05, 0.80), (0.08, 0.04, 0.85), (0.03, 0.03, 0.93), (0.02, 0.02, 0.97)]
                .iter()
                .map(|&(a1, aa2, b)| {
                    let a2 = a2(aa2);
                    let pers: f64 = a1 + a2 / 2.0 + b;
                    GarchParams::new(var * (1.0 - pers), a1, a2, b)
                })
                .collect()
        }
        GarchModel::Egarch => {
            [(0.10, -0.02, 0.50), (0.15, -0.05, 0.80), (0.20, 0.0, 0.90), (0.10, -0.05, 0.95), (0.10, 0.02, 0.98)]
                .iter()
                .map(|&(a1, aa2, b)| {
                    let omega = var.ln() * (1.0 - b) - a1 * ABS_NORMAL_MEAN;
                    GarchParams::new(omega, a1, a2(aa2), b)
                })
                .collect()
        }
    }
}

/// Maximum-likelihood (1,1) fit with Gaussian innovations.
pub fn fit(model: GarchModel, r: &[f64]) -> Result<GarchFit> {
    fit_inner(model, r, false)
}

/// As [`fit`] with `alpha2 = 0`.
pub fn fit_symmetric(model: GarchModel, r: &[f64]) -> Result<GarchFit> {
    fit_inner(model, r, true)
}

fn fit_inner(model: GarchModel, r: &[f64], symmetric: bool) -> Result<GarchFit> {
    if r.len() < MIN_FIT_LENGTH {
        return Err(Error::TooShort { needed: MIN_FIT_LENGTH, got: r.len() });
    }
    if let Some(k) = r.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(k));
    }
    let var0 = sample_variance(r);
    if !(var0 > 0.0) {
        return Err(Error::ZeroVariance("returns"));
    }
    let tr = Transform { model, symmetric };
    let objective =
        |t: &[f64]| -> f64 { log_likelihood(model, &tr.decode(t), r, var0).map_or(f64::INFINITY, |ll| -ll) };

    let start_points = starts(model, symmetric, var0);
    let start_logliks: Vec<f64> =
        start_points.iter().map(|p| log_likelihood(model, p, r, var0).unwrap_or(f64::NEG_INFINITY)).collect();
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for p in &start_points {
        let t0 = tr.encode(p);
        let nm = nelder_mead(objective, &t0, &SimplexOptions::default());
        let polished = bfgs(objective, &nm.x, &QuasiNewtonOptions::default());
        let (x, f, ok) = if polished.f <= nm.f {
            (polished.x, polished.f, polished.converged || nm.converged)
        } else {
            (nm.x, nm.f, nm.converged)
        };
        if best.as_ref().is_none_or(|b| f < b.1) {
            best = Some((x, f, ok));
        }
    }
    let (theta, nll, mut converged) = best.expect("non-empty restart schedule");
    if !nll.is_finite() {
        return Err(invalid("likelihood undefined at every starting point"));
    }
    let params = tr.decode(&theta);
    let loglik = -nll;

    let std_errors = match delta_method_errors(&tr, &objective, &theta) {
        Some(se) => se,
        None => {
            converged = false;
            [None; 4]
        }
    };

    let variances = super::model::conditional_variances(model, &params, r, var0);
    let z2: Vec<f64> = r.iter().zip(&variances).map(|(x, v)| x * x / v).collect();
    let (q2_stat, q2_pvalue) = ljung_box(&z2, Q2_LAGS).unwrap_or((f64::NAN, f64::NAN));
    let k = tr.dim() as f64;
    let n = r.len() as f64;
    Ok(GarchFit {
        model,
        symmetric,
        params,
        std_errors: StdErrors::from_array(std_errors),
        loglik,
        aic: (-2.0 * loglik + 2.0 * k) / n,
        n_obs: r.len(),
        q2_stat,
        q2_pvalue,
        converged,
        start_logliks,
    })
}

/// `Cov(p) = J H^-1 J'` with `H` the Hessian of the negative log-likelihood
/// in transformed coordinates and `J = dp/dtheta`.
fn delta_method_errors<F: Fn(&[f64]) -> f64>(tr: &Transform, f: &F, theta: &[f64]) -> Option<[Option<f64>; 4]> {
    let d = theta.len();
    let h = hessian(f, theta, HESSIAN_STEP);
    if h.iter().flatten().any(|v| !v.is_finite()) {
        return None;
    }
    let hm = DMatrix::from_fn(d, d, |i, j| h[i][j]);
    let chol = hm.cholesky()?;
    let cov_t = chol.inverse();
    let free = tr.free();
    let step = 1e-6;
    let mut jac = DMatrix::zeros(free.len(), d);
    for j in 0..d {
        let mut tp = theta.to_vec();
        let mut tm = theta.to_vec();
        tp[j] += step;
        tm[j] -= step;
        let (pp, pm) = (tr.decode(&tp).as_array(), tr.decode(&tm).as_array());
        for (row, &i) in free.iter().enumerate() {
            jac[(row, j)] = (pp[i] - pm[i]) / (2.0 * step);
        }
    }
    let cov_p = &jac * cov_t * jac.transpose();
    let mut out = [None; 4];
    for (row, &i) in free.iter().enumerate() {
        let v = cov_p[(row, row)];
        out[i] = (v > 0.0 && v.is_finite()).then(|| v.sqrt());
    }
    Some(out)
}

/// Ljung-Box statistic `N (N + 2) sum_k rho_k^2 / (N - k)` over `lags` lags
/// with its chi-squared p-value.
pub fn ljung_box(x: &[f64], lags: usize) -> Result<(f64, f64)> {
    let n = x.len();
    if lags == 0 || n <= 3 * lags {
        return Err(Error::TooShort { needed: 3 * lags + 1, got: n });
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let c0: f64 = c.iter().map(|v| v * v).sum();
    if !(c0 > 0.0) {
        return Err(Error::ZeroVariance("residuals"));
    }
    let nf = n as f64;
    let q = (1..=lags)
        .map(|k| {
            let rho = c[k..].iter().zip(&c[..n - k]).map(|(a, b)| a * b).sum::<f64>() / c0;
            rho * rho / (nf - k as f64)
        })
        .sum::<f64>()
        * nf
        * (nf + 2.0);
    Ok((q, chi2_sf(lags as u32, q)))
}

/// Ljung-Box test on squared standardised residuals.
pub fn ljung_box_squared(std_resid: &[f64], lags: usize) -> Result<(f64, f64)> {
    let sq: Vec<f64> = std_resid.iter().map(|v| v * v).collect();
    ljung_box(&sq, lags)
}
