use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// `E|e|` for a standard Gaussian.
pub const ABS_NORMAL_MEAN: f64 = 0.797_884_560_802_865_4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GarchModel {
    /// `ln s2_t = w + a1 |r|/s + a2 r/s + b ln s2_{t-1}`
    Egarch,
    /// `s2_t = w + (a1 + a2 [r < 0]) r^2 + b s2_{t-1}`
    Gjr,
}

impl GarchModel {
    pub fn name(self) -> &'static str {
        match self {
            GarchModel::Egarch => "egarch",
            GarchModel::Gjr => "gjr",
        }
    }
}

impl std::str::FromStr for GarchModel {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "egarch" => Ok(GarchModel::Egarch),
            "gjr" | "gjr-garch" | "gjr_garch" => Ok(GarchModel::Gjr),
            other => Err(invalid(format!("unknown model {other:?}"))),
        }
    }
}

/// Parameters of a (1,1) model; `alpha2` carries the sign asymmetry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GarchParams {
    pub omega: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
}

impl GarchParams {
    pub fn new(omega: f64, alpha1: f64, alpha2: f64, beta: f64) -> Self {
        Self { omega, alpha1, alpha2, beta }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.omega, self.alpha1, self.alpha2, self.beta]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    /// GJR: `w > 0, a1 >= 0, a1 + a2 >= 0, b >= 0, a1 + a2/2 + b < 1`.
    /// EGARCH: `|b| < 1`.
    pub fn check_stationary(&self, model: GarchModel) -> Result<()> {
        let p = self;
        if p.as_array().iter().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite GARCH parameter"));
        }
        match model {
            GarchModel::Gjr => {
                if !(p.omega > 0.0) {
                    return Err(invalid(format!("GJR omega {} must be positive", p.omega)));
                }
                if p.alpha1 < 0.0 || p.alpha1 + p.alpha2 < 0.0 || p.beta < 0.0 {
                    return Err(invalid("GJR requires alpha1 >= 0, alpha1 + alpha2 >= 0, beta >= 0"));
                }
                let persistence = p.alpha1 + p.alpha2 / 2.0 + p.beta;
                if persistence >= 1.0 {
                    return Err(invalid(format!("explosive GJR parameters: alpha1 + alpha2/2 + beta = {persistence}")));
                }
            }
            GarchModel::Egarch => {
                if p.beta.abs() >= 1.0 {
                    return Err(invalid(format!("explosive EGARCH parameters: |beta| = {}", p.beta.abs())));
                }
            }
        }
        Ok(())
    }

    /// Stationary variance level used to start simulations.
    pub fn long_run_variance(&self, model: GarchModel) -> f64 {
        match model {
            GarchModel::Gjr => self.omega / (1.0 - self.alpha1 - self.alpha2 / 2.0 - self.beta),
            GarchModel::Egarch => ((self.omega + self.alpha1 * ABS_NORMAL_MEAN) / (1.0 - self.beta)).exp(),
        }
    }
}

/// One step of the variance recursion.
#[inline]
pub fn next_variance(model: GarchModel, p: &GarchParams, r_prev: f64, var_prev: f64) -> f64 {
    match model {
        GarchModel::Gjr => {
            let a = if r_prev < 0.0 { p.alpha1 + p.alpha2 } else { p.alpha1 };
            p.omega + a * r_prev * r_prev + p.beta * var_prev
        }
        GarchModel::Egarch => {
            let z = r_prev / var_prev.sqrt();
            (p.omega + p.alpha1 * z.abs() + p.alpha2 * z + p.beta * var_prev.ln()).exp()
        }
    }
}

/// Conditional variances `s2_1..s2_N` with `s2_1 = var0`.
pub fn conditional_variances(model: GarchModel, p: &GarchParams, r: &[f64], var0: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(r.len());
    if r.is_empty() {
        return out;
    }
    let mut v = var0;
    out.push(v);
    for &prev in &r[..r.len() - 1] {
        v = next_variance(model, p, prev, v);
        out.push(v);
    }
    out
}
