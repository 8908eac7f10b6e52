//! EGARCH(1,1) and GJR-GARCH(1,1) with Gaussian innovations.

mod fit;
mod model;
pub mod optim;

pub use fit::{
    asymmetry_sign, fit, fit_asymmetry, fit_symmetric, ljung_box, ljung_box_squared, log_likelihood, GarchFit,
    ShockAsymmetry, StdErrors, MIN_FIT_LENGTH, Q2_LAGS,
};
pub use model::*;
