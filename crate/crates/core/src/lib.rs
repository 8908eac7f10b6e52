//! Asymmetric multifractal detrended cross-correlation analysis.

// `!(x > 0.0)` is deliberate: NaN must fail these checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chi2;
pub mod dcca;
pub mod detrend;
pub mod error;
pub mod garch;
pub mod mfadcca;
pub mod qcc;
pub mod series;
pub mod synth;

pub use dcca::{DccaCurve, Verdict};
pub use error::{Error, Result};
pub use garch::{GarchFit, GarchModel, GarchParams};
pub use mfadcca::{MfadccaConfig, MultifractalResult, QGrid, ScaleGrid, TrendClass};
pub use qcc::QccResult;
pub use series::{DailySeries, IncrementSeries, IntradaySeries, SeriesRole};
pub use synth::{GeneratorKind, GeneratorSpec, IntradaySimSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
