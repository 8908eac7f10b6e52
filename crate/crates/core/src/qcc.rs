//! Cumulative cross-correlation test statistic.

use serde::Serialize;

use crate::chi2::chi2_quantile;
use crate::error::{invalid, Error, Result};

/// Largest lag tested by default.
pub const DEFAULT_M_MAX: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QccResult {
    pub level: f64,
    pub m_values: Vec<usize>,
    pub q_cc: Vec<f64>,
    pub critical: Vec<f64>,
    pub significant: Vec<bool>,
}

/// `X_i = sum_{k>i} x_k y_{k-i} / sqrt(sum x^2 sum y^2)` for `i = 1..=m_max`.
///
/// The series are used as given, without mean removal.
pub fn cross_correlations(x: &[f64], y: &[f64], m_max: usize) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if m_max == 0 || n <= m_max + 1 {
        return Err(invalid(format!("need 1 <= m_max < N - 1 (m_max {m_max}, N {n})")));
    }
    let ex: f64 = x.iter().map(|v| v * v).sum();
    let ey: f64 = y.iter().map(|v| v * v).sum();
    if ex == 0.0 {
        return Err(Error::ZeroVariance("x"));
    }
    if ey == 0.0 {
        return Err(Error::ZeroVariance("y"));
    }
    let norm = (ex * ey).sqrt();
    Ok((1..=m_max).map(|i| x[i..].iter().zip(&y[..n - i]).map(|(a, b)| a * b).sum::<f64>() / norm).collect())
}

/// `Q(m) = N^2 sum_{i<=m} X_i^2 / (N - i)` for `m = 1..=m_max`, each compared
/// with the upper-`level` quantile of chi-squared with `m` degrees of freedom.
pub fn qcc(x: &[f64], y: &[f64], m_max: usize, level: f64) -> Result<QccResult> {
    if !(level > 0.0 && level < 1.0) {
        return Err(invalid(format!("level {level} outside (0, 1)")));
    }
    let xi = cross_correlations(x, y, m_max)?;
    let n = x.len() as f64;
    let mut acc = 0.0;
    let q_cc: Vec<f64> = xi
        .iter()
        .enumerate()
        .map(|(k, v)| {
            acc += v * v / (n - (k + 1) as f64);
            n * n * acc
        })
        .collect();
    let critical = (1..=m_max).map(|m| chi2_quantile(m as u32, level)).collect::<Result<Vec<_>>>()?;
    let significant = q_cc.iter().zip(&critical).map(|(q, c)| q > c).collect();
    Ok(QccResult { level, m_values: (1..=m_max).collect(), q_cc, critical, significant })
}
