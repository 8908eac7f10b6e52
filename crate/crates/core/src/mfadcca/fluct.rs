use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{QGrid, ScaleGrid};
use crate::detrend::{window_covariances, CovMode, IndexProxy, Profile, SegmentationPlan, Trend};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendClass {
    Overall,
    Up,
    Down,
}

impl TrendClass {
    pub const ALL: [TrendClass; 3] = [TrendClass::Overall, TrendClass::Up, TrendClass::Down];

    pub fn name(self) -> &'static str {
        match self {
            TrendClass::Overall => "overall",
            TrendClass::Up => "up",
            TrendClass::Down => "down",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FluctuationOptions {
    /// Degree of the local polynomial fitted to each profile window.
    pub order: usize,
    /// Fewest windows a trend class needs at a scale before F is reported.
    pub min_segments: usize,
}

impl Default for FluctuationOptions {
    fn default() -> Self {
        Self { order: 2, min_segments: 4 }
    }
}

/// `F_q(s)` for the overall, upward and downward window populations.
///
/// Cells are indexed `[q][s]`; `None` marks a cell with too few windows or a
/// non-positive value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluctuationTable {
    pub qs: Vec<f64>,
    pub scales: Vec<usize>,
    pub overall: Vec<Vec<Option<f64>>>,
    pub up: Vec<Vec<Option<f64>>>,
    pub down: Vec<Vec<Option<f64>>>,
    /// Total windows `2 floor(N/s)` per scale.
    pub segments: Vec<usize>,
    pub m_up: Vec<usize>,
    pub m_down: Vec<usize>,
    pub m_flat: Vec<usize>,
}

impl FluctuationTable {
    pub fn class(&self, class: TrendClass) -> &[Vec<Option<f64>>] {
        match class {
            TrendClass::Overall => &self.overall,
            TrendClass::Up => &self.up,
            TrendClass::Down => &self.down,
        }
    }
}

/// q-th order generalised mean of window covariances raised to 1/2.
///
/// `F_q = {mean (f2)^(q/2)}^(1/q)` and at `q = 0` `exp(mean ln(f2) / 2)`;
/// evaluated in log space with a max shift so large |q| neither overflows nor
/// underflows.
pub fn generalized_mean(f2: &[f64], q: f64) -> Option<f64> {
    if f2.is_empty() {
        return None;
    }
    let logs: Vec<f64> = f2.iter().map(|v| v.ln()).collect();
    let n = logs.len() as f64;
    let value = if q.abs() < 1e-12 {
        (logs.iter().sum::<f64>() / (2.0 * n)).exp()
    } else {
        let half = q / 2.0;
        let top = logs.iter().map(|l| half * l).fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return None;
        }
        let s: f64 = logs.iter().map(|l| (half * l - top).exp()).sum::<f64>() / n;
        ((top + s.ln()) / q).exp()
    };
    (value.is_finite() && value > 0.0).then_some(value)
}

struct ScaleRow {
    overall: Vec<Option<f64>>,
    up: Vec<Option<f64>>,
    down: Vec<Option<f64>>,
    segments: usize,
    counts: (usize, usize, usize),
}

/// Trend-conditional fluctuation functions over the two-sided segmentation.
///
/// The overall branch averages every window; the upward and downward branches
/// only those whose proxy slope has that sign, with flat windows in neither.
pub fn fluctuation_functions(
    x: &Profile,
    y: &Profile,
    proxy: &IndexProxy,
    scales: &ScaleGrid,
    qs: &QGrid,
    opts: &FluctuationOptions,
) -> Result<FluctuationTable> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if let Some(&s) = scales.scales().iter().find(|&&s| s < opts.order + 2 || s > n / 2) {
        return Err(invalid(format!("scale {s} outside the usable range {}..={} for N = {n}", opts.order + 2, n / 2)));
    }
    let rows: Vec<ScaleRow> = scales
        .scales()
        .par_iter()
        .map(|&s| -> Result<ScaleRow> {
            let plan = SegmentationPlan::two_sided(n, s)?;
            let cov = window_covariances(x, y, proxy, &plan, opts.order, CovMode::Abs)?;
            let counts = cov.counts();
            let pick = |t: Trend| -> Vec<f64> {
                cov.xy.iter().zip(&cov.trends).filter(|(_, tr)| **tr == t).map(|(v, _)| *v).collect()
            };
            let (up_f2, down_f2) = (pick(Trend::Up), pick(Trend::Down));
            let branch = |vals: &[f64]| -> Vec<Option<f64>> {
                if vals.len() < opts.min_segments {
                    vec![None; qs.len()]
                } else {
                    qs.qs().iter().map(|&q| generalized_mean(vals, q)).collect()
                }
            };
            Ok(ScaleRow {
                overall: branch(&cov.xy),
                up: branch(&up_f2),
                down: branch(&down_f2),
                segments: plan.len(),
                counts,
            })
        })
        .collect::<Result<_>>()?;

    let transpose = |get: &dyn Fn(&ScaleRow) -> &Vec<Option<f64>>| -> Vec<Vec<Option<f64>>> {
        (0..qs.len()).map(|qi| rows.iter().map(|r| get(r)[qi]).collect()).collect()
    };
    Ok(FluctuationTable {
        qs: qs.qs().to_vec(),
        scales: scales.scales().to_vec(),
        overall: transpose(&|r| &r.overall),
        up: transpose(&|r| &r.up),
        down: transpose(&|r| &r.down),
        segments: rows.iter().map(|r| r.segments).collect(),
        m_up: rows.iter().map(|r| r.counts.0).collect(),
        m_down: rows.iter().map(|r| r.counts.1).collect(),
        m_flat: rows.iter().map(|r| r.counts.2).collect(),
    })
}
