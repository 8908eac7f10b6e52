//! Profiles, the multiplicative index proxy, window geometry and local
//! polynomial detrending shared by the fluctuation and coefficient analyses.
//!
//! Positions follow the profile convention: profile slot `j` holds the
//! cumulative value after `j + 1` increments, and the proxy slot `j + 1` is
//! the index level at that same point (proxy slot 0 is the base level 1).

mod poly;

pub use poly::PolyDetrender;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::series::IncrementSeries;

/// Cumulative sum of an increment series, optionally mean-centred.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    values: Vec<f64>,
}

impl Profile {
    /// `X(k) = sum_{t<=k} (x_t - mean(x))`.
    pub fn centered(x: &[f64]) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::TooShort { needed: 2, got: x.len() });
        }
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        Ok(Self { values: cumsum(x.iter().map(|v| v - mean)) })
    }

    /// `R(k) = sum_{t<=k} x_t`, without centring.
    pub fn cumulative(x: &[f64]) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::TooShort { needed: 2, got: x.len() });
        }
        Ok(Self { values: cumsum(x.iter().copied()) })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn window(&self, seg: Segment) -> &[f64] {
        &self.values[seg.start..seg.start + seg.len]
    }
}

fn cumsum(it: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    it.map(|v| {
        acc += v;
        acc
    })
    .collect()
}

pub fn build_profile(x: &IncrementSeries) -> Result<Profile> {
    Profile::centered(x.values())
}

/// `I(k) = I(k-1) exp(x_k)` with `I(0) = 1`, over `N + 1` positions.
///
/// Levels are held as logarithms. Trend classification only depends on the
/// slope sign, which is unchanged by a positive factor, so each window is
/// rescaled by its own maximum before exponentiation and long unit-variance
/// series never overflow.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexProxy {
    log_levels: Vec<f64>,
}

impl IndexProxy {
    pub fn new(x: &[f64]) -> Result<Self> {
        let mut log_levels = Vec::with_capacity(x.len() + 1);
        log_levels.push(0.0);
        let mut acc = 0.0;
        for (k, v) in x.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(k));
            }
            acc += v;
            log_levels.push(acc);
        }
        Ok(Self { log_levels })
    }

    pub fn len(&self) -> usize {
        self.log_levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_levels.is_empty()
    }

    pub fn log_levels(&self) -> &[f64] {
        &self.log_levels
    }

    /// Index levels `I(0..=N)`; fails if any level leaves the f64 range.
    pub fn levels(&self) -> Result<Vec<f64>> {
        self.log_levels
            .iter()
            .enumerate()
            .map(|(k, l)| {
                let v = l.exp();
                if v.is_finite() && v > 0.0 {
                    Ok(v)
                } else {
                    Err(Error::Overflow(format!("index proxy leaves f64 range at step {k}")))
                }
            })
            .collect()
    }

    /// Proxy levels at the profile positions covered by `seg`, divided by the
    /// window maximum.
    pub fn window(&self, seg: Segment) -> Vec<f64> {
        let logs = &self.log_levels[seg.start + 1..seg.start + 1 + seg.len];
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        logs.iter().map(|l| (l - top).exp()).collect()
    }

    pub fn classify(&self, seg: Segment) -> Trend {
        classify_trend(&self.window(seg))
    }
}

pub fn build_index_proxy(x: &IncrementSeries) -> Result<IndexProxy> {
    IndexProxy::new(x.values())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Up,
    Down,
    Flat,
}

/// Sign of the OLS slope of `values` against `1..=len`.
///
/// The slope numerator is accumulated as `sum w_j (v[len-1-j] - v[j])` with
/// positive weights, so a window of identical values gives exactly zero.
pub fn classify_trend(values: &[f64]) -> Trend {
    let n = values.len();
    let centre = (n as f64 - 1.0) / 2.0;
    let mut num = 0.0;
    for j in 0..n / 2 {
        num += (centre - j as f64) * (values[n - 1 - j] - values[j]);
    }
    if num > 0.0 {
        Trend::Up
    } else if num < 0.0 {
        Trend::Down
    } else {
        Trend::Flat
    }
}

/// A window over profile positions `start..start + len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentationMode {
    /// `floor(N/s)` windows from the start followed by as many from the end.
    TwoSidedNonOverlap,
    /// All `N - s` windows of length `s + 1`.
    Overlap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationPlan {
    pub scale: usize,
    pub mode: SegmentationMode,
    pub segments: Vec<Segment>,
}

impl SegmentationPlan {
    pub fn two_sided(n: usize, scale: usize) -> Result<Self> {
        if scale == 0 || scale > n {
            return Err(invalid(format!("scale {scale} outside 1..={n}")));
        }
        let ns = n / scale;
        let forward = (0..ns).map(|v| Segment { start: v * scale, len: scale });
        let backward = (0..ns).map(|v| Segment { start: n - (v + 1) * scale, len: scale });
        Ok(Self { scale, mode: SegmentationMode::TwoSidedNonOverlap, segments: forward.chain(backward).collect() })
    }

    pub fn overlapping(n: usize, scale: usize) -> Result<Self> {
        if scale == 0 || scale >= n {
            return Err(invalid(format!("scale {scale} outside 1..{n}")));
        }
        Ok(Self {
            scale,
            mode: SegmentationMode::Overlap,
            segments: (0..n - scale).map(|start| Segment { start, len: scale + 1 }).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovMode {
    /// Mean of `|rx| |ry|`.
    Abs,
    /// Mean of `rx ry`.
    Signed,
}

/// Mean product of two residual vectors over the window length.
///
/// Two-sided segments have length `s` and overlapping windows `s + 1`, so the
/// window length is the normaliser in both analyses.
pub fn residual_cov(rx: &[f64], ry: &[f64], mode: CovMode) -> f64 {
    debug_assert_eq!(rx.len(), ry.len());
    let sum: f64 = match mode {
        CovMode::Abs => rx.iter().zip(ry).map(|(a, b)| (a * b).abs()).sum(),
        CovMode::Signed => rx.iter().zip(ry).map(|(a, b)| a * b).sum(),
    };
    sum / rx.len() as f64
}

/// Detrended covariance of two profiles over one window.
pub fn detrended_cov(x: &Profile, y: &Profile, seg: Segment, order: usize, mode: CovMode) -> Result<f64> {
    check_pair(x, y)?;
    if seg.start + seg.len > x.len() {
        return Err(invalid("segment exceeds profile"));
    }
    let det = PolyDetrender::new(seg.len, order)?;
    Ok(residual_cov(&det.residuals(x.window(seg)), &det.residuals(y.window(seg)), mode))
}

fn check_pair(x: &Profile, y: &Profile) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    Ok(())
}

/// Per-window detrended second moments and trend labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DetrendedCov {
    /// Detrended covariance of x and y per window.
    pub xy: Vec<f64>,
    /// Detrended variance of x per window (signed mode only).
    pub xx: Option<Vec<f64>>,
    /// Detrended variance of y per window (signed mode only).
    pub yy: Option<Vec<f64>>,
    pub trends: Vec<Trend>,
}

impl DetrendedCov {
    /// `(up, down, flat)` window counts.
    pub fn counts(&self) -> (usize, usize, usize) {
        self.trends.iter().fold((0, 0, 0), |(u, d, f), t| match t {
            Trend::Up => (u + 1, d, f),
            Trend::Down => (u, d + 1, f),
            Trend::Flat => (u, d, f + 1),
        })
    }
}

/// Evaluates every window of `plan`. Windows are processed in parallel and
/// collected in plan order, so results match sequential evaluation.
///
/// In signed mode the per-window variances of x and y are returned as well,
/// because the coefficient analysis normalises over the same window set.
pub fn window_covariances(
    x: &Profile,
    y: &Profile,
    proxy: &IndexProxy,
    plan: &SegmentationPlan,
    order: usize,
    mode: CovMode,
) -> Result<DetrendedCov> {
    check_pair(x, y)?;
    if proxy.len() != x.len() + 1 {
        return Err(Error::LengthMismatch(proxy.len().saturating_sub(1), x.len()));
    }
    let Some(first) = plan.segments.first() else {
        return Ok(DetrendedCov { xy: vec![], xx: None, yy: None, trends: vec![] });
    };
    let det = PolyDetrender::new(first.len, order)?;
    let same = x == y;
    let rows: Vec<(f64, f64, f64, Trend)> = plan
        .segments
        .par_iter()
        .map_init(
            || (vec![0.0; det.len()], vec![0.0; det.len()]),
            |(rx, ry), &seg| {
                det.residuals_into(x.window(seg), rx);
                let ry: &[f64] = if same {
                    rx
                } else {
                    det.residuals_into(y.window(seg), ry);
                    ry
                };
                let xy = residual_cov(rx, ry, mode);
                let (xx, yy) = match mode {
                    CovMode::Signed => (residual_cov(rx, rx, CovMode::Signed), residual_cov(ry, ry, CovMode::Signed)),
                    CovMode::Abs => (f64::NAN, f64::NAN),
                };
                (xy, xx, yy, proxy.classify(seg))
            },
        )
        .collect();
    let signed = mode == CovMode::Signed;
    Ok(DetrendedCov {
        xy: rows.iter().map(|r| r.0).collect(),
        xx: signed.then(|| rows.iter().map(|r| r.1).collect()),
        yy: signed.then(|| rows.iter().map(|r| r.2).collect()),
        trends: rows.iter().map(|r| r.3).collect(),
    })
}
