use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalePolicy {
    pub s_min: usize,
    pub s_max: usize,
    pub count: usize,
}

/// Strictly increasing integer window sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleGrid {
    scales: Vec<usize>,
    policy: ScalePolicy,
}

impl ScaleGrid {
    /// `count` log-spaced points between `s_min` and `s_max`, rounded, with
    /// duplicate integers collapsed.
    pub fn log_spaced(s_min: usize, s_max: usize, count: usize) -> Result<Self> {
        if s_min < 2 || s_min >= s_max {
            return Err(invalid(format!("scale range {s_min}..{s_max} is empty or below 2")));
        }
        if count < 2 {
            return Err(invalid("scale grid needs at least two points"));
        }
        let (lo, hi) = ((s_min as f64).ln(), (s_max as f64).ln());
        let mut scales: Vec<usize> =
            (0..count).map(|i| (lo + (hi - lo) * i as f64 / (count - 1) as f64).exp().round() as usize).collect();
        scales.dedup();
        Ok(Self { scales, policy: ScalePolicy { s_min, s_max, count } })
    }

    /// `s_min = max(20, N/100)`, `s_max = min(20 s_min, N/10)`, 100 points.
    pub fn fluctuation_policy(n: usize) -> Result<Self> {
        let s_min = 20.max(n / 100);
        let s_max = (20 * s_min).min(n / 10);
        if s_min >= s_max {
            return Err(invalid(format!(
                "series of length {n} too short for the scale policy (s_min {s_min}, s_max {s_max})"
            )));
        }
        Self::log_spaced(s_min, s_max, 100)
    }

    /// 30 log-spaced scales from 10 to `N/5`, used for coefficient curves.
    pub fn coefficient_default(n: usize) -> Result<Self> {
        Self::log_spaced(10, n / 5, 30)
    }

    pub fn from_scales(mut scales: Vec<usize>) -> Result<Self> {
        scales.sort_unstable();
        scales.dedup();
        if scales.is_empty() || scales[0] < 2 {
            return Err(invalid("scales must be non-empty and at least 2"));
        }
        let policy = ScalePolicy { s_min: scales[0], s_max: *scales.last().unwrap(), count: scales.len() };
        Ok(Self { scales, policy })
    }

    pub fn scales(&self) -> &[usize] {
        &self.scales
    }

    pub fn policy(&self) -> ScalePolicy {
        self.policy
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }
}

/// Strictly increasing moment orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QGrid {
    qs: Vec<f64>,
}

impl Default for QGrid {
    /// -10 to 10 in steps of 0.5.
    fn default() -> Self {
        Self::range(-10.0, 10.0, 0.5).expect("default q grid")
    }
}

impl QGrid {
    pub fn new(qs: Vec<f64>) -> Result<Self> {
        if qs.is_empty() || qs.iter().any(|q| !q.is_finite()) {
            return Err(invalid("q grid must be non-empty and finite"));
        }
        if qs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("q grid must be strictly increasing"));
        }
        Ok(Self { qs })
    }

    /// `min, min + step, ...` up to `max` inclusive; values snapped to the
    /// step lattice so that 0 and integers are hit exactly.
    pub fn range(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || max < min {
            return Err(invalid(format!("bad q range {min}:{max}:{step}")));
        }
        let count = ((max - min) / step + 1e-9).floor() as usize + 1;
        let qs = (0..count)
            .map(|i| {
                let q = min + step * i as f64;
                let snapped = (q / step).round() * step;
                if (q - snapped).abs() < 1e-9 {
                    snapped
                } else {
                    q
                }
            })
            .map(|q| if q == 0.0 { 0.0 } else { q })
            .collect();
        Self::new(qs)
    }

    pub fn qs(&self) -> &[f64] {
        &self.qs
    }

    pub fn len(&self) -> usize {
        self.qs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qs.is_empty()
    }

    pub fn index_of(&self, q: f64) -> Option<usize> {
        self.qs.iter().position(|v| (v - q).abs() < 1e-9)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_at_typical_lengths() {
        let g = ScaleGrid::fluctuation_policy(1669).unwrap();
        assert_eq!(g.policy().s_min, 20);
        assert_eq!(g.policy().s_max, 166);
        assert_eq!(g.scales()[0], 20);
        assert_eq!(*g.scales().last().unwrap(), 166);
        assert!(g.scales().windows(2).all(|w| w[0] < w[1]));
        assert!(g.len() < 100);

        let g = ScaleGrid::fluctuation_policy(1 << 16).unwrap();
        assert_eq!((g.policy().s_min, g.policy().s_max), (655, 6553));
        assert_eq!(g.len(), 100);

        assert!(ScaleGrid::fluctuation_policy(150).is_err());
    }

    #[test]
    fn default_q_grid() {
        let q = QGrid::default();
        assert_eq!(q.len(), 41);
        for want in [-10.0, 0.0, 2.0, 10.0] {
            assert!(q.qs().contains(&want), "missing {want}");
        }
        assert!(QGrid::new(vec![1.0, 1.0]).is_err());
        let q = QGrid::range(-1.0, 1.0, 0.1).unwrap();
        assert_eq!(q.len(), 21);
        assert!(q.qs().contains(&0.0));
    }

    #[test]
    fn coefficient_grid_spans_to_a_fifth() {
        let g = ScaleGrid::coefficient_default(1669).unwrap();
        assert_eq!(g.scales()[0], 10);
        assert_eq!(*g.scales().last().unwrap(), 333);
        assert!(g.len() <= 30);
    }
}
