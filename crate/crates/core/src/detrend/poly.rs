use crate::error::{invalid, Result};

/// Least-squares polynomial detrending over windows of a fixed length.
///
/// The fit is a projection onto an orthonormal basis of polynomials in the
/// centred, rescaled abscissa, built once per window length. This avoids the
/// normal equations, which are badly conditioned at window lengths of a few
/// hundred points.
#[derive(Debug, Clone)]
pub struct PolyDetrender {
    len: usize,
    order: usize,
    // (order + 1) rows of length `len`, row-major
    basis: Vec<f64>,
}

impl PolyDetrender {
    pub fn new(len: usize, order: usize) -> Result<Self> {
        if len < order + 2 {
            return Err(invalid(format!(
                "window of length {len} too short for a degree-{order} fit (need {})",
                order + 2
            )));
        }
        let centre = (len as f64 - 1.0) / 2.0;
        let half = centre.max(1.0);
        let t: Vec<f64> = (0..len).map(|i| (i as f64 - centre) / half).collect();
        let mut basis = vec![0.0; (order + 1) * len];
        for j in 0..=order {
            let mut col: Vec<f64> = t.iter().map(|ti| ti.powi(j as i32)).collect();
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for k in 0..j {
                    let q = &basis[k * len..(k + 1) * len];
                    let dot: f64 = q.iter().zip(&col).map(|(a, b)| a * b).sum();
                    for (c, qi) in col.iter_mut().zip(q) {
                        *c -= dot * qi;
                    }
                }
            }
            let norm = col.iter().map(|c| c * c).sum::<f64>().sqrt();
            for (dst, c) in basis[j * len..(j + 1) * len].iter_mut().zip(&col) {
                *dst = c / norm;
            }
        }
        Ok(Self { len, order, basis })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Writes `y - fit(y)` into `out`.
    pub fn residuals_into(&self, y: &[f64], out: &mut [f64]) {
        assert_eq!(y.len(), self.len, "window length mismatch");
        assert_eq!(out.len(), self.len, "output length mismatch");
        out.copy_from_slice(y);
        for q in self.basis.chunks_exact(self.len) {
            let dot: f64 = q.iter().zip(y).map(|(a, b)| a * b).sum();
            for (o, qi) in out.iter_mut().zip(q) {
                *o -= dot * qi;
            }
        }
    }

    pub fn residuals(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        self.residuals_into(y, &mut out);
        out
    }
}
