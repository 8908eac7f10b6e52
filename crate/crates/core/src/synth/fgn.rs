use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{invalid, Error, Result};

/// Autocovariance of unit-variance fractional Gaussian noise at lag `k`.
pub fn fgn_autocovariance(hurst: f64, k: usize) -> f64 {
    let k = k as f64;
    let e = 2.0 * hurst;
    0.5 * ((k + 1.0).powf(e) - 2.0 * k.powf(e) + (k - 1.0).abs().powf(e))
}

/// Exact fractional Gaussian noise by circulant embedding (Davies-Harte).
///
/// The autocovariance sequence is embedded in a circulant of size `2n`, whose
/// eigenvalues are non-negative for every `H` in (0, 1). The real part of the
/// transformed, eigenvalue-weighted complex white noise has exactly the fGn
/// covariance on its first `n` entries.
pub fn fgn(hurst: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(invalid(format!("Hurst index {hurst} outside (0, 1)")));
    }
    if n < 1024 || !n.is_power_of_two() {
        return Err(invalid(format!("fGn length {n} must be a power of two >= 1024")));
    }
    let m = 2 * n;
    let mut row: Vec<Complex<f64>> = (0..m)
        .map(|j| {
            let lag = if j <= n { j } else { m - j };
            Complex::new(fgn_autocovariance(hurst, lag), 0.0)
        })
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);

    let max_eig = row.iter().map(|c| c.re).fold(0.0, f64::max);
    let mut sqrt_eig = Vec::with_capacity(m);
    for c in &row {
        if c.re < -1e-9 * max_eig {
            return Err(Error::InvalidParameter(format!(
                "circulant embedding not non-negative definite (eigenvalue {})",
                c.re
            )));
        }
        sqrt_eig.push((c.re.max(0.0) / m as f64).sqrt());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w: Vec<Complex<f64>> = sqrt_eig
        .iter()
        .map(|s| {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            Complex::new(s * a, s * b)
        })
        .collect();
    fft.process(&mut w);
    Ok(w[..n].iter().map(|c| c.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lag_corr(x: &[f64], lag: usize) -> f64 {
        let n = x.len();
        let mean = x.iter().sum::<f64>() / n as f64;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
        let cov: f64 = (lag..n).map(|t| (x[t] - mean) * (x[t - lag] - mean)).sum();
        cov / var
    }

    #[test]
    fn autocovariance_closed_form() {
        assert_eq!(fgn_autocovariance(0.7, 0), 1.0);
        assert!((fgn_autocovariance(0.7, 1) - 0.3195079107728942).abs() < 1e-14);
        for k in 1..10 {
            assert!(fgn_autocovariance(0.5, k).abs() < 1e-15);
        }
    }

    #[test]
    fn white_noise_case() {
        let n = 1 << 14;
        let x = fgn(0.5, n, 3).unwrap();
        assert!(lag_corr(&x, 1).abs() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn persistent_lag_one_correlation() {
        let x = fgn(0.7, 1 << 16, 1).unwrap();
        let rho = lag_corr(&x, 1);
        assert!((rho - 0.3195079107728942).abs() < 0.02, "rho1 = {rho}");
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(fgn(0.3, 2048, 42).unwrap(), fgn(0.3, 2048, 42).unwrap());
        assert_ne!(fgn(0.3, 2048, 42).unwrap(), fgn(0.3, 2048, 43).unwrap());
    }

    #[test]
    fn mean_and_variance_converge() {
        for (h, seed) in [(0.3, 5u64), (0.5, 6), (0.7, 7)] {
            let n = 1usize << 16;
            let x = fgn(h, n, seed).unwrap();
            let mean = x.iter().sum::<f64>() / n as f64;
            let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
            let tol = 5.0 / (n as f64).sqrt();
            // the sample mean of fGn has std n^(H-1)
            assert!(mean.abs() < 5.0 * (n as f64).powf(h - 1.0), "H={h} mean {mean}");
            assert!((var - 1.0).abs() < tol.max(5.0 * (n as f64).powf(2.0 * h - 2.0)), "H={h} var {var}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(fgn(1.0, 1024, 0).is_err());
        assert!(fgn(0.5, 1000, 0).is_err());
        assert!(fgn(0.5, 512, 0).is_err());
    }
}
