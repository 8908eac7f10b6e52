use mfadcca_core::chi2::{chi2_cdf, chi2_quantile};
use mfadcca_core::dcca::{rho_dcca, rho_dcca_asym};
use mfadcca_core::mfadcca::generalized_mean;
use mfadcca_core::qcc::{cross_correlations, qcc};
use mfadcca_core::synth::iid_gaussian;
use mfadcca_core::ScaleGrid;
use proptest::prelude::*;

fn pair(seed: u64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let x = iid_gaussian(n, seed);
    let z = iid_gaussian(n, seed.wrapping_add(1));
    (x, z)
}

fn mixed(x: &[f64], z: &[f64], w: f64) -> Vec<f64> {
    x.iter().zip(z).map(|(a, b)| w * a + (1.0 - w) * b).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rho_is_bounded_and_symmetric(seed in any::<u64>(), w in -1.0f64..1.0) {
        let (x, z) = pair(seed, 400);
        let y = mixed(&x, &z, w);
        let grid = ScaleGrid::log_spaced(10, 80, 6).unwrap();
        let xy = rho_dcca(&x, &y, &grid).unwrap();
        let yx = rho_dcca(&y, &x, &grid).unwrap();
        for (a, b) in xy.iter().zip(&yx) {
            prop_assert!(a.abs() <= 1.0 + 1e-12);
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rho_ignores_affine_rescaling(seed in any::<u64>(), k in 0.01f64..100.0, c in -5.0f64..5.0) {
        let (x, z) = pair(seed, 300);
        let y = mixed(&x, &z, 0.6);
        let x2: Vec<f64> = x.iter().map(|v| k * v + c).collect();
        let grid = ScaleGrid::log_spaced(10, 60, 5).unwrap();
        let a = rho_dcca(&x, &y, &grid).unwrap();
        let b = rho_dcca(&x2, &y, &grid).unwrap();
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() < 1e-9, "{u} vs {v}");
        }
    }

    #[test]
    fn trend_split_accounts_for_every_window(seed in any::<u64>()) {
        let (x, z) = pair(seed, 500);
        let grid = ScaleGrid::log_spaced(10, 50, 4).unwrap();
        let curve = rho_dcca_asym(&x, &z, &grid).unwrap();
        for (i, s) in curve.scales.iter().enumerate() {
            prop_assert_eq!(curve.n_up[i] + curve.n_down[i] + curve.n_flat[i], 500 - s);
            for r in [curve.rho_up[i], curve.rho_down[i]].into_iter().flatten() {
                prop_assert!(r.abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn qcc_is_cumulative_and_scale_free(seed in any::<u64>(), k in 0.1f64..10.0) {
        let (x, y) = pair(seed, 200);
        let r = qcc(&x, &y, 20, 0.05).unwrap();
        prop_assert!(r.q_cc.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(r.critical.windows(2).all(|w| w[1] > w[0]));
        let ky: Vec<f64> = y.iter().map(|v| k * v).collect();
        let a = cross_correlations(&x, &y, 20).unwrap();
        let b = cross_correlations(&x, &ky, 20).unwrap();
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn generalized_mean_lies_between_extremes(v in prop::collection::vec(1e-6f64..1e3, 2..40), q in -12.0f64..12.0) {
        let m = generalized_mean(&v, q).unwrap();
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min).sqrt();
        let hi = v.iter().cloned().fold(0.0, f64::max).sqrt();
        prop_assert!(m >= lo * (1.0 - 1e-9) && m <= hi * (1.0 + 1e-9), "{lo} <= {m} <= {hi}");
    }

    #[test]
    fn chi2_quantile_inverts_cdf(m in 1u32..600, level in 0.001f64..0.5) {
        let c = chi2_quantile(m, level).unwrap();
        prop_assert!((chi2_cdf(m, c) - (1.0 - level)).abs() < 1e-9);
    }
}
