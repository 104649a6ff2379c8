//! Properties of the projection on simulated data with a known true covariance.

use covproj::linalg::sample_covariance;
use covproj::projector::{normalize, project, Norm, ProjectionConfig};
use covproj::scenarios::{jammer_covariance, sample_gaussian, total_covariance, true_kappa, Jammer, SpatialScenario};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// When `M / sigma2` is feasible, `||M/sigma2 - X*|| <= 2 ||M/sigma2 - S||` in the projection norm.
    #[test]
    fn estimate_is_within_twice_the_sample_error(
        power_db in 0.0f64..40.0, angle in -60.0f64..60.0, bf in 0.0f64..0.5,
        k in 2usize..24, seed in any::<u64>(), spectral in any::<bool>(), slack in 1.0f64..3.0,
    ) {
        let scen = SpatialScenario {
            n: 6,
            jammers: vec![Jammer { power_db, angle_deg: angle, fractional_bandwidth: bf }],
            noise_power_db: 0.0,
            sinc: Default::default(),
        };
        let m = total_covariance(&jammer_covariance(&scen), 0.0);
        let kappa = true_kappa(&m).unwrap() * slack;
        let data = sample_gaussian(&m, k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let s_hat = sample_covariance(&data).unwrap();
        let norm = if spectral { Norm::Spectral } else { Norm::Frobenius };
        let sigma2 = 1.0;
        let (m_hat, _) = project(&s_hat, &ProjectionConfig::new(sigma2, kappa, norm.clone())).unwrap();

        let x = normalize(&m, sigma2).unwrap();
        let lhs = norm.matrix_norm(&diff(&x, &normalize(&m_hat, sigma2).unwrap())).unwrap();
        let rhs = norm.matrix_norm(&diff(&x, &normalize(&s_hat, sigma2).unwrap())).unwrap();
        prop_assert!(lhs <= 2.0 * rhs + 1e-9 * (1.0 + rhs), "{lhs} > 2 * {rhs}");
    }
}

fn diff(a: &covproj::HermitianMatrix, b: &covproj::HermitianMatrix) -> covproj::HermitianMatrix {
    covproj::HermitianMatrix::from_dense(a.as_matrix() - b.as_matrix(), 1e-9).unwrap()
}
