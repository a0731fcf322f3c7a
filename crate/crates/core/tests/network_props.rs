use mrtnet_core::network::{ase, laplace_psi0, psuc_exact_nt2, ExponentialArray, MomentSource, NetworkConfig};
use proptest::prelude::*;

fn config() -> impl Strategy<Value = NetworkConfig> {
    (
        prop_oneof![Just(0.0), 1e-6..1e-1f64],
        2.1..6.0f64,
        0.2..5.0f64,
        prop_oneof![Just(0.0), 1e-3..10.0f64],
        -20.0..30.0f64,
    )
        .prop_map(|(lambda, alpha, r00, noise, gamma_db)| {
            NetworkConfig::new(lambda, alpha, r00, noise, 10f64.powf(gamma_db / 10.0)).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn two_antenna_probability_is_valid_and_decreasing(cfg in config(), rho in 0.0..0.99f64) {
        let p = psuc_exact_nt2(&cfg, rho).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        let q = psuc_exact_nt2(&cfg.with_gamma_th(cfg.gamma_th * 1.5), rho).unwrap();
        prop_assert!(q <= p + 1e-12);
        let denser = psuc_exact_nt2(&cfg.with_lambda(cfg.lambda * 2.0 + 1e-6), rho).unwrap();
        prop_assert!(denser <= p + 1e-12);
    }

    #[test]
    fn approximate_probability_is_valid(cfg in config(), n in 2usize..9, rho in 0.05..0.95f64) {
        let array = ExponentialArray::new(n, rho).unwrap();
        let p = array.psuc(&cfg, MomentSource::Approximate).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        let a = ase(&cfg, p).unwrap();
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn laplace_transform_is_completely_monotone_in_s(
        s in 0.0..100.0f64,
        lambda in 0.0..1e-2f64,
        alpha in 2.1..6.0f64,
        rho in 0.0..0.95f64,
    ) {
        let xi = ExponentialArray::new(2, rho).unwrap().xi(alpha, MomentSource::Exact).unwrap();
        let l = laplace_psi0(s, lambda, xi, alpha).unwrap();
        prop_assert!(l > 0.0 && l <= 1.0);
        prop_assert!(laplace_psi0(s + 1.0, lambda, xi, alpha).unwrap() <= l);
    }
}
