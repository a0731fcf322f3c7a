use mrtnet_core::corr::{eigen_spectrum, CovarianceMatrix, DEFAULT_DEGENERACY_TOL};
use mrtnet_core::fading::{
    approx_frac_moment, approx_pdf_g, exact_frac_moment, exact_pdf_g, norm_sq_cdf, pdf_g_quadrature,
    rayleigh_quotient_pdf, FadingDistribution,
};
use mrtnet_core::quad::{integrate, integrate_to_infinity, Tolerance};

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn closed_form_density_matches_mixture_quadrature() {
    for rho in [0.05, 0.3, 0.5, 0.8, 0.95] {
        for x in [0.0, 1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0] {
            let closed = exact_pdf_g(rho, x).unwrap();
            let quad = pdf_g_quadrature(rho, x).unwrap();
            assert!(rel_err(closed, quad) < 1e-9, "rho={rho} x={x}: {closed} vs {quad}");
        }
    }
}

#[test]
fn density_at_origin() {
    // (1-ρ²)/(2ρ) ∫ dy / (y (2-y)²) at ρ = 1/2, evaluated symbolically.
    let expect = 0.75 * (0.5 * 3f64.ln() + 2.0 / 3.0);
    assert!(rel_err(exact_pdf_g(0.5, 0.0).unwrap(), expect) < 1e-10);
}

#[test]
fn density_integrates_to_one() {
    for rho in [0.1, 0.5, 0.9] {
        let total = integrate_to_infinity(|x| exact_pdf_g(rho, x).unwrap(), 0.0, Tolerance::default())
            .unwrap()
            .value;
        assert!((total - 1.0).abs() < 1e-9, "rho={rho}: {total}");
    }
}

#[test]
fn mean_power_is_mean_quotient() {
    for rho in [0.2, 0.5, 0.8] {
        let mean_g = integrate_to_infinity(|x| x * exact_pdf_g(rho, x).unwrap(), 0.0, Tolerance::default())
            .unwrap()
            .value;
        let mean_r = integrate(
            |y| y * rayleigh_quotient_pdf(rho, y).unwrap(),
            1.0 - rho,
            1.0 + rho,
            Tolerance::default(),
        )
        .unwrap()
        .value;
        assert!(rel_err(mean_g, mean_r) < 1e-9, "rho={rho}");
    }
    let mean_half = integrate_to_infinity(|x| x * exact_pdf_g(0.5, x).unwrap(), 0.0, Tolerance::default())
        .unwrap()
        .value;
    assert!(rel_err(mean_half, 2.0 - 0.75 * 3f64.ln()) < 1e-9);
}

// Quadrature of x^{2/α} against the mixture density, 50-digit reference.
const MOMENTS: [(f64, f64, f64); 9] = [
    (0.1, 2.5, 0.93611163180),
    (0.1, 3.5, 0.89365239161),
    (0.1, 6.0, 0.89463598168),
    (0.5, 2.5, 1.05554695947),
    (0.5, 3.5, 0.97008203832),
    (0.5, 6.0, 0.93627412090),
    (0.9, 2.5, 1.41170334978),
    (0.9, 3.5, 1.19472975202),
    (0.9, 6.0, 1.05739714754),
];

#[test]
fn fractional_moments_match_reference() {
    for (rho, alpha, expect) in MOMENTS {
        let got = exact_frac_moment(rho, alpha).unwrap();
        assert!(rel_err(got, expect) < 1e-10, "rho={rho} alpha={alpha}: {got}");
    }
}

#[test]
fn approximate_moment_matches_quadrature_of_exponential() {
    for (n, rho) in [(2, 0.5), (4, 0.8), (8, 0.3)] {
        let r = CovarianceMatrix::exponential(n, rho).unwrap();
        let dist = FadingDistribution::new(eigen_spectrum(&r, DEFAULT_DEGENERACY_TOL).unwrap());
        for alpha in [2.5, 4.0] {
            let quad = integrate_to_infinity(
                |x| x.powf(2.0 / alpha) * approx_pdf_g(&dist, x).unwrap(),
                0.0,
                Tolerance::default(),
            )
            .unwrap()
            .value;
            assert!(rel_err(approx_frac_moment(&dist, alpha).unwrap(), quad) < 1e-9);
        }
    }
}

#[test]
fn signal_power_mean_is_trace() {
    // E‖R^{1/2}h‖² = tr R = n; the mean is the integral of the survival function.
    for (n, rho) in [(2, 0.3), (3, 0.7), (5, 0.5), (4, 0.0)] {
        let r = CovarianceMatrix::exponential(n, rho).unwrap();
        let s = eigen_spectrum(&r, DEFAULT_DEGENERACY_TOL).unwrap();
        let mean = integrate_to_infinity(|x| 1.0 - norm_sq_cdf(&s, x).unwrap(), 0.0, Tolerance::default())
            .unwrap()
            .value;
        assert!(rel_err(mean, n as f64) < 1e-8, "n={n} rho={rho}: {mean}");
    }
}
