use mrtnet_core::corr::CovarianceMatrix;
use mrtnet_core::fading::{rayleigh_quotient_cdf, rayleigh_quotient_pdf, TabulatedCdf, exact_pdf_g};
use mrtnet_core::mcsim::{
    estimate_psuc, estimate_psuc_curve, ks_statistic, run_trials, sample_channel, sample_g_squared_batch,
    sample_ppp, sample_rayleigh_quotient_batch, simulate_sinr_batch, sized_window_radius, ChannelModel,
    EstimateWithCI, MonteCarloSettings,
};
use mrtnet_core::network::{psuc_exact_nt2, NetworkConfig};
use mrtnet_core::quad::{integrate, Tolerance};
use rand::Rng;

fn model(n: usize, rho: f64) -> ChannelModel {
    ChannelModel::new(CovarianceMatrix::exponential(n, rho).unwrap()).unwrap()
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn empirical_covariance_reproduces_matrix() {
    for (n, rho) in [(2, 0.8), (3, 0.5), (4, 0.95)] {
        let m = model(n, rho);
        let draws = run_trials(1_000_000, 21, |rng| Ok(sample_channel(m.sqrt(), rng))).unwrap();
        for i in 0..n {
            for j in 0..n {
                let cov: Vec<f64> = draws.iter().map(|h| (h.0[i] * h.0[j].conj()).re).collect();
                let e = EstimateWithCI::from_samples(&cov).unwrap();
                let target = m.covariance().get(i, j);
                assert!((e.mean - target).abs() < 0.01, "n={n} rho={rho} ({i},{j}): {}", e.mean);
            }
        }
    }
}

#[test]
fn uncorrelated_interference_power_is_unit_exponential() {
    let draws = sorted(sample_g_squared_batch(&model(3, 0.0), 1_000_000, 22).unwrap());
    let d = ks_statistic(&draws, |x| -(-x).exp_m1()).unwrap();
    assert!(d <= 0.002, "ks = {d}");
}

#[test]
fn interference_power_mean_is_mean_quotient() {
    let rho = 0.5;
    let draws = sample_g_squared_batch(&model(2, rho), 1_000_000, 23).unwrap();
    let e = EstimateWithCI::from_samples(&draws).unwrap();
    let oracle = integrate(
        |y| y * rayleigh_quotient_pdf(rho, y).unwrap(),
        1.0 - rho,
        1.0 + rho,
        Tolerance::default(),
    )
    .unwrap()
    .value;
    assert!((e.mean - oracle).abs() <= 3.0 * e.std_error, "{} vs {oracle} (se {})", e.mean, e.std_error);
}

#[test]
fn interference_power_follows_closed_form_density() {
    let rho = 0.8;
    let draws = sorted(sample_g_squared_batch(&model(2, rho), 1_000_000, 24).unwrap());
    let table = TabulatedCdf::from_density(|x| exact_pdf_g(rho, x), 100.0, 20_000).unwrap();
    let d = ks_statistic(&draws, |x| table.eval(x)).unwrap();
    assert!(d <= 0.01, "ks = {d}");
}

#[test]
fn quotient_follows_closed_form_law() {
    let rho = 0.5;
    let cov = CovarianceMatrix::exponential(2, rho).unwrap();
    let draws = sorted(sample_rayleigh_quotient_batch(&cov, 1_000_000, 25).unwrap());
    assert!(draws[0] > 1.0 - rho && draws[draws.len() - 1] < 1.0 + rho);
    let d = ks_statistic(&draws, |y| rayleigh_quotient_cdf(rho, y).unwrap()).unwrap();
    assert!(d <= 0.005, "ks = {d}");
}

#[test]
fn ks_null_distribution() {
    let u = sorted(run_trials(1_000_000, 26, |rng| Ok(rng.random::<f64>())).unwrap());
    let d = ks_statistic(&u, |x| x.clamp(0.0, 1.0)).unwrap();
    assert!(d < 1.63 / 1000.0, "ks = {d}");
}

#[test]
fn noise_limited_sinr_is_erlang() {
    let cfg = NetworkConfig::new(0.0, 3.5, 1.0, 1.0, 1.0).unwrap();
    let s = MonteCarloSettings::new(1_000_000, 27);
    let sinr = sorted(
        simulate_sinr_batch(&cfg, &model(2, 0.0), &s)
            .unwrap()
            .into_iter()
            .map(|d| d.sinr)
            .collect(),
    );
    let d = ks_statistic(&sinr, |x| 1.0 - (-x).exp() * (1.0 + x)).unwrap();
    assert!(d <= 0.005, "ks = {d}");
}

#[test]
fn truncated_shot_noise_mean() {
    // Interferers between r_in and R contribute 2πλ E|g|² (r_in^{2-α} - R^{2-α}) / (α - 2)
    // on average. The inner radius keeps the variance finite.
    let (lambda, alpha, r_in, radius) = (1e-3, 3.5, 1.0, 60.0);
    let rho = 0.5;
    let m = model(2, rho);
    let mean_g = 2.0 - 0.75 * 3f64.ln();
    let sums = run_trials(400_000, 28, |rng| {
        let distances = sample_ppp(lambda, radius, rng)?;
        let gains = sample_g_squared_batch_local(&m, distances.len(), rng);
        Ok(distances
            .iter()
            .zip(gains)
            .filter(|(r, _)| **r > r_in)
            .map(|(r, g)| r.powf(-alpha) * g)
            .sum::<f64>())
    })
    .unwrap();
    let e = EstimateWithCI::from_samples(&sums).unwrap();
    let oracle = 2.0 * std::f64::consts::PI * lambda * mean_g * (r_in.powf(2.0 - alpha) - radius.powf(2.0 - alpha)) / (alpha - 2.0);
    assert!((e.mean - oracle).abs() <= 3.0 * e.std_error, "{} vs {oracle} (se {})", e.mean, e.std_error);
}

fn sample_g_squared_batch_local<R: Rng + ?Sized>(m: &ChannelModel, n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| mrtnet_core::mcsim::sample_g_squared(m, rng)).collect()
}

#[test]
fn success_probability_matches_closed_form_at_operating_point() {
    let cfg = NetworkConfig::new(1e-4, 3.5, 1.0, 1.0, 1.0).unwrap();
    let rho = 0.7;
    let analytic = psuc_exact_nt2(&cfg, rho).unwrap();
    let window = sized_window_radius(1e-4, 3.5, 2.0, 1.0 / 0.3, 1e-3, 10.0);
    let s = MonteCarloSettings::new(100_000, 29).with_window_radius(window);
    let e = estimate_psuc(&cfg, &model(2, rho), &s).unwrap();
    assert!((e.mean - analytic).abs() <= 0.01f64.max(3.0 * e.std_error), "{} vs {analytic}", e.mean);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let cfg = NetworkConfig::new(1e-3, 3.5, 1.0, 1.0, 1.0).unwrap();
    let s = MonteCarloSettings::new(20_000, 30).with_window_radius(40.0);
    let m = model(3, 0.6);
    let thresholds = [0.1, 1.0, 10.0];
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let curve = estimate_psuc_curve(&cfg, &m, &thresholds, &s).unwrap();
                let g = sample_g_squared_batch(&m, 5000, 31).unwrap();
                (curve, g)
            })
    };
    let (a, ga) = run(1);
    let (b, gb) = run(4);
    assert_eq!(a, b);
    assert_eq!(ga.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), gb.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
}
