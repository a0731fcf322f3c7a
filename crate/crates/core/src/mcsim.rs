//! Seeded Monte Carlo simulator of the downlink model.
//!
//! The typical receiver sits at the origin, its serving base station at the
//! fixed distance `r00`, and interferers form a homogeneous PPP on a disk of
//! radius `window_radius` (no exclusion zone). Every base station uses MRT
//! towards its own receiver, so the serving link delivers `‖h̃_00‖²` and
//! interferer `i` delivers `|g_i|² = |h̃_0i^H h̃_ii|² / ‖h̃_ii‖²`.
//!
//! Reproducibility: trial `k` draws from `ChaCha8Rng::seed_from_u64(seed)`
//! with stream `k`, so results do not depend on how trials are scheduled
//! across threads. Reductions are integer counts or in-order sums over a
//! trial-indexed buffer.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;

use crate::corr::{matrix_sqrt, CovarianceMatrix, MatrixSqrt};
use crate::error::{invalid, Error, Result};
use crate::network::NetworkConfig;

pub mod ks;

pub use ks::ks_statistic;

pub const DEFAULT_WINDOW_RADIUS: f64 = 2000.0;
pub const DEFAULT_TRUNCATION_TOLERANCE: f64 = 1e-3;

const BATCH: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloSettings {
    pub trials: usize,
    pub window_radius: f64,
    pub master_seed: u64,
    /// Budget for the bias of `-log L_Ψ0(s)` caused by the finite window,
    /// at the largest Laplace argument of interest.
    pub truncation_tolerance: f64,
}

impl MonteCarloSettings {
    pub fn new(trials: usize, master_seed: u64) -> Self {
        Self {
            trials,
            window_radius: DEFAULT_WINDOW_RADIUS,
            master_seed,
            truncation_tolerance: DEFAULT_TRUNCATION_TOLERANCE,
        }
    }

    pub fn with_window_radius(self, window_radius: f64) -> Self {
        Self { window_radius, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials", 0.0, "at least one trial is required"));
        }
        if !(self.window_radius > 0.0 && self.window_radius.is_finite()) {
            return Err(invalid("window_radius", self.window_radius, "window radius must be positive"));
        }
        Ok(())
    }
}

/// Mean interference from interferers outside radius `window` when the mean
/// cross-link power is `mean_gain`: `2πλ E[g] R^{2-α} / (α - 2)`.
pub fn truncated_interference_mean(lambda: f64, alpha: f64, mean_gain: f64, window: f64) -> f64 {
    2.0 * std::f64::consts::PI * lambda * mean_gain * window.powf(2.0 - alpha) / (alpha - 2.0)
}

/// Smallest window for which `s_max` times the truncated interference mean
/// stays below `tolerance`. Never smaller than `floor`.
pub fn sized_window_radius(lambda: f64, alpha: f64, mean_gain: f64, s_max: f64, tolerance: f64, floor: f64) -> f64 {
    if lambda == 0.0 || s_max == 0.0 {
        return floor;
    }
    let base = 2.0 * std::f64::consts::PI * lambda * mean_gain * s_max / ((alpha - 2.0) * tolerance);
    base.powf(1.0 / (alpha - 2.0)).max(floor)
}

/// A circularly-symmetric complex Gaussian vector (one per link).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector(pub Vec<Complex64>);

impl ChannelVector {
    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `self^H other`.
    pub fn inner(&self, other: &ChannelVector) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Correlated channel model: the covariance and its symmetric square root.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    cov: CovarianceMatrix,
    sqrt: MatrixSqrt,
}

impl ChannelModel {
    pub fn new(cov: CovarianceMatrix) -> Result<Self> {
        let sqrt = matrix_sqrt(&cov)?;
        Ok(Self { cov, sqrt })
    }

    pub fn covariance(&self) -> &CovarianceMatrix {
        &self.cov
    }

    pub fn sqrt(&self) -> &MatrixSqrt {
        &self.sqrt
    }

    pub fn order(&self) -> usize {
        self.cov.order()
    }
}

pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Standard complex Gaussian vector, variance 1/2 per real dimension.
pub fn standard_channel<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ChannelVector {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    ChannelVector(
        (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re * scale, im * scale)
            })
            .collect(),
    )
}

fn apply_real(matrix: &[f64], n: usize, h: &ChannelVector) -> ChannelVector {
    ChannelVector(
        (0..n)
            .map(|i| (0..n).map(|j| h.0[j] * matrix[i * n + j]).sum())
            .collect(),
    )
}

/// `h̃ = R^{1/2} h` with `h` standard complex Gaussian.
pub fn sample_channel<R: Rng + ?Sized>(sqrt: &MatrixSqrt, rng: &mut R) -> ChannelVector {
    let h = standard_channel(sqrt.order(), rng);
    apply_real(sqrt.entries(), sqrt.order(), &h)
}

/// One draw of `|g|² = |h̃_0^H h̃_i|² / ‖h̃_i‖²` with independent `h̃_0`, `h̃_i`.
pub fn sample_g_squared<R: Rng + ?Sized>(model: &ChannelModel, rng: &mut R) -> f64 {
    loop {
        let cross = sample_channel(&model.sqrt, rng);
        let own = sample_channel(&model.sqrt, rng);
        let norm = own.norm_sq();
        if norm > 0.0 {
            return cross.inner(&own).norm_sqr() / norm;
        }
    }
}

/// One draw of the generalized Rayleigh quotient `h^H R² h / h^H R h`.
pub fn sample_rayleigh_quotient<R: Rng + ?Sized>(cov: &CovarianceMatrix, rng: &mut R) -> f64 {
    let n = cov.order();
    loop {
        let h = standard_channel(n, rng);
        let rh = apply_real(cov.entries(), n, &h);
        let den = h.inner(&rh).re;
        if den > 0.0 {
            return rh.norm_sq() / den;
        }
    }
}

/// Distances from the origin of a PPP of density `lambda` on a disk.
pub fn sample_ppp<R: Rng + ?Sized>(lambda: f64, window_radius: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", lambda, "density must be nonnegative"));
    }
    let mean = lambda * std::f64::consts::PI * window_radius * window_radius;
    if mean == 0.0 {
        return Ok(Vec::new());
    }
    let count: f64 = Poisson::new(mean)
        .map_err(|_| invalid("lambda", lambda, "Poisson mean out of range"))?
        .sample(rng);
    Ok((0..count as usize)
        .map(|_| window_radius * rng.random::<f64>().sqrt())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrDraw {
    /// `r00^{-α} ‖h̃_00‖²`.
    pub signal: f64,
    /// `Ψ0 = Σ r_i^{-α} |g_i|²`.
    pub interference: f64,
    pub sinr: f64,
}

/// One realization of the SINR at the typical receiver.
pub fn simulate_sinr<R: Rng + ?Sized>(
    cfg: &NetworkConfig,
    model: &ChannelModel,
    settings: &MonteCarloSettings,
    rng: &mut R,
) -> Result<SinrDraw> {
    let own = sample_channel(&model.sqrt, rng);
    let signal = cfg.r00.powf(-cfg.alpha) * own.norm_sq();
    let interference = sample_interference(cfg, model, settings.window_radius, rng)?;
    Ok(SinrDraw {
        signal,
        interference,
        sinr: signal / (interference + cfg.noise_over_power),
    })
}

fn sample_interference<R: Rng + ?Sized>(cfg: &NetworkConfig, model: &ChannelModel, window: f64, rng: &mut R) -> Result<f64> {
    let distances = sample_ppp(cfg.lambda, window, rng)?;
    Ok(distances
        .iter()
        .map(|&r| r.powf(-cfg.alpha) * sample_g_squared(model, rng))
        .sum())
}

/// Runs `trial` for every trial index and returns results in index order.
pub fn run_trials<T, F>(trials: usize, master_seed: u64, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
{
    let batches = trials.div_ceil(BATCH);
    let nested: Vec<Result<Vec<T>>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let start = b * BATCH;
            let end = (start + BATCH).min(trials);
            (start..end)
                .map(|k| {
                    let mut rng = trial_rng(master_seed, k as u64);
                    trial(&mut rng)
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(trials);
    for batch in nested {
        out.extend(batch?);
    }
    Ok(out)
}

/// Monte Carlo point estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithCI {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
}

impl EstimateWithCI {
    pub fn from_count(successes: usize, trials: usize) -> Self {
        let p = successes as f64 / trials as f64;
        Self {
            mean: p,
            std_error: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
        }
    }

    /// Sample mean and standard error with pairwise summation.
    pub fn from_samples(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        let n = values.len() as f64;
        let mean = pairwise_sum(values) / n;
        let centered: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = if values.len() > 1 {
            pairwise_sum(&centered) / (n - 1.0)
        } else {
            0.0
        };
        Ok(Self {
            mean,
            std_error: (var / n).sqrt(),
            trials: values.len(),
        })
    }
}

fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 64 {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// Draws `settings.trials` SINR realizations in trial order.
pub fn simulate_sinr_batch(cfg: &NetworkConfig, model: &ChannelModel, settings: &MonteCarloSettings) -> Result<Vec<SinrDraw>> {
    cfg.validate()?;
    settings.validate()?;
    run_trials(settings.trials, settings.master_seed, |rng| simulate_sinr(cfg, model, settings, rng))
}

/// `P[SINR > γ_th]` with a binomial standard error.
pub fn estimate_psuc(cfg: &NetworkConfig, model: &ChannelModel, settings: &MonteCarloSettings) -> Result<EstimateWithCI> {
    Ok(estimate_psuc_curve(cfg, model, &[cfg.gamma_th], settings)?[0])
}

/// Success probability at several thresholds from one set of SINR draws.
pub fn estimate_psuc_curve(
    cfg: &NetworkConfig,
    model: &ChannelModel,
    thresholds: &[f64],
    settings: &MonteCarloSettings,
) -> Result<Vec<EstimateWithCI>> {
    let draws = simulate_sinr_batch(cfg, model, settings)?;
    Ok(thresholds
        .iter()
        .map(|&g| {
            let hits = draws.iter().filter(|d| d.sinr > g).count();
            EstimateWithCI::from_count(hits, draws.len())
        })
        .collect())
}

/// Empirical `E[exp(-s Ψ0)]`.
pub fn estimate_laplace(cfg: &NetworkConfig, model: &ChannelModel, s: f64, settings: &MonteCarloSettings) -> Result<EstimateWithCI> {
    Ok(estimate_laplace_curve(cfg, model, &[s], settings)?[0])
}

/// Empirical Laplace transform at several arguments from shared draws.
pub fn estimate_laplace_curve(
    cfg: &NetworkConfig,
    model: &ChannelModel,
    args: &[f64],
    settings: &MonteCarloSettings,
) -> Result<Vec<EstimateWithCI>> {
    cfg.validate()?;
    settings.validate()?;
    if let Some(&bad) = args.iter().find(|s| !(**s >= 0.0)) {
        return Err(invalid("s", bad, "Laplace argument must be nonnegative"));
    }
    let psi = run_trials(settings.trials, settings.master_seed, |rng| {
        sample_interference(cfg, model, settings.window_radius, rng)
    })?;
    args.iter()
        .map(|&s| {
            let values: Vec<f64> = psi.iter().map(|p| (-s * p).exp()).collect();
            EstimateWithCI::from_samples(&values)
        })
        .collect()
}

/// `trials` independent draws of `|g|²`, in trial order.
pub fn sample_g_squared_batch(model: &ChannelModel, trials: usize, master_seed: u64) -> Result<Vec<f64>> {
    run_trials(trials, master_seed, |rng| Ok(sample_g_squared(model, rng)))
}

/// `trials` independent generalized Rayleigh quotients, in trial order.
pub fn sample_rayleigh_quotient_batch(cov: &CovarianceMatrix, trials: usize, master_seed: u64) -> Result<Vec<f64>> {
    run_trials(trials, master_seed, |rng| Ok(sample_rayleigh_quotient(cov, rng)))
}
