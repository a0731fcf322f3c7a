//! Network-level analytics: interference Laplace transform, success
//! probability and area spectral efficiency.
//!
//! All thresholds are linear. With eigenvalues `mu_l`, hypoexponential
//! weights `c_l`, and `xi = π Γ(1 - 2/α) E{g^{2/α}}`,
//!
//! ```text
//! P_suc = Σ_l c_l exp(-r00^α (σ²/P) γ / mu_l) exp(-ξ λ r00² (γ / mu_l)^{2/α})
//! ```
//!
//! For two antennas the weights are `(1+ρ)/(2ρ)` and `-(1-ρ)/(2ρ)`. A
//! typeset variant with both weights positive sums to `1/ρ` at `γ → 0`; it
//! is kept only as [`Nt2Weights::AsTypeset`] so validation can show it fails.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use crate::corr::{eigen_spectrum, CovarianceMatrix, EigenSpectrum, DEFAULT_DEGENERACY_TOL};
use crate::error::{invalid, Error, Result};
use crate::fading::{self, neumaier_sum, FadingDistribution, SignalPowerLaw};
use crate::specfun::gamma_fn;

/// Slack allowed outside `[0, 1]` before a probability is treated as a fault.
pub const PROBABILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    /// Base-station density per unit area.
    pub lambda: f64,
    /// Pathloss exponent, strictly above 2.
    pub alpha: f64,
    /// Serving-link distance.
    pub r00: f64,
    /// Noise power over transmit power, `σ²/P`.
    pub noise_over_power: f64,
    /// Linear SINR threshold.
    pub gamma_th: f64,
}

impl NetworkConfig {
    pub fn new(lambda: f64, alpha: f64, r00: f64, noise_over_power: f64, gamma_th: f64) -> Result<Self> {
        let cfg = Self {
            lambda,
            alpha,
            r00,
            noise_over_power,
            gamma_th,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(invalid("lambda", self.lambda, "density must be nonnegative and finite"));
        }
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return Err(invalid("alpha", self.alpha, "pathloss exponent must exceed 2"));
        }
        if !(self.r00 > 0.0 && self.r00.is_finite()) {
            return Err(invalid("r00", self.r00, "serving distance must be positive"));
        }
        if !(self.noise_over_power >= 0.0 && self.noise_over_power.is_finite()) {
            return Err(invalid("noise_over_power", self.noise_over_power, "noise ratio must be nonnegative"));
        }
        if !(self.gamma_th > 0.0 && self.gamma_th.is_finite()) {
            return Err(invalid("gamma_th", self.gamma_th, "threshold must be positive (linear)"));
        }
        Ok(())
    }

    pub fn with_gamma_th(self, gamma_th: f64) -> Self {
        Self { gamma_th, ..self }
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct XiParameter(f64);

impl XiParameter {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `xi = π Γ(1 - 2/α) E{g^{2/α}}`.
pub fn xi(frac_moment: f64, alpha: f64) -> Result<XiParameter> {
    if !(alpha > 2.0) {
        return Err(invalid("alpha", alpha, "pathloss exponent must exceed 2"));
    }
    if !(frac_moment >= 0.0 && frac_moment.is_finite()) {
        return Err(invalid("frac_moment", frac_moment, "fractional moment must be nonnegative"));
    }
    Ok(XiParameter(PI * gamma_fn(1.0 - 2.0 / alpha)? * frac_moment))
}

/// `L_Ψ0(s) = exp(-ξ λ s^{2/α})`.
pub fn laplace_psi0(s: f64, lambda: f64, xi: XiParameter, alpha: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(invalid("s", s, "Laplace argument must be nonnegative"));
    }
    if !(alpha > 2.0) {
        return Err(invalid("alpha", alpha, "pathloss exponent must exceed 2"));
    }
    if s == 0.0 || lambda == 0.0 {
        return Ok(1.0);
    }
    Ok((-xi.0 * lambda * s.powf(2.0 / alpha)).exp())
}

/// Clamps values within [`PROBABILITY_SLACK`] of `[0, 1]`; anything further
/// out signals an implementation fault.
pub fn check_probability(value: f64) -> Result<f64> {
    check_probability_within(value, PROBABILITY_SLACK)
}

fn check_probability_within(value: f64, slack: f64) -> Result<f64> {
    if !(value >= -slack && value <= 1.0 + slack) {
        return Err(Error::ProbabilityOutOfRange { value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Success probability for a given signal-power law and `xi`.
///
/// This is the common core of the exact two-antenna and the approximate
/// `n_T`-antenna expressions; they differ only in the `xi` fed in.
pub fn psuc_with_xi(cfg: &NetworkConfig, law: &SignalPowerLaw, xi: XiParameter) -> Result<f64> {
    cfg.validate()?;
    let delta = 2.0 / cfg.alpha;
    let noise = cfg.noise_over_power;
    let interference = xi.0 * cfg.lambda;
    let s0 = cfg.r00.powf(cfg.alpha) * cfg.gamma_th;
    let value = match law {
        SignalPowerLaw::Hypoexponential { scales, weights } => {
            let failure = neumaier_sum(scales.iter().zip(weights).map(|(mu, c)| {
                let s = s0 / mu;
                let exponent = noise * s + interference * s.powf(delta);
                -c * (-exponent).exp_m1()
            }));
            // The alternating partial-fraction sum loses about ε·Σ|c| absolutely.
            let norm: f64 = weights.iter().map(|c| c.abs()).sum();
            let slack = PROBABILITY_SLACK.max(4.0 * weights.len() as f64 * f64::EPSILON * norm);
            return check_probability_within(1.0 - failure, slack);
        }
        SignalPowerLaw::Erlang { shape, scale } => erlang_success(*shape, s0 / scale, noise, interference, delta),
    };
    check_probability(value)
}

/// `Σ_{k<n} (-s)^k/k! y^{(k)}(s)` with `y(s) = exp(-A s - B s^δ)`.
///
/// This is `E[P(Gamma(n, 1) > s (Ψ + A'))]` written through derivatives of
/// the Laplace transform; every term is nonnegative.
fn erlang_success(shape: usize, s: f64, a: f64, b: f64, delta: f64) -> f64 {
    let sd = s.powf(delta);
    let y0 = (-(a * s) - b * sd).exp();
    // coef[j] = u^{(j+1)}(s) s^{j+1} / j!
    let mut coef = Vec::with_capacity(shape);
    coef.push(-a * s - b * delta * sd);
    let mut falling = delta;
    for j in 1..shape {
        falling *= (delta - j as f64) / j as f64;
        coef.push(-b * sd * falling);
    }
    // scaled[k] = y^{(k)}(s) s^k / k!
    let mut scaled = Vec::with_capacity(shape);
    scaled.push(y0);
    for k in 0..shape.saturating_sub(1) {
        let acc: f64 = (0..=k).map(|j| coef[j] * scaled[k - j]).sum();
        scaled.push(acc / (k + 1) as f64);
    }
    scaled
        .iter()
        .enumerate()
        .map(|(k, v)| if k % 2 == 0 { *v } else { -*v })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Nt2Weights {
    /// `(1+ρ)/(2ρ)` and `-(1-ρ)/(2ρ)`, consistent with the general expression.
    Corrected,
    /// Both weights positive. Sums to `1/ρ` at `γ → 0`; kept for regression
    /// checks only and never clamped.
    AsTypeset,
}

/// Two-antenna success probability for a given `xi` and weight convention.
pub fn psuc_nt2_with_weights(cfg: &NetworkConfig, rho: f64, xi: XiParameter, weights: Nt2Weights) -> Result<f64> {
    cfg.validate()?;
    if !(rho > 0.0 && rho < 1.0) {
        return Err(invalid("rho", rho, "two-antenna closed form needs 0 < rho < 1"));
    }
    let delta = 2.0 / cfg.alpha;
    let s0 = cfg.r00.powf(cfg.alpha) * cfg.gamma_th;
    let term = |mu: f64| {
        let s = s0 / mu;
        (-cfg.noise_over_power * s).exp() * (-xi.0 * cfg.lambda * s.powf(delta)).exp()
    };
    let w1 = (1.0 + rho) / (2.0 * rho);
    let w2 = (1.0 - rho) / (2.0 * rho);
    match weights {
        Nt2Weights::Corrected => check_probability(w1 * term(1.0 + rho) - w2 * term(1.0 - rho)),
        Nt2Weights::AsTypeset => Ok(w1 * term(1.0 + rho) + w2 * term(1.0 - rho)),
    }
}

/// Exact success probability for two antennas with correlation `rho`, with
/// `xi` built from the exact fractional moment. `rho = 0` goes through the
/// uncorrelated (Erlang) form, which is exact there.
pub fn psuc_exact_nt2(cfg: &NetworkConfig, rho: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(invalid("rho", rho, "correlation coefficient must lie in [0, 1)"));
    }
    let xi = xi(fading::exact_frac_moment(rho, cfg.alpha)?, cfg.alpha)?;
    if rho == 0.0 {
        let law = SignalPowerLaw::Erlang { shape: 2, scale: 1.0 };
        return psuc_with_xi(cfg, &law, xi);
    }
    psuc_nt2_with_weights(cfg, rho, xi, Nt2Weights::Corrected)
}

/// Approximate success probability for any `n_T`, with `xi` built from the
/// exponential approximation of `g`. Exact when the spectrum is scalar.
pub fn psuc_approx(cfg: &NetworkConfig, spectrum: &EigenSpectrum) -> Result<f64> {
    let dist = FadingDistribution::new(spectrum.clone());
    let xi = xi(fading::approx_frac_moment(&dist, cfg.alpha)?, cfg.alpha)?;
    let law = SignalPowerLaw::from_spectrum(spectrum)?;
    psuc_with_xi(cfg, &law, xi)
}

/// `ASE = λ log2(1 + γ) P_suc`.
pub fn ase(cfg: &NetworkConfig, psuc: f64) -> Result<f64> {
    cfg.validate()?;
    let psuc = check_probability(psuc)?;
    Ok(cfg.lambda * (1.0 + cfg.gamma_th).log2() * psuc)
}

/// Which fractional moment feeds `xi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MomentSource {
    /// Closed form for two antennas (requires `n_T = 2`).
    Exact,
    /// Exponential approximation of `g`.
    Approximate,
}

/// Transmit array with exponential correlation `[R]_{i,j} = rho^{|i-j|}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialArray {
    n_t: usize,
    rho: f64,
    matrix: CovarianceMatrix,
    spectrum: EigenSpectrum,
}

impl ExponentialArray {
    pub fn new(n_t: usize, rho: f64) -> Result<Self> {
        let matrix = CovarianceMatrix::exponential(n_t, rho)?;
        let spectrum = eigen_spectrum(&matrix, DEFAULT_DEGENERACY_TOL)?;
        Ok(Self {
            n_t,
            rho,
            matrix,
            spectrum,
        })
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn matrix(&self) -> &CovarianceMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &EigenSpectrum {
        &self.spectrum
    }

    /// Exact moments for `n_T = 2`, approximate otherwise.
    pub fn default_source(&self) -> MomentSource {
        if self.n_t == 2 {
            MomentSource::Exact
        } else {
            MomentSource::Approximate
        }
    }

    pub fn frac_moment(&self, alpha: f64, source: MomentSource) -> Result<f64> {
        match source {
            MomentSource::Exact if self.n_t == 2 => fading::exact_frac_moment(self.rho, alpha),
            MomentSource::Exact => Err(invalid("n_T", self.n_t as f64, "exact moment is only available for two antennas")),
            MomentSource::Approximate => {
                fading::approx_frac_moment(&FadingDistribution::new(self.spectrum.clone()), alpha)
            }
        }
    }

    pub fn xi(&self, alpha: f64, source: MomentSource) -> Result<XiParameter> {
        xi(self.frac_moment(alpha, source)?, alpha)
    }

    pub fn signal_law(&self) -> Result<SignalPowerLaw> {
        SignalPowerLaw::from_spectrum_perturbed(&self.spectrum)
    }

    pub fn psuc(&self, cfg: &NetworkConfig, source: MomentSource) -> Result<f64> {
        psuc_with_xi(cfg, &self.signal_law()?, self.xi(cfg.alpha, source)?)
    }
}

/// Memo of `xi` keyed by array shape, correlation, pathloss exponent and
/// moment source. Safe to share across threads.
#[derive(Debug, Default)]
pub struct XiCache {
    table: Mutex<HashMap<(usize, u64, u64, MomentSource), XiParameter>>,
}

impl XiCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, array: &ExponentialArray, alpha: f64, source: MomentSource) -> Result<XiParameter> {
        let key = (array.n_t, array.rho.to_bits(), alpha.to_bits(), source);
        if let Some(v) = self.table.lock().expect("xi cache poisoned").get(&key) {
            return Ok(*v);
        }
        let v = array.xi(alpha, source)?;
        self.table.lock().expect("xi cache poisoned").insert(key, v);
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.table.lock().expect("xi cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Locates the threshold where `psuc(cfg, rho_low) = psuc(cfg, rho_high)`.
///
/// Bisection on `log γ` over the linear bracket `[lo, hi]` until the bracket
/// spans less than 1e-4 dB and the two curves agree to 1e-6.
pub fn critical_threshold<F>(template: &NetworkConfig, rho_low: f64, rho_high: f64, lo: f64, hi: f64, psuc: F) -> Result<f64>
where
    F: Fn(&NetworkConfig, f64) -> Result<f64>,
{
    if !(lo > 0.0 && hi > lo) {
        return Err(invalid("bracket", lo, "bracket must satisfy 0 < lo < hi"));
    }
    let diff = |g: f64| -> Result<f64> {
        let cfg = template.with_gamma_th(g);
        Ok(psuc(&cfg, rho_low)? - psuc(&cfg, rho_high)?)
    };
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut fa = diff(lo)?;
    let fb = diff(hi)?;
    if fa == 0.0 && fb == 0.0 || fa.signum() == fb.signum() {
        return Err(Error::NoCrossing { lo, hi });
    }
    // 1e-4 dB in natural-log units.
    let width = 1e-5 * std::f64::consts::LN_10;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = diff(m.exp())?;
        if (b - a) < width && fm.abs() < 1e-6 {
            return Ok(m.exp());
        }
        if fm == 0.0 {
            return Ok(m.exp());
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Err(Error::NoConvergence {
        what: "critical threshold bisection",
    })
}
