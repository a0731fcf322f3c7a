//! Single-link fading laws.
//!
//! Two random quantities drive the success probability:
//!
//! - the desired-signal power `‖R^{1/2} h‖²`, a hypoexponential variable with
//!   rates `1/mu_l` (Erlang when all eigenvalues coincide);
//! - the normalized cross-link power `g = |h̃_0^H h̃_i|² / ‖h̃_i‖²`, which is
//!   exponential conditioned on the generalized Rayleigh quotient
//!   `r = h^H R² h / h^H R h`.
//!
//! For two antennas `r` has density `(1-ρ²)/(2ρ) (2-y)^{-2}` on `(1-ρ, 1+ρ)`
//! and the law of `g` is available in closed form through `Ei`. For any
//! order, `g` is approximated by an exponential with scale
//! `sigma_g = trace(R²) / trace(R)`.
//!
//! Two readings of `sigma_g` are possible from its typeset form; the sum of
//! per-eigenvalue ratios collapses to `n_T` and is wrong (it would give
//! `n_T` instead of 1 for uncorrelated antennas). The ratio of sums is used.

use crate::corr::EigenSpectrum;
use crate::error::{invalid, Error, Result};
use crate::quad::{self, Tolerance};
use crate::specfun::{exp_integral_ei, gamma_fn, gauss_2f1};

/// Smallest `x` at which `F(eta, x)` is evaluated; the `Ei` singularity at
/// the origin cancels between the two `F` terms of the exact density.
pub const F_ORIGIN_FLOOR: f64 = 1e-12;

/// Above this `sum |c_l|` the hypoexponential expansion loses more than
/// about six digits to cancellation.
pub const MAX_WEIGHT_NORM: f64 = 1e10;

#[derive(Debug, Clone, PartialEq)]
pub struct FadingDistribution {
    spectrum: EigenSpectrum,
    rho: Option<f64>,
    sigma_g: f64,
}

impl FadingDistribution {
    pub fn new(spectrum: EigenSpectrum) -> Self {
        let sigma_g = sigma_g(&spectrum);
        Self {
            spectrum,
            rho: None,
            sigma_g,
        }
    }

    /// Two-antenna distribution with `[R]_{1,2} = rho`.
    pub fn two_antenna(rho: f64, degeneracy_tol: f64) -> Result<Self> {
        check_rho(rho, true)?;
        let spectrum = EigenSpectrum::from_eigenvalues(vec![1.0 + rho, 1.0 - rho], degeneracy_tol)?;
        let mut d = Self::new(spectrum);
        d.rho = Some(rho);
        Ok(d)
    }

    pub fn spectrum(&self) -> &EigenSpectrum {
        &self.spectrum
    }

    pub fn rho(&self) -> Option<f64> {
        self.rho
    }

    pub fn sigma_g(&self) -> f64 {
        self.sigma_g
    }
}

fn check_rho(rho: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero {
        (0.0..1.0).contains(&rho)
    } else {
        rho > 0.0 && rho < 1.0
    };
    if ok {
        Ok(())
    } else {
        Err(invalid("rho", rho, "correlation coefficient must lie in [0, 1)"))
    }
}

/// `sigma_g = (Σ mu_n²) / (Σ mu_n)`.
pub fn sigma_g(spectrum: &EigenSpectrum) -> f64 {
    spectrum.trace_sq() / spectrum.trace()
}

/// How the signal-power law is evaluated for a given spectrum.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalPowerLaw {
    /// All eigenvalues equal `scale`: Erlang with `shape` stages.
    Erlang { shape: usize, scale: f64 },
    /// Distinct eigenvalues `scales` with partial-fraction `weights`.
    Hypoexponential { scales: Vec<f64>, weights: Vec<f64> },
}

impl SignalPowerLaw {
    /// Picks the Erlang form for a scalar spectrum, rejects any other
    /// degenerate spectrum, and otherwise builds the hypoexponential weights.
    pub fn from_spectrum(spectrum: &EigenSpectrum) -> Result<Self> {
        if spectrum.is_scalar() {
            return Ok(Self::Erlang {
                shape: spectrum.order(),
                scale: spectrum.trace() / spectrum.order() as f64,
            });
        }
        if spectrum.is_degenerate() {
            return Err(Error::DegenerateSpectrum {
                gap: spectrum.min_relative_gap(),
            });
        }
        let scales = spectrum.eigenvalues().to_vec();
        let weights = hypoexponential_weights(&scales)?;
        Ok(Self::Hypoexponential { scales, weights })
    }

    /// Like [`SignalPowerLaw::from_spectrum`] but splits mixed clusters of
    /// equal eigenvalues first.
    pub fn from_spectrum_perturbed(spectrum: &EigenSpectrum) -> Result<Self> {
        if spectrum.is_scalar() || !spectrum.is_degenerate() {
            Self::from_spectrum(spectrum)
        } else {
            Self::from_spectrum(&spectrum.perturbed())
        }
    }

    /// `P[‖h̃‖² <= x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Erlang { shape, scale } => 1.0 - erlang_ccdf(*shape, x / scale),
            Self::Hypoexponential { scales, weights } => {
                let v = neumaier_sum(
                    scales
                        .iter()
                        .zip(weights)
                        .map(|(mu, c)| -c * (-x / mu).exp_m1()),
                );
                v.clamp(0.0, 1.0)
            }
        }
    }
}

fn erlang_ccdf(shape: usize, t: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..shape {
        term *= t / k as f64;
        sum += term;
    }
    (-t).exp() * sum
}

/// Partial-fraction weights `c_l = Π_{i≠l} mu_l / (mu_l - mu_i)`.
pub fn hypoexponential_weights(scales: &[f64]) -> Result<Vec<f64>> {
    let weights: Vec<f64> = scales
        .iter()
        .enumerate()
        .map(|(l, &ml)| {
            scales
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != l)
                .map(|(_, &mi)| ml / (ml - mi))
                .product()
        })
        .collect();
    let norm: f64 = weights.iter().map(|c| c.abs()).sum();
    if !norm.is_finite() || norm > MAX_WEIGHT_NORM {
        return Err(Error::IllConditioned { weight_norm: norm });
    }
    Ok(weights)
}

pub(crate) fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// CDF of the desired-signal power `‖R^{1/2} h‖²`.
///
/// Mixed degenerate spectra are rejected; call
/// [`EigenSpectrum::perturbed`] first.
pub fn norm_sq_cdf(spectrum: &EigenSpectrum, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(invalid("x", x, "CDF argument must be nonnegative"));
    }
    Ok(SignalPowerLaw::from_spectrum(spectrum)?.cdf(x))
}

/// `F(eta, x) = eta/(4(2-eta)) e^{-x/eta} - (2-x)/8 e^{-x/2} Ei[x(1/2 - 1/eta)]`.
pub fn func_f(eta: f64, x: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < 2.0) {
        return Err(invalid("eta", eta, "F requires 0 < eta < 2"));
    }
    if !(x >= 0.0) {
        return Err(invalid("x", x, "F requires x >= 0"));
    }
    let x = x.max(F_ORIGIN_FLOOR);
    let first = eta / (4.0 * (2.0 - eta)) * (-x / eta).exp();
    let ei = exp_integral_ei(x * (0.5 - 1.0 / eta))?;
    Ok(first - (2.0 - x) / 8.0 * (-x / 2.0).exp() * ei)
}

/// Exact density of `g` for two antennas with correlation `rho`.
///
/// `rho = 0` is the uncorrelated case where `g ~ Exp(1)` exactly.
pub fn exact_pdf_g(rho: f64, x: f64) -> Result<f64> {
    check_rho(rho, true)?;
    if !(x >= 0.0) {
        return Err(invalid("x", x, "density argument must be nonnegative"));
    }
    if rho == 0.0 {
        return Ok((-x).exp());
    }
    let pref = (1.0 - rho * rho) / (2.0 * rho);
    let v = pref * (func_f(1.0 + rho, x)? - func_f(1.0 - rho, x)?);
    Ok(v.max(0.0))
}

/// Exponential approximation of the density of `g`.
pub fn approx_pdf_g(dist: &FadingDistribution, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(invalid("x", x, "density argument must be nonnegative"));
    }
    Ok((-x / dist.sigma_g).exp() / dist.sigma_g)
}

/// Density of the generalized Rayleigh quotient for two antennas.
pub fn rayleigh_quotient_pdf(rho: f64, y: f64) -> Result<f64> {
    check_rho(rho, false)?;
    if y > 1.0 - rho && y < 1.0 + rho {
        Ok((1.0 - rho * rho) / (2.0 * rho) / ((2.0 - y) * (2.0 - y)))
    } else {
        Ok(0.0)
    }
}

/// CDF of the generalized Rayleigh quotient for two antennas.
pub fn rayleigh_quotient_cdf(rho: f64, y: f64) -> Result<f64> {
    check_rho(rho, false)?;
    if y <= 1.0 - rho {
        Ok(0.0)
    } else if y >= 1.0 + rho {
        Ok(1.0)
    } else {
        let v = (1.0 - rho * rho) / (2.0 * rho) * (1.0 / (2.0 - y) - 1.0 / (1.0 + rho));
        Ok(v.clamp(0.0, 1.0))
    }
}

/// Density of `g` from the mixture `∫ (1/y) e^{-x/y} f_r(y) dy`, evaluated by
/// adaptive quadrature. Independent of the `Ei` closed form.
pub fn pdf_g_quadrature(rho: f64, x: f64) -> Result<f64> {
    check_rho(rho, false)?;
    if !(x >= 0.0) {
        return Err(invalid("x", x, "density argument must be nonnegative"));
    }
    let pref = (1.0 - rho * rho) / (2.0 * rho);
    let est = quad::integrate(
        |y| (-x / y).exp() / (y * (2.0 - y) * (2.0 - y)),
        1.0 - rho,
        1.0 + rho,
        Tolerance {
            abs: 1e-13,
            rel: 1e-13,
            ..Tolerance::default()
        },
    )?;
    Ok(pref * est.value)
}

/// CDF of `g` for two antennas, `∫ f_r(y) (1 - e^{-x/y}) dy` by quadrature.
pub fn cdf_g_mixture(rho: f64, x: f64) -> Result<f64> {
    check_rho(rho, true)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    if rho == 0.0 {
        return Ok(-(-x).exp_m1());
    }
    let pref = (1.0 - rho * rho) / (2.0 * rho);
    let est = quad::integrate(
        |y| -(-x / y).exp_m1() / ((2.0 - y) * (2.0 - y)),
        1.0 - rho,
        1.0 + rho,
        Tolerance::default(),
    )?;
    Ok((pref * est.value).clamp(0.0, 1.0))
}

/// `G(eta, alpha)`: the closed-form building block of `E{g^{2/alpha}}`.
pub fn func_g_moment(eta: f64, alpha: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < 2.0) {
        return Err(invalid("eta", eta, "G requires 0 < eta < 2"));
    }
    if !(alpha > 2.0) {
        return Err(invalid("alpha", alpha, "pathloss exponent must exceed 2"));
    }
    let d = 2.0 / alpha;
    let z = eta / 2.0;
    let bracket = eta / (2.0 - eta) + alpha / (alpha + 2.0) * gauss_2f1(1.0, d + 1.0, d + 2.0, z)?;
    let second = alpha * eta / (4.0 * (alpha + 1.0)) * gamma_fn(d + 2.0)? * gauss_2f1(1.0, d + 2.0, d + 3.0, z)?;
    Ok(eta.powf(d + 1.0) / 4.0 * (gamma_fn(d + 1.0)? * bracket - second))
}

/// Exact `E{g^{2/alpha}}` for two antennas.
pub fn exact_frac_moment(rho: f64, alpha: f64) -> Result<f64> {
    check_rho(rho, true)?;
    if !(alpha > 2.0) {
        return Err(invalid("alpha", alpha, "pathloss exponent must exceed 2"));
    }
    if rho == 0.0 {
        return gamma_fn(2.0 / alpha + 1.0);
    }
    let pref = (1.0 - rho * rho) / (2.0 * rho);
    Ok(pref * (func_g_moment(1.0 + rho, alpha)? - func_g_moment(1.0 - rho, alpha)?))
}

/// `E{g^{2/alpha}} ≈ sigma_g^{2/alpha} Γ(2/alpha + 1)`; exact for `R = I`.
pub fn approx_frac_moment(dist: &FadingDistribution, alpha: f64) -> Result<f64> {
    if !(alpha > 2.0) {
        return Err(invalid("alpha", alpha, "pathloss exponent must exceed 2"));
    }
    Ok(dist.sigma_g.powf(2.0 / alpha) * gamma_fn(2.0 / alpha + 1.0)?)
}

/// A CDF tabulated from a density on `[0, upper]` by per-cell Gauss–Kronrod
/// quadrature, interpolated with cubic Hermite splines using the density as
/// the derivative. Beyond `upper` the CDF is taken as 1.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    step: f64,
    cdf: Vec<f64>,
    pdf: Vec<f64>,
}

impl TabulatedCdf {
    pub fn from_density<F>(density: F, upper: f64, cells: usize) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64>,
    {
        if !(upper > 0.0) || cells == 0 {
            return Err(invalid("upper", upper, "tabulation range must be positive"));
        }
        let step = upper / cells as f64;
        let mut pdf = Vec::with_capacity(cells + 1);
        for k in 0..=cells {
            pdf.push(density(k as f64 * step)?);
        }
        let mut cdf = Vec::with_capacity(cells + 1);
        cdf.push(0.0);
        let mut acc = 0.0;
        let mut comp = 0.0;
        for k in 0..cells {
            let lo = k as f64 * step;
            let failure = std::cell::RefCell::new(None);
            let est = quad::integrate(
                |x| match density(x) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        f64::NAN
                    }
                },
                lo,
                lo + step,
                Tolerance {
                    abs: 1e-14,
                    rel: 1e-12,
                    max_intervals: 200,
                },
            );
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            let v = est?.value;
            let t = acc + v;
            comp += (acc - t) + v;
            acc = t;
            cdf.push(acc + comp);
        }
        Ok(Self { step, cdf, pdf })
    }

    /// Total mass captured by the table.
    pub fn total(&self) -> f64 {
        *self.cdf.last().expect("non-empty")
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let pos = x / self.step;
        let k = pos.floor() as usize;
        if k + 1 >= self.cdf.len() {
            return 1.0;
        }
        let t = pos - k as f64;
        let h = self.step;
        let (y0, y1) = (self.cdf[k], self.cdf[k + 1]);
        let (m0, m1) = (self.pdf[k] * h, self.pdf[k + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1;
        v.clamp(0.0, 1.0)
    }
}
