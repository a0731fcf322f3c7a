//! Closed-form success probability and area spectral efficiency for maximal
//! ratio transmission (MRT) in a downlink Poisson network whose base stations
//! see spatially correlated Rayleigh fading at the transmit antennas.
//!
//! The crate is split along the path from channel model to network metric:
//!
//! - [`corr`]: transmit covariance matrices, their spectra and square roots.
//! - [`specfun`]: Gamma, exponential integral and Gauss hypergeometric functions.
//! - [`quad`]: adaptive Gauss–Kronrod quadrature used by the oracle routes.
//! - [`fading`]: single-link distributions (signal power CDF, normalized
//!   cross-link power `g`, generalized Rayleigh quotient, fractional moments).
//! - [`network`]: interference Laplace transform, success probability, ASE.
//! - [`mcsim`]: seeded Monte Carlo simulator of the full stochastic model.

pub mod corr;
pub mod error;
pub mod fading;
pub mod mcsim;
pub mod network;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
