use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("matrix is not a valid correlation matrix: {0}")]
    InvalidMatrix(String),

    #[error("eigenvalues are not distinct (min relative gap {gap:e}); perturb or use the identity route")]
    DegenerateSpectrum { gap: f64 },

    #[error("hypoexponential weights are ill-conditioned (sum of |weights| = {weight_norm:e})")]
    IllConditioned { weight_norm: f64 },

    #[error("{what} did not converge")]
    NoConvergence { what: &'static str },

    #[error("probability {value} lies outside [0, 1] beyond tolerance")]
    ProbabilityOutOfRange { value: f64 },

    #[error("no crossing in range [{lo}, {hi}] (linear threshold)")]
    NoCrossing { lo: f64, hi: f64 },

    #[error("empty sample")]
    EmptySample,
}

pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}
