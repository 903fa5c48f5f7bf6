use thiserror::Error;

/// Errors produced by curve evaluation and the numerical drivers built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Bad argument: parameter outside the domain, invalid sequence spec, etc.
    #[error("input error: {0}")]
    Input(String),

    /// An evaluator produced a non-finite value or was asked for a point
    /// where the expression is undefined.
    #[error("domain evaluation error: {0}")]
    DomainEval(String),

    /// The central-difference stencil does not fit inside the open domain.
    #[error("derivative stencil does not fit at t = {t} (step {h})")]
    Stencil { t: f64, h: f64 },

    /// The operation needs a derivative the curve cannot supply.
    #[error("capability error: {0}")]
    Capability(String),

    /// The scanning grid did not resolve the requested structure.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Adaptive quadrature did not reach the tolerance; carries the best estimate.
    #[error("quadrature did not converge (best estimate {estimate}, error estimate {error})")]
    Accuracy { estimate: f64, error: f64 },
}

impl Error {
    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_input(&self) -> bool {
        matches!(self, Error::Input(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
