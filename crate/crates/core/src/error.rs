use thiserror::Error;

use crate::richardson::RefinementReport;

/// Errors produced by the pricing engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("asset price {asset} lies outside the truncated domain (max {max})")]
    OutOfDomain { asset: f64, max: f64 },

    #[error("front value {0} is not positive")]
    SingularFront(f64),

    #[error("step solver did not converge after {iterations} iterations (S_f = {last_sf}, |r| = {residual:e})")]
    NonConvergence {
        iterations: usize,
        last_sf: f64,
        residual: f64,
    },

    #[error("no sign change of the front residual in [{lo}, {hi}]")]
    Bracketing { lo: f64, hi: f64 },

    #[error("explicit scheme became unstable: {0}")]
    Instability(String),

    #[error("non-finite value produced during time marching")]
    Overflow,

    #[error("observed order is undefined: approximation coincides with the reference")]
    DegenerateOrder,

    #[error("tolerance {} not met after {} levels", .0.eps, .0.levels.len())]
    ToleranceNotMet(Box<RefinementReport>),

    #[error("time step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn at_step(step: usize, source: Error) -> Self {
        Error::AtStep {
            step,
            source: Box::new(source),
        }
    }

    /// The innermost error, skipping `AtStep` wrappers.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root_cause(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
