use thiserror::Error;

/// Errors produced anywhere in the solver stack.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A parameter failed validation. `field` names the offending input.
    #[error("invalid parameter `{field}`: {reason}")]
    Validation { field: &'static str, reason: String },

    /// A special function was evaluated outside its domain.
    #[error("domain error in {function}: {reason}")]
    Domain { function: &'static str, reason: String },

    /// The result is not representable as a finite `f64`.
    #[error("overflow in {function} (log-magnitude {log_magnitude:.3})")]
    Overflow { function: &'static str, log_magnitude: f64 },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failed: estimate {value:e} with error {error_estimate:e} after {evaluations} evaluations")]
    Quadrature {
        value: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    /// An integrand or residual returned a non-finite value.
    #[error("non-finite value in {context} at {at:e}")]
    NonFinite { context: &'static str, at: f64 },

    /// `f(lo)` and `f(hi)` do not have opposite signs.
    #[error("invalid bracket [{lo:e}, {hi:e}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    InvalidBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// A bracketing scan found no sign change. `samples` holds the scanned `(point, value)` pairs.
    #[error("no sign change found in {context} over {} samples", samples.len())]
    NoBracket {
        context: &'static str,
        samples: Vec<(f64, f64)>,
    },

    /// An iterative method ran out of iterations. `trace` holds its iterates.
    #[error("{context} did not converge after {} iterations", trace.len())]
    Convergence {
        context: &'static str,
        trace: Vec<(f64, f64)>,
    },

    /// The ODE stepper's step size collapsed.
    #[error("ODE step size underflow at x = {x:e} (h = {h:e})")]
    StepUnderflow { x: f64, h: f64 },

    /// The Tricomi function underflowed at the boundary candidate.
    #[error("singular boundary system at z = {z:e}: U(z) = {u:e}")]
    Singular { z: f64, u: f64 },

    /// Shooting classification was not monotone in the candidate boundary.
    #[error("shooting classification is not monotone near r = {at:e}")]
    NonMonotone { at: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(function: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            function,
            reason: reason.into(),
        }
    }
}
