//! Error type shared across the library.

use thiserror::Error;

/// Library-wide error enumeration.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter violated a documented constraint.
    #[error("invalid parameter `{name}`: {message} (value {value})")]
    InvalidParameter {
        /// Offending parameter name.
        name: &'static str,
        /// Constraint description.
        message: &'static str,
        /// Offending value.
        value: f64,
    },

    /// Parameters are individually valid but jointly unphysical.
    #[error("unphysical parameters: {0}")]
    Unphysical(String),

    /// Time-domain integration produced a non-finite state.
    #[error("integration diverged at step {step} (t = {time:.6e} s)")]
    IntegrationDiverged {
        /// Step index at which a non-finite value appeared.
        step: usize,
        /// Simulation time of the bad step (s).
        time: f64,
    },

    /// Ringdown fit failed to converge to the requested residual.
    #[error("ringdown fit did not converge: relative residual {residual:.3e} > {limit:.1e}")]
    FitFailed {
        /// Achieved relative residual.
        residual: f64,
        /// Residual limit that was violated.
        limit: f64,
    },

    /// Variance formula evaluated with zero cooperativity.
    #[error("divergent variance: cooperativity is zero")]
    DivergentVariance,
}

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for an [`Error::InvalidParameter`].
    pub fn invalid(name: &'static str, message: &'static str, value: f64) -> Self {
        Error::InvalidParameter {
            name,
            message,
            value,
        }
    }
}
