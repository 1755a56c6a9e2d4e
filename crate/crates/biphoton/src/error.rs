//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the mode-overlap, amplitude, and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Refining the quadrature did not reproduce the coarser result within
    /// the requested tolerance; the integrand is under-resolved.
    #[error(
        "quadrature not converged: node doubling changed the result by a relative {achieved:.3e} \
         (target {target:.3e}); raise radial_nodes or loosen target_rel_tol"
    )]
    QuadratureNotConverged { achieved: f64, target: f64 },

    /// The terminating hypergeometric series ran into a zero denominator
    /// before its last term.
    #[error("hypergeometric series pole: c = {c} reaches zero at term {term} before termination")]
    PoleInC { c: f64, term: usize },

    /// A value or combination of values fails a constructor's constraints.
    #[error("invalid {what}: {why}")]
    Invalid { what: &'static str, why: String },

    /// Config file could not be read, parsed, or validated. The message
    /// names the offending key.
    #[error("config error: {0}")]
    Config(String),

    /// Output files could not be written.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            why: why.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
