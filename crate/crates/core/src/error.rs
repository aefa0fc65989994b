use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Newton iteration for Gauss-Legendre node {index} of order {order} did not converge after {iterations} steps")]
    QuadratureNoConvergence {
        order: usize,
        index: usize,
        iterations: usize,
    },

    #[error("grid functions live on different quadrature rules")]
    GridMismatch,

    #[error("argument {x} outside the domain of J_{nu}")]
    BesselDomain { nu: f64, x: f64 },

    #[error("non-finite function value {value} at x = {x} during root scan")]
    NonFinite { x: f64, value: f64 },

    #[error("matrix is not Hermitian: max |A_ij - conj(A_ji)| = {defect:e}")]
    NotHermitian { defect: f64 },

    #[error("eigensolver failed to converge ({detail})")]
    EigenNoConvergence { detail: String },

    #[error("requested {requested} roots but only {found} were found below x = {x_max}")]
    MissingRoots {
        requested: usize,
        found: usize,
        x_max: f64,
    },

    #[error("function has zero norm on the quadrature grid")]
    ZeroNorm,

    #[error("grid of order {order} cannot resolve {modes} plane-wave modes (need at least {needed} nodes)")]
    UnderResolved {
        order: usize,
        modes: usize,
        needed: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
