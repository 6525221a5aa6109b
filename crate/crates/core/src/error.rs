use alloc::string::String;

/// Errors raised by the core numerics.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("{op}: precondition violated: {reason}")]
    Precondition { op: &'static str, reason: String },

    #[error("{op} unsupported: {reason}")]
    Unsupported { op: &'static str, reason: String },

    #[error("eigenvalue iteration did not converge for index {index}")]
    NoConvergence { index: usize },

    #[error("root not bracketed: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NotBracketed { f_lo: f64, f_hi: f64 },

    #[error("matrix dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("{op}: quadrature did not converge (last refinements differ by {diff:e})")]
    QuadratureNotConverged { op: &'static str, diff: f64 },

    #[error("{op}: {what} diverges")]
    Divergent {
        op: &'static str,
        what: &'static str,
    },

    #[error("unknown potential `{0}`")]
    UnknownPotential(String),

    #[error("memory guard: {0}")]
    TooLarge(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn precondition(op: &'static str, reason: impl Into<String>) -> Error {
    Error::Precondition {
        op,
        reason: reason.into(),
    }
}

pub(crate) fn unsupported(op: &'static str, reason: impl Into<String>) -> Error {
    Error::Unsupported {
        op,
        reason: reason.into(),
    }
}
