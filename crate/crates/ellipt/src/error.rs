//! Error type shared by all evaluation routines.

use thiserror::Error;

/// Errors reported by ball-arithmetic evaluation.
///
/// Every public function returns an explicit error instead of silently
/// widening an enclosure past the point of usefulness: a ball that straddles
/// a branch cut, contains a pole, or violates an algorithm's validity domain
/// is rejected outright.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input lies outside the mathematical domain of the function
    /// (e.g. lattice parameter with non-positive imaginary part).
    #[error("domain error: {0}")]
    Domain(&'static str),

    /// A ball straddles a branch cut or contains a branch point, so no
    /// single-branch enclosure exists.
    #[error("indeterminate branch: {0}")]
    IndeterminateBranch(&'static str),

    /// Division by a ball containing zero.
    #[error("division by a ball containing zero")]
    DivisionByZero,

    /// The argument ball contains a pole of the function.
    #[error("pole: {0}")]
    Pole(&'static str),

    /// Arguments violate the validity condition of the algorithm
    /// (returned rather than computing a silently wrong value).
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(&'static str),

    /// A series or iteration failed to converge within its budget,
    /// generally a sign that the arguments should be reduced first.
    #[error("convergence failure: {0}")]
    ConvergenceFailure(&'static str),

    /// A coefficient recurrence was evaluated at one of its singular points.
    #[error("singular recurrence: {0}")]
    SingularRecurrence(&'static str),

    /// Malformed argument (invalid precision, odd Eisenstein weight, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    /// A non-rigorous oracle could not produce a trustworthy estimate.
    #[error("oracle failure: {0}")]
    OracleFailure(&'static str),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
