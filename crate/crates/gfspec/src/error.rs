//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by validation, construction and checker entry points.
#[derive(Debug, Error)]
pub enum Error {
    /// A filtered complex or field failed structural validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// Arguments are inconsistent with each other (mismatched grids,
    /// out-of-range indices, bad parameter combinations).
    #[error("argument error: {0}")]
    Argument(String),

    /// A cover construction cannot be realized with the given parameters.
    #[error("infeasible cover: {0}")]
    InfeasibleCover(String),

    /// A quantity that the theory guarantees (for a well-formed input) is
    /// missing, e.g. the unique infinite bar in an extreme degree.
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),

    /// A serialized persistence-module system is malformed.
    #[error("malformed system: {0}")]
    MalformedSystem(String),
}

pub type Result<T> = std::result::Result<T, Error>;
