use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("parameter out of range: {0}")]
    ParamRange(String),

    #[error("invalid node set: {0}")]
    Nodes(String),

    #[error("matrix is singular to working precision")]
    SingularMatrix,

    #[error("pencil appears singular: {0}")]
    SingularPencil(String),

    #[error("eigenvalue iteration failed to converge after {0} sweeps")]
    NonConvergence(usize),

    #[error("rank decision failed: {0}")]
    Rank(String),

    #[error("recovered block is numerically zero (input vector is not an eigenvector of the pencil)")]
    ZeroRecoveredBlock,

    #[error("recovered vectors are linearly dependent (input basis is not minimal)")]
    DependentRecovery,

    #[error("polynomial deflation left a non-negligible remainder: {0:e}")]
    DeflationRemainder(f64),

    #[error("input is likely singular: {0}")]
    LikelySingular(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}
