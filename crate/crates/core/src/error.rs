use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("gram matrix must be square and symmetric")]
    NotSymmetric,
    #[error("gram matrix must be nondegenerate")]
    Singular,
    #[error("lattice rank must be positive")]
    EmptyLattice,
    #[error("vectors belong to different ambient lattices")]
    LatticeMismatch,
    #[error("operation requires rank 4, got rank {0}")]
    RankNotFour(usize),
    #[error("lattice is not hyperbolic of signature (n,1)")]
    NotHyperbolic,
    #[error("normal vectors span a degenerate or non-elliptic frame")]
    DegenerateFrame,
    #[error("genus comparison does not apply: {0}")]
    ConditionsNotMet(String),
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("coordinate data exceeds the supported integer range")]
    Overflow,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
