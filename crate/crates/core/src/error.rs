use thiserror::Error;

/// Errors raised by the domain operations.
///
/// Each variant names the invariant that was violated so the CLI can report
/// it verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },
    #[error("tuple arity {arity} does not match rank {rank}")]
    ArityMismatch { arity: usize, rank: usize },
    #[error("words in a tuple must share one rank (found {expected} and {found})")]
    MixedRank { expected: usize, found: usize },
    #[error("invalid Nielsen move: {0}")]
    InvalidMove(String),
    #[error("cannot parse word {input:?}: {reason}")]
    WordSyntax { input: String, reason: String },
    #[error("cyclic order must be at least 2, got {0}")]
    CyclicOrderTooSmall(u64),
    #[error("invalid group table: {0}")]
    InvalidTable(String),
    #[error("rank must be at least 1 for this emitter (use the finite emitter for rank 0)")]
    ZeroRank,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("cannot parse rational {0:?}")]
    RationalSyntax(String),
    #[error("invalid characteristic: {0}")]
    InvalidCharacteristic(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("construction trace must be nonempty")]
    EmptyTrace,
    #[error("k must be at least 2, got {0}")]
    AbelianRankTooSmall(usize),
    #[error("formula not in normal form: {0}")]
    NotNormalForm(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
