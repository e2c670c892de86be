use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CbfError {
    /// Lattice or word size above the configured cap.
    #[error("size limit exceeded: n = {n}, limit = {limit}")]
    SizeLimit { n: usize, limit: usize },
    /// Malformed input.
    #[error("validation error: {0}")]
    Validation(String),
    /// Möbius value requested for incomparable partitions.
    #[error("partitions are not comparable")]
    NotComparable,
    /// An operator or B-insertion does not match the face it sits on.
    #[error("face mismatch: {0}")]
    Face(String),
    /// A tensor word would exceed the truncation length.
    #[error("truncation overflow: a word longer than {max_len} carries a nonzero coefficient")]
    Truncation { max_len: usize },
    /// Matrix sizes disagree with the context.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    /// A block mixes positions that belong to different families.
    #[error("block mixes families {0} and {1}")]
    MixedFamilies(usize, usize),
    /// An operation's precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// Result alias for the crate.
pub type Result<T> = core::result::Result<T, CbfError>;
