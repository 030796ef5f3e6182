use thiserror::Error;

/// Errors shared by every module in this crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("tuple entries must be pairwise distinct")]
    DuplicateEntries,

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("instance has no constraints; values are undefined")]
    EmptyInstance,

    #[error("constraint stream is empty")]
    EmptyStream,

    #[error("alphabet size {q} is invalid")]
    InvalidAlphabet { q: usize },

    #[error("interval width floor(gamma*n) is zero")]
    BlockTooSmall,

    #[error("computed label {label} does not fit alphabet [{q}]")]
    AlphabetTooSmall { label: usize, q: usize },

    #[error("search space of size {size} exceeds the guard {limit}")]
    TooLarge { size: u128, limit: u128 },

    #[error("exact certification space of size {size} exceeds the guard {limit}")]
    ExactModeTooLarge { size: u128, limit: u128 },

    #[error("{edges} edges of arity {k} do not fit on {n} vertices disjointly")]
    TooManyEdges { edges: usize, k: usize, n: usize },

    #[error("value {value} out of range (bound {bound})")]
    OutOfRange { value: u64, bound: u64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid predicate: {0}")]
    InvalidPredicate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("streaming state of {bits} bits exceeds declared bound of {bound} bits")]
    StateBoundExceeded { bits: usize, bound: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
