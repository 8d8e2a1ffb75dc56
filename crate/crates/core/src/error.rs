//! Shared error type. Anything that enumerates, indexes, or divides can fail
//! loudly; nothing in the crate truncates or clamps silently.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("ground-size mismatch: expected {expected}, got {got}")]
    GroundMismatch { expected: usize, got: usize },

    #[error("item index {index} out of range for ground size {ground}")]
    IndexOutOfRange { index: usize, ground: usize },

    #[error("length mismatch: expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("enumeration over {needed} items exceeds the cap of {cap}")]
    EnumCapExceeded { needed: usize, cap: usize },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("gap between consecutive valuations {index} and {next} is zero (degenerate instance)", next = .index + 1)]
    DegenerateGap { index: usize },

    #[error("instance was built by the {got} construction, expected {expected}")]
    WrongConstruction { expected: String, got: String },

    #[error("valuation has no matroid-based structure for the fast path")]
    NotMatroidBased,

    #[error("oracle budget exhausted")]
    BudgetExhausted,

    #[error("LP solver fault on a problem that must be feasible and bounded: {0}")]
    InternalLpFault(String),

    #[error("i/o failure: {0}")]
    Io(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
