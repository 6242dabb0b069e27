use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised while constructing, evaluating or verifying netlists.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("value {value} out of range for width n={n} (expected 0..=2^n)")]
    OutOfRange { value: u64, n: u32 },

    #[error("non-canonical diminished-1 value: zero flag set with magnitude {magnitude}")]
    NonCanonicalD1 { magnitude: u64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("input width mismatch: expected {expected} bits, got {got}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("composition input {index} is not wired to a front output")]
    DanglingInput { index: usize },

    #[error("weight class mismatch on composed input {index}: back expects {expected}, front drives {got}")]
    ClassMismatch { index: usize, expected: u32, got: u32 },

    #[error("reduction target {0} per class is unreachable by a carry-save tree")]
    ImpossibleTarget(usize),

    #[error("carry leaves the top weight class but no end-around carry policy is set")]
    CarryOverflow,

    #[error("exhaustive sweep over 2^{p} inputs exceeds the budget of {budget} evaluations")]
    BudgetExceeded { p: usize, budget: u64 },

    #[error("invalid netlist: {0}")]
    InvalidNetlist(String),

    #[error("netlist serialization: {0}")]
    Serialization(String),

    #[error("missing golden file {}", .0.display())]
    MissingGolden(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
