use thiserror::Error;

/// Errors raised by the kernel. Every variant carries enough context to
/// locate the offending object.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: (n={left_n}, cap={left_cap}) vs (n={right_n}, cap={right_cap})")]
    ShapeMismatch {
        left_n: usize,
        left_cap: u32,
        right_n: usize,
        right_cap: u32,
    },
    #[error("index out of range: {} (n = {n})", .index + 1)]
    IndexOutOfRange { index: usize, n: usize },
    #[error("map component {component} has a nonzero constant term")]
    NonzeroConstantTerm { component: usize },
    #[error("linear part is singular")]
    SingularLinearPart,
    #[error("series is not a unit (zero constant term)")]
    NotUnit,
    #[error("degree out of range for {what}: {degree} (n = {n})")]
    DegreeOutOfRange {
        what: &'static str,
        degree: usize,
        n: usize,
    },
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("closedness fails at ({}, {}) (1-based)", .i + 1, .j + 1)]
    NotClosed { i: usize, j: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not integrable: {0}")]
    NotIntegrable(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("elimination failed: {0}")]
    Elimination(String),
    #[error("unsupported case: {0}")]
    Unsupported(String),
    #[error("{line}:{col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
