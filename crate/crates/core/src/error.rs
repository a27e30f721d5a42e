use thiserror::Error;

/// Unified error type for the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two collections that must agree in length did not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// A layer table violated its invariants.
    #[error("invalid layer table{}: layer {layer}: {reason}", fmt_device(.device))]
    InvalidTable {
        device: Option<usize>,
        layer: usize,
        reason: String,
    },

    /// A scenario violated its invariants.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// A configuration value violated its invariants.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A brute-force reference solver would exceed its work guard.
    #[error("{what} would require {actual} evaluations (guard: {limit})")]
    GuardExceeded {
        what: String,
        limit: u64,
        actual: u64,
    },

    /// Reading or parsing an input file failed.
    #[error("{path}: {reason}")]
    File { path: String, reason: String },
}

fn fmt_device(device: &Option<usize>) -> String {
    match device {
        Some(i) => format!(" (device {i})"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
