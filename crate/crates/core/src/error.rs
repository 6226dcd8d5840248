use thiserror::Error;

/// Errors raised while building, evaluating or (de)serializing circuits.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("infeasible eps: {0}")]
    Eps(String),

    #[error("expected {expected} input bundles, got {got}")]
    InputCount { expected: usize, got: usize },

    #[error("width mismatch on input bundle {index}: expected {expected} bits, got {got}")]
    WidthMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },

    #[error("lowering required: bristol export needs a circuit of AND/XOR/INV gates only")]
    LoweringRequired,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("malformed circuit: {0}")]
    Malformed(String),

    #[error("counting-only builder has no gates to seal")]
    CountingOnly,

    #[error("no expander accepted for m={m}, d={d} within {tries} seeds starting at {base_seed}")]
    NoExpander {
        m: usize,
        d: usize,
        base_seed: u64,
        tries: u32,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
