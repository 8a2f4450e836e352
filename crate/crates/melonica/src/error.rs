use thiserror::Error;

/// Errors shared across the crate. Variant names follow the operation
/// contracts; the CLI maps them onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("color {color}: image list is not a permutation of 1..={p} (offending value {value})")]
    NotAPermutation { color: usize, p: usize, value: usize },

    #[error("inconsistent sizes: {detail}")]
    InconsistentSize { detail: String },

    #[error("need at least 2 colors, got {got}")]
    TooFewColors { got: usize },

    #[error("bad color {color} for a graph with {num_colors} colors")]
    BadColor { color: usize, num_colors: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("face-count formula mismatch: counted {counted}, formula gives {formula}")]
    FormulaMismatch { counted: usize, formula: String },

    #[error("not a ribbon graph: expected 3 colors, got {got}")]
    NotRibbon { got: usize },

    #[error("color count mismatch: expected {expected} colors, got {got}")]
    ColorCountMismatch { expected: usize, got: usize },

    #[error("unsupported rank D={d}: {why}")]
    UnsupportedRank { d: usize, why: String },

    #[error("graph is not melonic")]
    NotMelonic,

    #[error("size guard exceeded: {what} = {got} > {limit} (override with MELONICA_GUARD_MAX_P)")]
    SizeLimitExceeded { what: String, got: usize, limit: usize },

    #[error("wrong rank: expected a {expected}-colored graph, got {got} colors")]
    WrongRank { expected: usize, got: usize },

    #[error("rank mismatch: bubble has {bubble} colors, tensor has rank {tensor}")]
    RankMismatch { bubble: usize, tensor: usize },

    #[error("verification failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
