use alloc::string::String;

/// Errors produced by the splitting core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),

    #[error("unsupported recursion depth k={k} for the {family} family (allowed 0..={max})")]
    UnsupportedOrder {
        family: &'static str,
        k: usize,
        max: usize,
    },

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("coordinate {coord} does not occur in the scheme")]
    CoordinateNotPresent { coord: usize },

    #[error("factor count requires an odd base count q >= 3 and N >= 2 (got N={n}, q={q})")]
    InvalidCount { n: usize, q: usize },

    #[error("factor count for N={n}, q={q} does not fit in 64 bits")]
    CountOverflow { n: usize, q: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("system `{0}` does not support complex time or complex states")]
    ComplexTimeUnsupported(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value after factor {factor} (coordinate {coord})")]
    Overflow { factor: usize, coord: usize },

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },

    #[error("non-finite state in reference solver at t={t}")]
    ReferenceOverflow { t: f64 },

    #[error("reference solver exceeded {max_steps} steps before t={t}")]
    NonConvergence { max_steps: usize, t: f64 },

    #[error("trajectory grids do not match: {0}")]
    GridMismatch(String),

    #[error("all errors are below the precision floor {floor:e}; enlarge the t values")]
    PrecisionFloor { floor: f64 },

    #[error("insufficient data for a fit: {usable} usable points, need at least {needed}")]
    InsufficientData { usable: usize, needed: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
