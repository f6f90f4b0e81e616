use thiserror::Error;

/// Errors raised by the laboratory's operations.
///
/// Every variant carries a stable machine code (see [`Error::code`]) that
/// the CLI echoes into its JSON output.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty domain: {0}")]
    DomainEmpty(&'static str),
    #[error("window start {start} exceeds horizon {horizon}")]
    BadWindow { start: usize, horizon: usize },
    #[error("interval [{alpha}, {beta}] is reversed")]
    BadInterval { alpha: f64, beta: f64 },
    #[error("point {index} lies outside the binning box")]
    OutOfBox { index: usize },
    #[error("snapshot {index} uses a different binning")]
    BinMismatch { index: usize },
    #[error("low and high targets coincide ({0})")]
    DegenerateTarget(f64),
    #[error("alphabet must have at least two symbols, got {0}")]
    BadAlphabet(usize),
    #[error("cylinder word is not admissible: {0}")]
    BadCylinder(String),
    #[error("transition matrix is not mixing")]
    NotMixing,
    #[error("segment {index} is not admissible")]
    BadSegment { index: usize },
    #[error("word is not an admissible primitive cycle: {0}")]
    BadCycle(String),
    #[error("no admissible cycles up to period {0}")]
    NoCycles(usize),
    #[error("truncation at level {0} is empty after pruning")]
    EmptyTruncation(usize),
    #[error("horizon {n} is smaller than pre-orbit depth max({a}, {b})")]
    HorizonTooSmall { n: usize, a: u32, b: u32 },
    #[error(
        "floating-point orbit of a hyperbolic map refused beyond {limit} steps (asked {steps})"
    )]
    HyperbolicFloatHorizon { steps: usize, limit: usize },
    #[error("average traces disagree: {0}")]
    TraceMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::DomainEmpty(_) => "DOMAIN_EMPTY",
            Error::BadWindow { .. } => "BAD_WINDOW",
            Error::BadInterval { .. } => "BAD_INTERVAL",
            Error::OutOfBox { .. } => "OUT_OF_BOX",
            Error::BinMismatch { .. } => "BIN_MISMATCH",
            Error::DegenerateTarget(_) => "DEGENERATE_TARGET",
            Error::BadAlphabet(_) => "BAD_ALPHABET",
            Error::BadCylinder(_) => "BAD_CYLINDER",
            Error::NotMixing => "NOT_MIXING",
            Error::BadSegment { .. } => "BAD_SEGMENT",
            Error::BadCycle(_) => "BAD_CYCLE",
            Error::NoCycles(_) => "NO_CYCLES",
            Error::EmptyTruncation(_) => "EMPTY_TRUNCATION",
            Error::HorizonTooSmall { .. } => "HORIZON_TOO_SMALL",
            Error::HyperbolicFloatHorizon { .. } => "HYPERBOLIC_FLOAT_HORIZON",
            Error::TraceMismatch(_) => "TRACE_MISMATCH",
            Error::InvalidArgument(_) => "INVALID_ARGUMENT",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
