use thiserror::Error;

/// Errors raised across the decoding engine, simulator and harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no samples")]
    NoSamples,
    #[error("non-finite sample value {value} at index {index}")]
    NonFiniteSample { index: usize, value: f64 },
    #[error("non-finite sample in action dimension {dim}")]
    NonFiniteDimension { dim: usize },
    #[error("bandwidth must be positive and finite, got {0}")]
    InvalidBandwidth(f64),
    #[error("invalid bin grid: {0}")]
    InvalidGrid(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("grids of the two distributions do not match")]
    GridMismatch,
    #[error("dimension count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("alpha must be finite and non-negative, got {0}")]
    NegativeAlpha(f64),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("prefix of length {prefix} is too long for {dims} action dimensions")]
    PrefixTooLong { prefix: usize, dims: usize },
    #[error("diffusion step {step} outside 1..={steps}")]
    InvalidStep { step: usize, steps: usize },
    #[error("raster dimension mismatch")]
    RasterMismatch,
    #[error("no background reference")]
    NoBackgroundReference,
    #[error("invalid prompt: {0}")]
    InvalidPrompt(String),
    #[error("unknown object label {0:?}")]
    UnknownLabel(String),
    #[error("could not place objects after {0} attempts")]
    Placement(usize),
    #[error("episode already terminated")]
    Terminated,
    #[error("action has {got} dimensions, expected {expected}")]
    ActionArity { expected: usize, got: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
