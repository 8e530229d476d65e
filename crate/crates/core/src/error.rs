use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid specs differ: {0}")]
    SpecMismatch(String),
    #[error("non-finite sample {value} at grid point {point:?}")]
    NonFiniteSample { point: Vec<f64>, value: f64 },
    #[error("dual slope cap {cap} is below the required {required}")]
    SlopeCapExceeded { cap: f64, required: f64 },
    #[error("dual function has no finite entry")]
    AllTop,
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("function is not convex (biconjugate gap {gap:.3e} exceeds {tolerance:.3e})")]
    NotConvex { gap: f64, tolerance: f64 },
    #[error("unsupported dimension {0} for this operation")]
    UnsupportedDimension(usize),
    #[error("truncation radius {radius} too small, need at least {required}")]
    RadiusTooSmall { radius: f64, required: f64 },
    #[error("empty input: {0}")]
    Empty(String),
    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
