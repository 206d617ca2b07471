use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("zero homogeneous representative")]
    ZeroRepresentative,

    #[error("degree {degree} exceeds cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("coefficient count {count} exceeds cap {cap}")]
    CoefficientCap { count: usize, cap: usize },

    #[error("sample budget exceeded: {requested} torus points > cap {cap}")]
    SampleBudget { requested: u128, cap: u128 },

    #[error("insufficient samples per angle: {got} < required {required}")]
    InsufficientSamples { got: usize, required: usize },

    #[error("aliasing: {points} DFT points do not exceed total degree {degree}")]
    Aliasing { points: usize, degree: usize },

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("point lies outside the chart Z_{chart} != 0")]
    ChartViolation { chart: usize },

    #[error("degree exceeds resolving power of sample (interpolation regime)")]
    InterpolationRegime,

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("pole lies on K")]
    PoleOnK,

    #[error("K does not enclose a bounded component around the pole")]
    NonEnclosing,

    #[error("certificate inapplicable: {0}")]
    CertificateInapplicable(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
