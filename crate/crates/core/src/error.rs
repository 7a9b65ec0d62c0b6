use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    Dimensions(String),
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("trace is {0}, expected 1")]
    Trace(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("invalid probabilities: {0}")]
    Probabilities(String),
    #[error("subsystem index {index} out of range for {count} subsystems")]
    Subsystem { index: usize, count: usize },
    #[error("empty subsystem selection")]
    EmptySelection,
    #[error("invalid measurement: {0}")]
    Measurement(String),
    #[error("expected {expected} measurement parameters for dimension {dim}, got {got}")]
    ParameterCount { dim: usize, expected: usize, got: usize },
    #[error("channel is not trace preserving (defect {0:.3e})")]
    NotTracePreserving(f64),
    #[error("operator is not unitary (defect {0:.3e})")]
    NotUnitary(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unknown state '{name}'; known states: {known}")]
    UnknownState { name: String, known: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimensions(_) => "dimensions",
            Error::NotHermitian(_) => "not_hermitian",
            Error::Trace(_) => "trace",
            Error::NotPositive(_) => "not_positive",
            Error::NotNormalized(_) => "not_normalized",
            Error::Probabilities(_) => "probabilities",
            Error::Subsystem { .. } => "subsystem",
            Error::EmptySelection => "empty_selection",
            Error::Measurement(_) => "measurement",
            Error::ParameterCount { .. } => "parameter_count",
            Error::NotTracePreserving(_) => "not_trace_preserving",
            Error::NotUnitary(_) => "not_unitary",
            Error::Unsupported(_) => "unsupported",
            Error::UnknownState { .. } => "unknown_state",
            Error::Config(_) => "config",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}
