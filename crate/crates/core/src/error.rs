use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("{what} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric (max deviation {deviation:.3e})")]
    Asymmetric { deviation: f64 },

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("error metric undefined: lambda_max - lambda_mixed = {delta} is not positive")]
    MetricUndefined { delta: f64 },

    #[error("registry parse error at row {row}: {message}")]
    RegistryParse { row: usize, message: String },

    #[error("unknown device `{name}` (known: {})", known.join(", "))]
    UnknownDevice { name: String, known: Vec<String> },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidModel(_) => "invalid-model",
            Error::OutOfRange { .. } => "range",
            Error::Dimension(_) => "dimension",
            Error::Asymmetric { .. } => "symmetry",
            Error::Encoding(_) => "encoding",
            Error::Shape(_) => "shape",
            Error::Argument(_) => "argument",
            Error::Domain(_) => "domain",
            Error::MetricUndefined { .. } => "metric-undefined",
            Error::RegistryParse { .. } => "registry-parse",
            Error::UnknownDevice { .. } => "lookup",
            Error::InsufficientData(_) => "insufficient-data",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
