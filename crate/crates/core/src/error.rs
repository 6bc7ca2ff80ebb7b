use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HdrError {
    #[error("invalid interval: lower bound {lower} exceeds upper bound {upper}")]
    InvalidInterval { lower: f64, upper: f64 },

    #[error("unknown distribution family '{0}'")]
    UnknownFamily(String),

    #[error("unknown parameter '{name}' for family '{family}'")]
    UnknownParameter { family: String, name: String },

    #[error("missing required parameter '{name}' for family '{family}'")]
    MissingParameter { family: String, name: String },

    #[error("parameter '{name}' = {value} is outside its domain ({reason})")]
    ParameterDomain {
        name: String,
        value: f64,
        reason: &'static str,
    },

    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    #[error("density has no interior extremum for this shape")]
    NoInteriorExtremum,

    #[error("log-density slope unavailable: bundle has neither a stored slope nor a density")]
    MissingDerivative,

    #[error("density function unavailable for this bundle")]
    MissingDensity,

    #[error("coverage probability {0} is outside [0, 1]")]
    CoverDomain(f64),

    #[error("objective is not finite at the starting point {0}")]
    InvalidStart(f64),

    #[error("non-finite evaluation at x = {0}")]
    NonFiniteEvaluation(f64),

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("invalid transform: {0}")]
    InvalidTransform(String),

    #[error("support of size {size} exceeds the enumeration limit of {limit}")]
    SizeLimit { size: usize, limit: usize },

    #[error("invalid probability mass function: {0}")]
    InvalidPmf(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, HdrError>;
