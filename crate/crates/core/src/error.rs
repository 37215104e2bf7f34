use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid cyclotomic order {0}")]
    InvalidOrder(u64),
    #[error("sign undecided at {bits} bits of precision")]
    PrecisionExhausted { bits: u32 },
    #[error("invalid minimal model parameter p = {0}")]
    InvalidModel(i64),
    #[error("invalid label: {0}")]
    InvalidLabel(String),
    #[error("invalid r-matrix key: {0}")]
    InvalidKey(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("k = {k} exceeds the configured bound {max}")]
    BoundExceeded { k: u32, max: u32 },
    #[error("side condition failed: {0}")]
    SideConditionFailure(String),
    #[error("no parity branch applies: {0}")]
    ParityBranchUnavailable(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable category, used in CLI error output.
    pub fn category(&self) -> &'static str {
        match self {
            Error::ZeroDenominator | Error::DivisionByZero | Error::InvalidOrder(_) => "arithmetic",
            Error::PrecisionExhausted { .. } => "precision",
            Error::InvalidModel(_) | Error::InvalidLabel(_) | Error::InvalidKey(_) => "input",
            Error::SingularMatrix => "singular",
            Error::BoundExceeded { .. } => "bound",
            Error::SideConditionFailure(_) | Error::ParityBranchUnavailable(_) => "side-condition",
            Error::InvalidConfig(_) => "config",
            Error::Cache(_) => "cache",
            Error::Parse(_) => "parse",
        }
    }
}
