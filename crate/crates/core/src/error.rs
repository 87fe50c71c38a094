use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0} is undefined because the mean income is infinite")]
    HeavyTail(&'static str),

    #[error("sample has zero total income")]
    ZeroTotal,

    #[error("zero denominator: the {0} quantile estimate is 0")]
    ZeroDenominator(&'static str),

    #[error("quadrature did not converge: estimate {estimate}, error {achieved:e} > tolerance {requested:e}")]
    Quadrature {
        estimate: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("root finding did not converge for p = {0}")]
    RootFinding(f64),

    #[error("{0} is not supported for this distribution family")]
    UnsupportedFamily(&'static str),

    #[error("step h = {h} too large at p = {p}: need 0 < p - h and p + h < 1")]
    StepTooLarge { p: f64, h: f64 },

    #[error("cannot parse distribution spec '{spec}': {reason}")]
    Spec { spec: String, reason: String },

    #[error("line {line}: {reason}")]
    Csv { line: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain { what, value, domain }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
