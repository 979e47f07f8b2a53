use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("convergence failure in {what} (achieved error estimate {estimate:.3e})")]
    Convergence { what: String, estimate: f64 },

    #[error("no sign change on [{a}, {b}]")]
    NoSignChange { a: f64, b: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("root scan found no admissible root in (0, {upper}]")]
    RootScan { upper: f64 },

    #[error("window violation: need {0}")]
    Window(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn convergence(what: impl Into<String>, estimate: f64) -> Self {
        Error::Convergence {
            what: what.into(),
            estimate,
        }
    }

    /// True for failures caused by a numerical method rather than bad input.
    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::RootScan { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
