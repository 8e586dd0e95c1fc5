use thiserror::Error;

/// Errors raised by the system model, the engine, the encoders and the oracles.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("assignment domain mismatch: missing {missing:?}, extra {extra:?}")]
    Domain {
        missing: Vec<String>,
        extra: Vec<String>,
    },
    #[error("variable `{0}` has no finite bounds")]
    UnboundedVar(String),
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("budget `{what}` exceeded: {actual} > {limit}")]
    Budget {
        what: &'static str,
        limit: u64,
        actual: u64,
    },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("column {column} is not normalized")]
    Normalization { column: usize },
    #[error("invalid system: {0}")]
    System(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed rational `{0}`")]
    Rational(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn budget(what: &'static str, limit: u64, actual: u64) -> Result<()> {
    if actual > limit {
        Err(Error::Budget {
            what,
            limit,
            actual,
        })
    } else {
        Ok(())
    }
}
