use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A distribution violates its structural invariants.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// An experiment or strategy configuration is inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A bound was requested outside the parameter range it is stated for.
    #[error("bound precondition violated: {0}")]
    BoundPrecondition(String),
}

pub(crate) fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {x} is outside [0, 1]")))
    }
}
