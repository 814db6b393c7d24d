use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("exponent fit needs at least {needed} scales in the window, got {got}")]
    FitUnderdetermined { needed: usize, got: usize },
    #[error("curve too short: {0}")]
    CurveTooShort(String),
    #[error("energy diverges: coincident support points with zero truncation")]
    EnergyOverflow,
    #[error("branching condition fails at generation {generation}")]
    BranchingCondition { generation: usize },
    #[error("family is not well separated: {0}")]
    NotSeparated(String),
    #[error("walk exceeded {0} steps")]
    StepCap(u64),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("aborted: {failed} of {total} trials failed")]
    Aborted { failed: usize, total: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn bad_param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
