use thiserror::Error;

/// Failure modes shared by every algorithm in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The caller supplied data that violates a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A black box (or a derived structure) broke its contract, e.g. `x^E != 1`.
    #[error("contract violation: {0}")]
    ContractViolation(String),
    /// A randomized search ran out of budget. Rerunning may succeed.
    #[error("Monte-Carlo failure in {stage}: {detail}")]
    MonteCarlo { stage: String, detail: String },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::ContractViolation(msg.into())
    }

    pub fn monte_carlo(stage: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::MonteCarlo {
            stage: stage.into(),
            detail: detail.into(),
        }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) => 1,
            Error::MonteCarlo { .. } => 2,
            Error::ContractViolation(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
