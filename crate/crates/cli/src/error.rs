use thiserror::Error;

/// Exit codes are a stable contract: 0 for success (all traces
/// compatible), 1 when violations were found, 2 for any input error.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(String, String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
    #[error("mining failed: {0}")]
    Mining(#[from] tpo_core::mining::MiningError),
    #[error("{0}")]
    Split(#[from] tpo_core::mining::SplitError),
    #[error("constraint system is infeasible; contradicting inequalities: {0}")]
    Infeasible(tpo_core::constraints::NegativeCycle),
    #[error("generation failed: {0}")]
    Generation(#[from] tpo_core::gen::GenError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_INPUT_ERROR
    }
}
