//! Batch front door for the diagonal-automorphism toolkit: input parsing,
//! command plumbing, exhaustive sweeps and report emission. Everything here
//! is thin; the mathematics lives in qdiag-core.

#![forbid(unsafe_code)]

pub mod dynamics;
pub mod report;
pub mod spec_io;
pub mod sweep;

use qdiag_core::canrep::CanrepError;
use qdiag_core::diagonal::DiagonalError;
use qdiag_core::extend::ExtendError;
use qdiag_core::phase::PhaseError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("bad level: {0}")]
    BadLevel(String),
    #[error("phase entry is not a valid unit phase: {0}")]
    NonUnitPhase(String),
    #[error("duplicate or overlapping cylinder: {0}")]
    DuplicateCylinder(String),
    #[error("cylinders do not tile the Cantor set (covered mass {covered_num}/{covered_den})")]
    IncompleteCover { covered_num: u64, covered_den: u64 },
    #[error("bad word: {0}")]
    BadWord(String),
    #[error("bad generator token: {0}")]
    BadToken(String),
    #[error("sweep needs {candidates} evaluations, over the budget of {budget}")]
    BudgetExceeded { candidates: u128, budget: u64 },
    #[error("cannot read input: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Diagonal(#[from] DiagonalError),
    #[error(transparent)]
    Extend(#[from] ExtendError),
    #[error(transparent)]
    Canrep(#[from] CanrepError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

impl CliError {
    /// 2 = input error, 3 = budget or cap exceeded; verdicts are data and
    /// exit 0 elsewhere.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::BudgetExceeded { .. }
            | CliError::Diagonal(DiagonalError::LevelCapExceeded { .. })
            | CliError::Extend(ExtendError::Diagonal(DiagonalError::LevelCapExceeded { .. }))
            | CliError::Canrep(CanrepError::Diagonal(DiagonalError::LevelCapExceeded { .. })) => 3,
            _ => 2,
        }
    }
}
