use thiserror::Error;

use crate::krylov::SolveReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("invalid material: {0}")]
    Material(String),

    #[error("index {index} out of range (len {len})")]
    Index { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("{solver} did not converge: relative residual {:.3e} after {} iterations", report.relative_residual, report.iterations)]
    NotConverged {
        solver: &'static str,
        report: SolveReport,
    },

    #[error("singular preconditioner block in cell {0}")]
    SingularBlock(usize),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("invalid config: {0}")]
    Invalid(String),

    #[error("{0}")]
    NoSpall(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
