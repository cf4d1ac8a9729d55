use thiserror::Error;

use crate::fan::ConeId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unknown cone: {0}")]
    UnknownCone(String),

    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("determinant {0} is not a unit of the Laurent ring")]
    NotAUnit(String),

    #[error("ray {ray} is not a ray of cone {cone}")]
    DivisorNotInChart { ray: usize, cone: ConeId },

    #[error("underdetermined: {0}")]
    Underdetermined(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("chart membership violated: {0}")]
    ChartMembership(String),

    #[error("inconsistent splitting: {0}")]
    InconsistentSplitting(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
