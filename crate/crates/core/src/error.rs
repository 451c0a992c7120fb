use alloc::string::String;
use core::fmt;

/// Errors produced by the numeric core and the search engine.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The design matrix does not have full column rank at the working tolerance.
    RankDeficient { rank: usize, cols: usize },
    /// IRLS did not reach the deviance tolerance.
    NonConverged { iterations: usize },
    /// A model or input violates a structural constraint.
    Infeasible(String),
    /// No feasible chromosome could be drawn within the restart budget.
    InfeasibleProblem(String),
    /// An exhaustive enumeration exceeds its size guard.
    TooLarge { candidates: u128, limit: u128 },
    /// Response values outside the support of the GLM family.
    InvalidResponse(String),
    /// Mismatched lengths or shapes.
    DimensionMismatch { expected: usize, found: usize },
    /// A configuration value is out of range.
    InvalidConfig(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::RankDeficient { rank, cols } => {
                write!(f, "design matrix is rank deficient (rank {rank} < {cols} columns)")
            }
            Error::NonConverged { iterations } => {
                write!(f, "IRLS did not converge after {iterations} iterations")
            }
            Error::Infeasible(msg) => write!(f, "infeasible: {msg}"),
            Error::InfeasibleProblem(msg) => write!(f, "infeasible problem: {msg}"),
            Error::TooLarge { candidates, limit } => {
                write!(f, "enumeration too large: {candidates} candidates exceeds limit {limit}")
            }
            Error::InvalidResponse(msg) => write!(f, "invalid response: {msg}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
