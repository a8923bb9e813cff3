use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown agent: {0}")]
    NotFound(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("agent label {0:?} is reserved")]
    NameClash(String),
    #[error("games are defined over different agent sets: {0}")]
    Mismatch(String),
    #[error("agent {agent} can be exactly indifferent (threshold {threshold} is a subset sum of its out-weights)")]
    IndifferencePresent { agent: String, threshold: String },
    #[error("{n} agents exceeds the enumeration limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("best-response dynamics did not converge within {rounds} rounds")]
    NonConvergent { rounds: u64 },
    #[error("linear system is not solvable with a nonnegative inverse: {0}")]
    Divergent(String),
}

impl Error {
    /// Input errors come from malformed requests; the rest are refusals of
    /// a well-formed request.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NotFound(_) | Error::InvalidParams(_) | Error::NameClash(_) | Error::Mismatch(_)
        )
    }

    pub fn code(&self) -> &'static str {
        match self {
            Error::NotFound(_) => "NotFound",
            Error::InvalidParams(_) => "InvalidParams",
            Error::NameClash(_) => "NameClash",
            Error::Mismatch(_) => "Mismatch",
            Error::IndifferencePresent { .. } => "IndifferencePresent",
            Error::TooLarge { .. } => "TooLarge",
            Error::NonConvergent { .. } => "NonConvergent",
            Error::Divergent(_) => "Divergent",
        }
    }
}
