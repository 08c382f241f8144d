use thiserror::Error;

/// Every failure the library reports.
///
/// Variants are grouped by the exit code the CLI maps them to: parse and
/// consistency problems, budget refusals, and internal inconsistencies that
/// would falsify one of the structural facts the pipeline relies on.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("inconsistent input: {0}")]
    Inconsistency(String),
    #[error("jumps {first} and {second} coincide modulo {modulus} at n = {n}")]
    Collision {
        n: i64,
        modulus: i64,
        first: String,
        second: String,
    },
    #[error("matrix of dimension {dim} exceeds the oracle cap of {cap}")]
    SizeCap { dim: usize, cap: usize },
    #[error("state budget exceeded: {states} states (budget {budget})")]
    StateBudget { states: usize, budget: usize },
    #[error("block structure violated: {0}")]
    BlockStructure(String),
    #[error("annihilator check failed: {0}")]
    Annihilation(String),
    #[error("no linear recurrence of order <= {cap} fits {terms} terms")]
    NoRecurrence { cap: usize, terms: usize },
    #[error("decomposition is not independent of n: {0}")]
    Decomposition(String),
    #[error("unsupported request: {0}")]
    Unsupported(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BlockStructure(_)
            | Error::Annihilation(_)
            | Error::NoRecurrence { .. }
            | Error::Decomposition(_) => 1,
            Error::SizeCap { .. } | Error::StateBudget { .. } => 2,
            Error::Syntax(_)
            | Error::Inconsistency(_)
            | Error::Collision { .. }
            | Error::Unsupported(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
