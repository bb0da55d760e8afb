use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("elements belong to different rings (n = {left} vs n = {right})")]
    ContextMismatch { left: usize, right: usize },

    #[error("expected a homogeneous element of degree {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: String },

    #[error("element is not in the subring <t, 2e_i>")]
    NotInRPrime,

    #[error("torsion gcd {gcd} has nontrivial odd part {odd}")]
    OddTorsion { gcd: String, odd: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(u64),

    #[error("exact-computation budget exceeded: {0}")]
    OverBudget(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
