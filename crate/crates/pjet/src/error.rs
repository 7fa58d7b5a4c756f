use thiserror::Error;

/// Errors produced by the engine.
///
/// `InternalIdentity` is special: it flags a failed divisibility that is an
/// integral polynomial identity, so hitting it means the arithmetic layer is
/// corrupt, not that the input was bad.
#[derive(Debug, Error)]
pub enum Error {
    #[error("p = {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("insufficient p-adic precision: {0}")]
    InsufficientPrecision(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("term budget exceeded: {terms} terms, budget {budget}")]
    TermBudget { terms: usize, budget: usize },
    #[error("S-pair budget exceeded: {pairs} pairs, budget {budget}")]
    PairBudget { pairs: usize, budget: usize },
    #[error("too many variables for Groebner engine: {0} (max 8)")]
    TooManyVariables(usize),
    #[error("internal arithmetic corruption: {0}")]
    InternalIdentity(String),
    #[error("cannot certify: {0}")]
    CannotCertify(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
