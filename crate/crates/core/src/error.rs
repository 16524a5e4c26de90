use thiserror::Error;

/// Errors produced by the library. Bounded procedures that merely fail to
/// conclude report that through their result types, not through `Error`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("term table exceeded the configured limit of {0} terms")]
    TermLimitExceeded(usize),

    #[error("no fixed point found: {0}")]
    NoFixedPointFound(String),

    #[error("linear part is not diagonalizable over the ground field: {0}")]
    NotDiagonalizable(String),

    #[error("diagonalized linear entry {0} is not a single character")]
    NonMonomialEntries(usize),

    #[error("weight matrix is singular")]
    WeightMatrixSingular,

    #[error("not an automorphism: {0}")]
    NotAnAutomorphism(String),

    #[error("action is not effective")]
    NotEffective,

    #[error("commutative linearization failed: {0}")]
    CommLinearizationFailed(String),

    #[error("lifted conjugator does not linearize the action: {0}")]
    LiftVerificationFailed(String),

    #[error("reduction to {0}x{0} generic matrices is not invertible")]
    ReductionNotInvertible(usize),

    #[error("conjugating map is not invertible: {0}")]
    BetaNotInvertible(String),

    #[error("action is not positive-root or negative-root")]
    NotPositiveRoot,

    #[error("witness invalid: {0}")]
    WitnessInvalid(String),

    #[error("degree of y_{0} lies in the subgroup generated by the degree of t")]
    SubgroupConditionViolated(usize),

    #[error("quotient algebras are not isomorphic via the given data: {0}")]
    QuotientIsoInvalid(String),

    #[error("witness verification failed at degree bound {0}")]
    WitnessVerificationFailed(usize),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
