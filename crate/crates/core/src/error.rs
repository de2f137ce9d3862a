use thiserror::Error;

/// Errors shared across the engine. Every failure is loud and typed; there
/// is no silent truncation or approximation anywhere.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("element is not invertible")]
    NotInvertible,
    #[error("element is not a root of unity")]
    NotARootOfUnity,
    #[error("element is not real under the fixed complex embedding")]
    NotReal,
    #[error("sign could not be certified after precision escalation")]
    SignNotCertified,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),
    #[error("input is not a representation: {0}")]
    NonRepresentation(String),
    #[error("non-integer multiplicity in character decomposition: {0}")]
    NonIntegerMultiplicity(String),
    #[error("invalid module window: {0}")]
    BadWindow(String),
    #[error("operator is not scalar on a block: {0}")]
    NotScalar(String),
    #[error("parameters are not compatible with the *-structure: {0}")]
    ParamsNotStar(String),
    #[error("module is not certified unitary: {0}")]
    NotUnitary(String),
    #[error("exact decomposition solve failed: {0}")]
    DecompositionFailed(String),
    #[error("invariant check failed: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
