use thiserror::Error;

/// Errors raised by metric evaluation, map evaluation and the verifier.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("undefined complex line: direction vector is zero")]
    UndefinedComplexLine,
    #[error("point outside domain: {0}")]
    OutsideDomain(String),
    #[error("domain is not simply connected: {0}")]
    NotSimplyConnected(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("zero tangent vector")]
    ZeroTangent,
    #[error("principal branch violated: {0}")]
    BranchCut(String),
    #[error("singular evaluation: {0}")]
    Singular(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("unknown suite id `{0}`")]
    UnknownSuite(String),
    #[error("suite `{suite}` failed at sample {index}: {source}")]
    Suite {
        suite: String,
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
