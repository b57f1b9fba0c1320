use thiserror::Error;

/// Failure modes shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("depth must be at least 1")]
    DepthZero,
    #[error("power iteration failed to converge: {0}")]
    NoConvergence(String),
    #[error("word is not a composable chain: {0}")]
    IncomposableWord(String),
    #[error("truncation leaves the verdict ambiguous: {0}")]
    AmbiguousTruncation(String),
    #[error("even weight admits no consistent extension: {0}")]
    NoExtension(String),
    #[error("weight violates the product-consistency law: {0}")]
    InconsistentWeight(String),
    #[error("no weight value for object `{0}`")]
    MissingWeight(String),
    #[error("scalar weight must be positive and finite, got {0}")]
    NonPositiveScalar(f64),
    #[error("candidate is not a weight function: {0}")]
    NotAWeight(String),
    #[error("not a group table: {0}")]
    NotAGroup(String),
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("closure left the known object set: {0}")]
    TruncationExhausted(String),
    #[error("theorem check failed: {0}")]
    TheoremViolation(String),
    #[error("system has no generator")]
    MissingGenerator,
    #[error("unknown object id `{0}`")]
    UnknownObject(String),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("desk-scale limit exceeded: {0}")]
    LimitExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
