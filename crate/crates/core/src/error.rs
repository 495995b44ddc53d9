use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank must be positive, got {0}")]
    NonPositiveRank(String),
    #[error("no real intersection with the line Delta = 1/2 (radicand {0})")]
    NoRealIntersection(String),
    #[error("slopes {0} and {1} are not an adjacent exceptional pair")]
    NotAnExceptionalPair(String, String),
    #[error("controlling exceptional bundle not found within depth {0}")]
    ControllingNotFound(u32),
    #[error("character is not generic: {0}")]
    NotGeneric(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("resolution is not pure")]
    NotPure,
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("unsupported rank: {0}")]
    UnsupportedRank(String),
    #[error("unsupported n = {0}: {1}")]
    UnsupportedN(u64, String),
    #[error("matrix is not generic: {0}")]
    NotGenericMatrix(String),
    #[error("maps do not compose to zero")]
    NotAComplex,
    #[error("infeasible stratum: {0}")]
    Infeasible(String),
    #[error("random choice degenerate, retry with a new seed: {0}")]
    RetryWithNewSeed(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
