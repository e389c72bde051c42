use alloc::string::String;

/// Errors produced by model construction and analysis.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("corpus contains no paths")]
    EmptyCorpus,
    #[error("invalid node token {0:?}")]
    InvalidToken(String),
    #[error("path must contain at least one node")]
    EmptyPath,
    #[error("multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("walk count overflow while powering the adjacency matrix to order {order}")]
    Overflow { order: usize },
    #[error("path {path} has zero probability under the order-{order} model")]
    ZeroProbabilityPath { path: String, order: usize },
    #[error("internal consistency violated: {0}")]
    Inconsistent(String),
    #[error("network has no nodes")]
    EmptyNetwork,
    #[error("cannot construct planted chain: {0}")]
    Infeasible(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
