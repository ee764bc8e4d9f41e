use thiserror::Error;

use crate::graph::GraphError;
use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures shared across modules. Infeasibility is never an error; it is
/// reported as a value by the operations that decide it.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("epsilon must be non-negative, got {0}")]
    NegativeEpsilon(Rational),
    #[error("size limit exceeded: {what} is {actual}, limit {limit}")]
    SizeLimit { what: &'static str, actual: usize, limit: usize },
    #[error("label sets differ: {0}")]
    LabelMismatch(String),
    #[error("invalid labeling: {0}")]
    Labeling(String),
    #[error("not a merge tree: {0}")]
    NotAMergeTree(String),
    #[error("morphism is inconsistent: {0}")]
    Morphism(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("input/output: {0}")]
    Io(#[from] std::io::Error),
    #[error("document: {0}")]
    Document(String),
}

impl Error {
    pub fn is_size_limit(&self) -> bool {
        matches!(self, Error::SizeLimit { .. })
    }

    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Graph(_) | Error::Labeling(_) | Error::NotAMergeTree(_) | Error::Document(_)
        )
    }
}
