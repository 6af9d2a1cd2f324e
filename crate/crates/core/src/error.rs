use std::io;

use thiserror::Error;

use crate::store::LayerId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A required file is missing or unreadable.
    #[error("ingest error: {0}")]
    Ingest(String),

    /// Declared and observed shapes or dtypes disagree.
    #[error("schema error: {0}")]
    Schema(String),

    /// Non-finite activation at the given location.
    #[error("data error: non-finite value in layer {layer} at instance {instance}")]
    Data { layer: LayerId, instance: usize },

    #[error("query error: {0}")]
    Query(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Fewer unanimous candidate neurons than the requested `t`.
    #[error("insufficient candidates: {available} available, {requested} requested")]
    InsufficientCandidates { available: usize, requested: usize },

    #[error("layer {layer}: {source}")]
    Layer {
        layer: LayerId,
        #[source]
        source: Box<Error>,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn query(msg: impl Into<String>) -> Self {
        Error::Query(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateInput(msg.into())
    }

    /// Process exit code: 2 usage/validation, 3 data, 4 internal invariant.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Ingest(_) | Error::Schema(_) | Error::Query(_) => 2,
            Error::Data { .. }
            | Error::DegenerateInput(_)
            | Error::InsufficientCandidates { .. }
            | Error::Io(_)
            | Error::Json(_) => 3,
            Error::Invariant(_) => 4,
            Error::Layer { source, .. } => source.exit_code(),
        }
    }
}
