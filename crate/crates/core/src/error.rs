use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input is not valid UTF-8: {0}")]
    Decode(#[from] std::str::Utf8Error),

    #[error(transparent)]
    Ontology(#[from] crate::ontology::OntologyError),

    #[error(transparent)]
    Taxonomy(#[from] crate::matcher::TaxonomyError),

    #[error("unknown concept: {0}")]
    NotFound(String),

    #[error("entity lookup unavailable for {query:?}: {reason}")]
    LookupUnavailable { query: String, reason: String },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("trees were built against different ontology roots: {expected} vs {found}")]
    RootMismatch { expected: String, found: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable category used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Decode(_) => "decode",
            Error::Ontology(_) => "ontology",
            Error::Taxonomy(_) => "taxonomy",
            Error::NotFound(_) => "not_found",
            Error::LookupUnavailable { .. } => "lookup_unavailable",
            Error::Integrity(_) => "integrity",
            Error::RootMismatch { .. } => "root_mismatch",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }
}
