//! Ontology-grounded concept detection for text documents.
//!
//! The pipeline segments a document into tagged sentences, extracts query
//! candidates (noun chunks and collocation n-grams), maps them onto a domain
//! ontology by exact and fuzzy matching, rebuilds the concept hierarchy from
//! ontology paths and lays it out as a Bubble Treemap.

pub mod candidates;
pub mod config;
pub mod error;
pub mod hierarchy;
pub mod layout;
pub mod matcher;
pub mod ontology;
pub mod server;
pub mod text;
pub mod workspace;

pub use error::{Error, Result};
