//! Read-only HTTP API over a processed workspace.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::ontology::{normalize, ConceptCard};
use crate::text::Span;
use crate::workspace::{DocumentArtifacts, Workspace};
use crate::{Error, Result};

type Shared = Arc<Workspace>;

pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
}

impl ApiError {
    fn not_found(message: String) -> ApiError {
        ApiError {
            status: StatusCode::NOT_FOUND,
            kind: "not_found",
            message,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "kind": self.kind, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = std::result::Result<Json<T>, ApiError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentSummary {
    pub id: String,
    pub title: String,
    pub n_concepts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentText {
    pub id: String,
    pub title: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceView {
    pub index: usize,
    pub span: Span,
    pub text: String,
    /// Concepts detected in the sentence, sorted, without repeats.
    pub concepts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Occurrence {
    pub frequency: u32,
    pub sentences: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptView {
    #[serde(flatten)]
    pub card: ConceptCard,
    /// Document id to occurrences, for documents where the concept was detected.
    pub occurrences: BTreeMap<String, Occurrence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub id: String,
    pub label: String,
    /// Documents whose tree contains the concept, in workspace order.
    pub documents: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct SearchParams {
    #[serde(default)]
    q: String,
}

fn document<'a>(
    ws: &'a Workspace,
    id: &str,
) -> std::result::Result<&'a DocumentArtifacts, ApiError> {
    ws.document(id)
        .ok_or_else(|| ApiError::not_found(format!("unknown document: {id}")))
}

async fn list_documents(State(ws): State<Shared>) -> Json<Vec<DocumentSummary>> {
    Json(
        ws.documents
            .iter()
            .map(|d| DocumentSummary {
                id: d.document.id.clone(),
                title: d.document.title.clone(),
                n_concepts: d.concepts.concept_count(),
            })
            .collect(),
    )
}

async fn document_text(
    State(ws): State<Shared>,
    Path(id): Path<String>,
) -> ApiResult<DocumentText> {
    let d = document(&ws, &id)?;
    Ok(Json(DocumentText {
        id: d.document.id.clone(),
        title: d.document.title.clone(),
        text: d.document.raw_text.clone(),
    }))
}

async fn document_sentences(
    State(ws): State<Shared>,
    Path(id): Path<String>,
) -> ApiResult<Vec<SentenceView>> {
    let d = document(&ws, &id)?;
    let mut per_sentence: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (concept, sentences) in &d.concepts.occurrences {
        for &s in sentences {
            per_sentence.entry(s).or_default().push(concept.clone());
        }
    }
    Ok(Json(
        d.document
            .sentences
            .iter()
            .map(|s| SentenceView {
                index: s.index,
                span: s.span,
                text: s.text.clone(),
                concepts: per_sentence.remove(&s.index).unwrap_or_default(),
            })
            .collect(),
    ))
}

async fn document_tree(State(ws): State<Shared>, Path(id): Path<String>) -> Response {
    match document(&ws, &id) {
        Ok(d) => Json(&d.tree).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn document_layout(State(ws): State<Shared>, Path(id): Path<String>) -> Response {
    match document(&ws, &id) {
        Ok(d) => Json(&d.layout).into_response(),
        Err(e) => e.into_response(),
    }
}

/// Card plus per-document occurrences for one concept.
pub fn concept_view(ws: &Workspace, id: &str) -> Result<ConceptView> {
    let card = ws.store.concept_card(id)?;
    let occurrences = ws
        .documents
        .iter()
        .filter_map(|d| {
            let frequency = *d.concepts.frequency.get(id)?;
            let sentences = d.concepts.occurrences.get(id)?.iter().copied().collect();
            Some((
                d.document.id.clone(),
                Occurrence {
                    frequency,
                    sentences,
                },
            ))
        })
        .collect();
    Ok(ConceptView { card, occurrences })
}

async fn concept(State(ws): State<Shared>, Path(id): Path<String>) -> ApiResult<ConceptView> {
    match concept_view(&ws, &id) {
        Ok(v) => Ok(Json(v)),
        Err(Error::NotFound(_)) => Err(ApiError::not_found(format!("unknown concept: {id}"))),
        Err(e) => Err(ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            kind: e.kind(),
            message: e.to_string(),
        }),
    }
}

async fn comparison(State(ws): State<Shared>) -> Response {
    match &ws.comparison {
        Some(c) => Json(c).into_response(),
        None => {
            ApiError::not_found("comparison needs at least two documents".into()).into_response()
        }
    }
}

/// Concepts present in any document tree whose label or a synonym contains
/// the normalized query. An empty query matches nothing.
pub fn search(ws: &Workspace, query: &str) -> Vec<SearchHit> {
    let q = normalize(query);
    if q.is_empty() {
        return Vec::new();
    }
    let mut hits: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for d in &ws.documents {
        for node in d.tree.nodes().filter(|n| !n.is_self) {
            hits.entry(&node.concept_id)
                .or_default()
                .push(d.document.id.clone());
        }
    }
    hits.into_iter()
        .filter_map(|(id, documents)| {
            let c = ws.store.get(id)?;
            let matches = std::iter::once(&c.label)
                .chain(c.synonyms.iter())
                .any(|s| normalize(s).contains(&q));
            matches.then(|| SearchHit {
                id: id.to_owned(),
                label: c.label.clone(),
                documents,
            })
        })
        .collect()
}

async fn search_handler(
    State(ws): State<Shared>,
    Query(p): Query<SearchParams>,
) -> Json<Vec<SearchHit>> {
    Json(search(&ws, &p.q))
}

async fn fallback() -> ApiError {
    ApiError::not_found("no such endpoint".into())
}

pub fn router(workspace: Arc<Workspace>) -> Router {
    Router::new()
        .route("/documents", get(list_documents))
        .route("/documents/{id}/text", get(document_text))
        .route("/documents/{id}/sentences", get(document_sentences))
        .route("/documents/{id}/tree", get(document_tree))
        .route("/documents/{id}/layout", get(document_layout))
        .route("/concepts/{*id}", get(concept))
        .route("/comparison", get(comparison))
        .route("/search", get(search_handler))
        .fallback(fallback)
        .with_state(workspace)
}

/// Binds `addr` and serves until interrupted.
pub async fn serve(workspace: Workspace, addr: SocketAddr) -> Result<()> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| Error::io(addr.to_string(), e))?;
    log::info!("serving {} documents on {addr}", workspace.documents.len());
    axum::serve(listener, router(Arc::new(workspace)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| Error::io(addr.to_string(), e))
}
