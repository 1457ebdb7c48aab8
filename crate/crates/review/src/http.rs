use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tower_http::services::ServeDir;

use crate::error::ReviewError;
use crate::model::{Flow, ReviewDecision};
use crate::store::{Proposal, ReviewStore};

pub type SharedStore = Arc<Mutex<ReviewStore>>;

impl IntoResponse for ReviewError {
    fn into_response(self) -> Response {
        let status = match &self {
            ReviewError::UnknownAnnotator(_) | ReviewError::UnknownTask(_) => StatusCode::NOT_FOUND,
            ReviewError::TaskClosed(_) | ReviewError::DuplicateTask(_) => StatusCode::CONFLICT,
            ReviewError::VerdictMismatch { .. } | ReviewError::NotAssigned { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            ReviewError::Invalid(_) | ReviewError::Parse { .. } => StatusCode::BAD_REQUEST,
            ReviewError::Io { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        };
        if status.is_server_error() {
            log::error!("{self}");
        }
        (status, Json(json!({ "error": self.to_string() }))).into_response()
    }
}

fn lock(store: &SharedStore) -> MutexGuard<'_, ReviewStore> {
    // A panic mid-request leaves the store consistent (mutations are applied
    // after their log write), so keep serving.
    store.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

#[derive(Deserialize)]
struct NextQuery {
    annotator: String,
    flow: Flow,
}

async fn next_task(State(store): State<SharedStore>, Query(q): Query<NextQuery>) -> Result<Response, ReviewError> {
    match lock(&store).next_task(&q.annotator, q.flow)? {
        Some(task) => Ok(Json(task).into_response()),
        None => Ok(StatusCode::NO_CONTENT.into_response()),
    }
}

async fn submit(State(store): State<SharedStore>, Json(d): Json<ReviewDecision>) -> Result<Response, ReviewError> {
    let state = lock(&store).submit_decision(d)?;
    Ok(Json(state).into_response())
}

async fn propose(State(store): State<SharedStore>, Json(p): Json<Proposal>) -> Result<Response, ReviewError> {
    let task = lock(&store).propose(p)?;
    Ok((StatusCode::CREATED, Json(task)).into_response())
}

async fn agreement(State(store): State<SharedStore>) -> Response {
    Json(lock(&store).agreement_report()).into_response()
}

#[derive(Deserialize)]
struct ExportQuery {
    flow: Flow,
}

async fn export(State(store): State<SharedStore>, Query(q): Query<ExportQuery>) -> Result<Response, ReviewError> {
    let doc = lock(&store).export_accepted(q.flow)?;
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson; charset=utf-8")], doc).into_response())
}

async fn health(State(store): State<SharedStore>) -> Response {
    let store = lock(&store);
    Json(json!({
        "status": "ok",
        "tasks": store.tasks().count(),
        "decisions": store.decisions().len(),
        "annotators": store.annotators(),
    }))
    .into_response()
}

/// API routes, plus the UI bundle from `static_dir` for every other path.
pub fn router(store: SharedStore, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/tasks/next", get(next_task))
        .route("/api/tasks", post(propose))
        .route("/api/decisions", post(submit))
        .route("/api/agreement", get(agreement))
        .route("/api/export", get(export))
        .route("/api/health", get(health))
        .with_state(store);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir).append_index_html_on_directories(true)),
        None => api,
    }
}
