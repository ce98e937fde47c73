//! HTTP API feeding the dropdown search form.
//!
//! - `GET /api/terms`: ontology term names
//! - `GET /api/bounds`: `{min, max}` page relevance
//! - `POST /api/search`: `{dominating, sub_dominating, range: {from, to}, count}`
//! - `GET /api/stats`: corpus and index metadata
//!
//! Until an engine is installed every endpoint answers 503.

use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;

use crate::engine::{Bounds, Engine, EngineStats, RequestError, SearchRequest, SearchResponse};

#[derive(Clone, Default)]
pub struct AppState {
    engine: Arc<RwLock<Option<Arc<Engine>>>>,
}

impl AppState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_engine(engine: Engine) -> Self {
        let state = Self::new();
        state.install(engine);
        state
    }

    /// Replaces the served engine. Requests already holding the previous
    /// engine finish on it.
    pub fn install(&self, engine: Engine) {
        *self.engine.write().unwrap_or_else(|e| e.into_inner()) = Some(Arc::new(engine));
    }

    fn current(&self) -> Result<Arc<Engine>, ApiError> {
        self.engine
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .clone()
            .ok_or(ApiError::NotReady)
    }
}

#[derive(Debug)]
pub enum ApiError {
    NotReady,
    BadRequest(String),
    NotFound(String),
}

impl From<RequestError> for ApiError {
    fn from(e: RequestError) -> Self {
        match e {
            RequestError::Invalid(m) => ApiError::BadRequest(m),
            RequestError::UnknownTerm(_) | RequestError::NoBounds => ApiError::NotFound(e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, message) = match self {
            ApiError::NotReady => (StatusCode::SERVICE_UNAVAILABLE, "index not loaded yet".to_string()),
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, m),
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, m),
        };
        (status, Json(json!({ "error": message }))).into_response()
    }
}

async fn terms(State(state): State<AppState>) -> Result<Json<Vec<String>>, ApiError> {
    Ok(Json(state.current()?.term_names()))
}

async fn bounds(State(state): State<AppState>) -> Result<Json<Bounds>, ApiError> {
    Ok(Json(state.current()?.bounds()?))
}

async fn stats(State(state): State<AppState>) -> Result<Json<EngineStats>, ApiError> {
    Ok(Json(state.current()?.stats().clone()))
}

async fn search(
    State(state): State<AppState>,
    body: Result<Json<SearchRequest>, JsonRejection>,
) -> Result<Json<SearchResponse>, ApiError> {
    let engine = state.current()?;
    let Json(req) = body.map_err(|e| ApiError::BadRequest(e.body_text()))?;
    Ok(Json(engine.search(&req)?))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/terms", get(terms))
        .route("/api/bounds", get(bounds))
        .route("/api/stats", get(stats))
        .route("/api/search", post(search))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
