//! HTTP endpoints over an [`AnnotationSession`]:
//!
//! - `GET /api/next` returns `{schema, index, post}` (`index` and `post` are
//!   null once every post is annotated)
//! - `POST /api/annotate` takes `{index, annotation}` and answers 204, or 422
//!   with `{errors: [{field, message}]}`
//! - `GET /api/progress` returns `{total, annotated}`
//!
//! Everything else is served from the static asset directory when one is set.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::body::Bytes;
use axum::extract::{Request, State};
use axum::http::{HeaderMap, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use hausa_guard::annotator::AnnotationSession;
use hausa_guard::{Error, FieldError};
use serde_json::{json, Value};
use tower_http::services::ServeDir;

/// Header carrying the shared token when one is configured.
pub const TOKEN_HEADER: &str = "x-annotator-token";

#[derive(Clone)]
pub struct AppState {
    session: Arc<Mutex<AnnotationSession>>,
    token: Option<Arc<str>>,
}

impl AppState {
    pub fn new(session: AnnotationSession, token: Option<String>) -> Self {
        AppState {
            session: Arc::new(Mutex::new(session)),
            token: token.map(Into::into),
        }
    }

    fn lock(&self) -> MutexGuard<'_, AnnotationSession> {
        self.session.lock().unwrap_or_else(|p| p.into_inner())
    }

    /// Closes the session, releasing the dataset lock.
    pub fn close(&self) -> hausa_guard::Result<()> {
        self.lock().close()
    }
}

fn errors(status: StatusCode, fields: &[FieldError]) -> Response {
    let list: Vec<Value> = fields
        .iter()
        .map(|f| json!({"field": f.field, "message": f.message}))
        .collect();
    (status, Json(json!({"errors": list}))).into_response()
}

fn error_response(err: Error) -> Response {
    match err {
        Error::InvalidFields(fields) => errors(StatusCode::UNPROCESSABLE_ENTITY, &fields),
        Error::Range { .. } => errors(
            StatusCode::UNPROCESSABLE_ENTITY,
            &[FieldError::new("index", err.to_string())],
        ),
        Error::State(_) => errors(StatusCode::CONFLICT, &[FieldError::new("session", err.to_string())]),
        other => errors(
            StatusCode::INTERNAL_SERVER_ERROR,
            &[FieldError::new("server", other.to_string())],
        ),
    }
}

async fn next(State(state): State<AppState>) -> Response {
    let session = state.lock();
    match session.next_unlabeled() {
        Ok(found) => {
            let (index, post) = match found {
                Some((post, index)) => (json!(index), serde_json::to_value(&post).expect("posts serialize")),
                None => (Value::Null, Value::Null),
            };
            Json(json!({"schema": session.kind().to_string(), "index": index, "post": post})).into_response()
        }
        Err(e) => error_response(e),
    }
}

async fn progress(State(state): State<AppState>) -> Response {
    Json(state.lock().progress()).into_response()
}

async fn annotate(State(state): State<AppState>, body: Bytes) -> Response {
    let value: Value = match serde_json::from_slice(&body) {
        Ok(v) => v,
        Err(e) => return errors(StatusCode::BAD_REQUEST, &[FieldError::new("body", e.to_string())]),
    };
    let mut problems = Vec::new();
    let index = match value.get("index") {
        Some(Value::Number(n)) if n.as_u64().is_some() => n.as_u64().map(|i| i as usize),
        Some(_) => {
            problems.push(FieldError::new("index", "must be a non-negative integer"));
            None
        }
        None => {
            problems.push(FieldError::new("index", "is required"));
            None
        }
    };
    let annotation = value.get("annotation");
    if annotation.is_none() {
        problems.push(FieldError::new("annotation", "is required"));
    }
    if let Some(obj) = value.as_object() {
        for key in obj.keys().filter(|k| *k != "index" && *k != "annotation") {
            problems.push(FieldError::new(key.clone(), "unknown field"));
        }
    }
    if !problems.is_empty() {
        return errors(StatusCode::UNPROCESSABLE_ENTITY, &problems);
    }
    let (index, annotation) = (index.expect("checked"), annotation.expect("checked"));
    let mut session = state.lock();
    match session.submit_json(index, annotation) {
        Ok(()) => StatusCode::NO_CONTENT.into_response(),
        Err(e) => error_response(e),
    }
}

async fn require_token(State(state): State<AppState>, headers: HeaderMap, request: Request, next: Next) -> Response {
    if let Some(expected) = &state.token {
        let given = headers.get(TOKEN_HEADER).and_then(|v| v.to_str().ok());
        if given != Some(expected.as_ref()) {
            return errors(
                StatusCode::UNAUTHORIZED,
                &[FieldError::new(TOKEN_HEADER, "missing or wrong token")],
            );
        }
    }
    next.run(request).await
}

pub fn router(state: AppState, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/next", get(next))
        .route("/api/annotate", post(annotate))
        .route("/api/progress", get(progress))
        .route_layer(middleware::from_fn_with_state(state.clone(), require_token))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub addr: SocketAddr,
    pub static_dir: Option<PathBuf>,
    pub token: Option<String>,
}

/// Binds and serves until Ctrl-C, then closes the session.
pub async fn serve(session: AnnotationSession, config: ServeConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(config.addr).await?;
    let state = AppState::new(session, config.token);
    let app = router(state.clone(), config.static_dir);
    eprintln!("annotation server listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    state.close().map_err(std::io::Error::other)
}
