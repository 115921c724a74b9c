//! Read-only HTTP hosting of one bundle plus optional static UI files.

use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use axisdecomp_core::pipeline::{AnalysisBundle, ENGINE_VERSION};
use axisdecomp_core::Error;
use axum::extract::State;
use axum::http::{header, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use tokio::net::TcpListener;

#[derive(Clone)]
pub struct ServerState {
    inner: Arc<Inner>,
}

struct Inner {
    bundle: String,
    assets: Option<PathBuf>,
}

impl ServerState {
    /// Checks that `bundle` parses as an analysis bundle; the text itself is
    /// served unchanged.
    pub fn new(bundle: String, assets: Option<PathBuf>) -> Result<Self, Error> {
        AnalysisBundle::from_json(&bundle)?;
        Ok(ServerState {
            inner: Arc::new(Inner { bundle, assets }),
        })
    }
}

pub fn router(state: ServerState) -> Router {
    Router::new()
        .route("/bundle", get(bundle))
        .route("/health", get(health))
        .fallback(get(asset))
        .with_state(state)
}

pub async fn run(listener: TcpListener, state: ServerState) -> Result<(), Error> {
    axum::serve(listener, router(state)).await?;
    Ok(())
}

async fn bundle(State(state): State<ServerState>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], state.inner.bundle.clone()).into_response()
}

async fn health() -> String {
    format!("axisdecomp {ENGINE_VERSION}")
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("html") => "text/html; charset=utf-8",
        Some("js" | "mjs") => "text/javascript",
        Some("css") => "text/css",
        Some("json") => "application/json",
        Some("svg") => "image/svg+xml",
        Some("png") => "image/png",
        Some("wasm") => "application/wasm",
        _ => "application/octet-stream",
    }
}

/// Maps a request path onto the asset directory, refusing anything that
/// could step outside it.
fn resolve(root: &Path, uri_path: &str) -> Option<PathBuf> {
    let rel = uri_path.trim_start_matches('/');
    let rel = if rel.is_empty() { "index.html" } else { rel };
    let rel = Path::new(rel);
    if !rel.components().all(|c| matches!(c, Component::Normal(_))) {
        return None;
    }
    Some(root.join(rel))
}

async fn asset(State(state): State<ServerState>, uri: Uri) -> Response {
    let Some(root) = &state.inner.assets else {
        return StatusCode::NOT_FOUND.into_response();
    };
    let Some(path) = resolve(root, uri.path()) else {
        return StatusCode::NOT_FOUND.into_response();
    };
    match tokio::fs::read(&path).await {
        Ok(bytes) => ([(header::CONTENT_TYPE, content_type(&path))], bytes).into_response(),
        Err(_) => StatusCode::NOT_FOUND.into_response(),
    }
}
