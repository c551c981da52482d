//! HTTP API over a single Linky workspace.
//!
//! Readers work against an immutable [`Workspace`] snapshot held behind an
//! `Arc`. Uploads are serialized by a writer lock: the writer clones the
//! current snapshot, imports into the clone and then publishes it in one
//! pointer swap, so a reader sees either the old or the new state.
//!
//! Every JSON body carries a `schema_version` field and every response sets an
//! `x-linky-schema-version` header.

use std::future::Future;
use std::path::PathBuf;
use std::sync::{Arc, PoisonError, RwLock};

use axum::extract::DefaultBodyLimit;
use axum::http::{HeaderName, HeaderValue, Method};
use axum::response::Response;
use axum::routing::get;
use axum::Router;
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

use linky_core::vizprep::VizOptions;
use linky_core::workspace::Workspace;

mod error;
mod routes;

pub use error::ApiError;

pub const SCHEMA_VERSION: &str = "linky-api/1";
pub const SCHEMA_HEADER: &str = "x-linky-schema-version";
pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_TOPK: usize = 3;
pub const DEFAULT_SEARCH_LIMIT: usize = 20;
pub const MAX_SEARCH_LIMIT: usize = 1000;
const MAX_UPLOAD_BYTES: usize = 256 * 1024 * 1024;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Workspace directory. When it has not been ingested yet, requests fail
    /// with 503 until it has; the service retries opening it on demand.
    pub data_dir: Option<PathBuf>,
    pub viz: VizOptions,
    /// Number of candidate tabs in a pair view when `k` is not given.
    pub topk_default: usize,
    /// Allowed browser origins. `*` allows any origin; empty disables CORS.
    pub cors_origins: Vec<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            data_dir: None,
            viz: VizOptions::default(),
            topk_default: DEFAULT_TOPK,
            cors_origins: Vec::new(),
        }
    }
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

struct Inner {
    config: ServiceConfig,
    snapshot: RwLock<Option<Arc<Workspace>>>,
    writer: tokio::sync::Mutex<()>,
}

impl AppState {
    /// State backed by `config.data_dir`, opened now if it is already ingested.
    pub fn open(config: ServiceConfig) -> Result<Self, ApiError> {
        let state = Self::empty(config);
        if let Some(dir) = &state.0.config.data_dir {
            if Workspace::is_initialized(dir) {
                let ws = Workspace::open(dir)?;
                state.publish(ws);
            }
        }
        Ok(state)
    }

    /// State serving an already constructed workspace.
    pub fn with_workspace(workspace: Workspace, config: ServiceConfig) -> Self {
        let state = Self::empty(config);
        state.publish(workspace);
        state
    }

    fn empty(config: ServiceConfig) -> Self {
        Self(Arc::new(Inner {
            config,
            snapshot: RwLock::new(None),
            writer: tokio::sync::Mutex::new(()),
        }))
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.0.config
    }

    fn publish(&self, workspace: Workspace) {
        let mut slot = self.0.snapshot.write().unwrap_or_else(PoisonError::into_inner);
        *slot = Some(Arc::new(workspace));
    }

    fn current(&self) -> Option<Arc<Workspace>> {
        self.0
            .snapshot
            .read()
            .unwrap_or_else(PoisonError::into_inner)
            .clone()
    }

    /// The committed snapshot, opening the data directory lazily.
    pub async fn snapshot(&self) -> Result<Arc<Workspace>, ApiError> {
        if let Some(ws) = self.current() {
            return Ok(ws);
        }
        let _guard = self.0.writer.lock().await;
        self.snapshot_locked()
    }

    fn snapshot_locked(&self) -> Result<Arc<Workspace>, ApiError> {
        if let Some(ws) = self.current() {
            return Ok(ws);
        }
        match &self.0.config.data_dir {
            Some(dir) if Workspace::is_initialized(dir) => {
                self.publish(Workspace::open(dir)?);
                Ok(self.current().expect("just published"))
            }
            Some(dir) => Err(ApiError::no_workspace(format!(
                "no dataset has been ingested into {}",
                dir.display()
            ))),
            None => Err(ApiError::no_workspace("no workspace is loaded")),
        }
    }

    /// Runs `mutate` on a private copy of the snapshot and publishes the copy
    /// if it succeeds. Writers are serialized; readers are never blocked by
    /// the mutation itself.
    pub async fn update<T, F>(&self, mutate: F) -> Result<T, ApiError>
    where
        T: Send + 'static,
        F: FnOnce(&mut Workspace) -> Result<T, ApiError> + Send + 'static,
    {
        let _guard = self.0.writer.lock().await;
        let current = self.snapshot_locked()?;
        let (next, out) = tokio::task::spawn_blocking(move || {
            let mut next = Workspace::clone(&current);
            mutate(&mut next).map(|out| (next, out))
        })
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
        self.publish(next);
        Ok(out)
    }
}

fn cors_layer(origins: &[String]) -> Option<CorsLayer> {
    if origins.is_empty() {
        return None;
    }
    let allow = if origins.iter().any(|o| o == "*") {
        AllowOrigin::from(Any)
    } else {
        AllowOrigin::list(
            origins
                .iter()
                .filter_map(|o| HeaderValue::from_str(o).ok()),
        )
    };
    Some(
        CorsLayer::new()
            .allow_origin(allow)
            .allow_methods([Method::GET, Method::POST])
            .allow_headers(Any)
            .expose_headers([HeaderName::from_static(SCHEMA_HEADER)]),
    )
}

async fn stamp_schema(mut response: Response) -> Response {
    response.headers_mut().insert(
        HeaderName::from_static(SCHEMA_HEADER),
        HeaderValue::from_static(SCHEMA_VERSION),
    );
    response
}

pub fn router(state: AppState) -> Router {
    let cors = cors_layer(&state.config().cors_origins);
    let api = Router::new()
        .route("/api/workspace", get(routes::workspace_info))
        .route(
            "/api/solutions",
            get(routes::list_solutions).post(routes::create_solution),
        )
        .route("/api/solutions/{method_id}", get(routes::get_solution))
        .route(
            "/api/solutions/{method_id}/pairs/{source_id}",
            get(routes::pair),
        )
        .route("/api/solutions/{method_id}/diff", get(routes::diff))
        .route("/api/identities/search", get(routes::search_identities))
        .route(
            "/api/identities/{platform}/{user_id}/image",
            get(routes::profile_image),
        )
        .fallback(routes::not_found)
        .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES))
        .layer(axum::middleware::map_response(stamp_schema))
        .with_state(state);
    match cors {
        Some(cors) => api.layer(cors),
        None => api,
    }
}

/// Serves until `shutdown` resolves, then drains in-flight requests.
pub async fn serve(
    listener: TcpListener,
    state: AppState,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    if let Ok(addr) = listener.local_addr() {
        tracing::info!(%addr, "listening");
    }
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
}

/// Resolves on Ctrl-C or, on Unix, SIGTERM.
pub async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let terminate = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = terminate => {}
    }
}
