//! HTTP API over the insight engine.
//!
//! All routes live under `/v1` and answer JSON carrying `api_version`.
//! Uploading a dataset starts an asynchronous precompute (summaries and
//! sketches) whose progress can be polled; queries issued before it finishes
//! simply build what they need on the spot.
//!
//! ```no_run
//! # async fn run() -> std::io::Result<()> {
//! let app = insight_service::router(insight_service::AppState::new(Default::default()));
//! let listener = tokio::net::TcpListener::bind("127.0.0.1:8080").await?;
//! axum::serve(listener, app).await
//! # }
//! ```

mod error;
mod routes;

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::DefaultBodyLimit;
use axum::routing::{delete, get, post, put};
use axum::Router;
use insight_core::{Engine, EngineConfig, ExplorationState};
use serde::Serialize;

pub use error::{ApiError, ErrorCode};

pub const API_VERSION: u32 = 1;
/// Largest page a query may ask for.
pub const MAX_PAGE: usize = 50;
/// Upload size cap.
pub const MAX_UPLOAD_BYTES: usize = 1 << 30;

#[derive(Debug, Default)]
pub struct Progress {
    done: AtomicUsize,
    total: AtomicUsize,
    finished: AtomicBool,
    failed: Mutex<Option<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecomputeState {
    Running,
    Completed,
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProgressView {
    pub state: PrecomputeState,
    pub done: usize,
    pub total: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Progress {
    pub fn view(&self) -> ProgressView {
        let error = self.failed.lock().expect("progress lock").clone();
        let state = if error.is_some() {
            PrecomputeState::Failed
        } else if self.finished.load(Ordering::Acquire) {
            PrecomputeState::Completed
        } else {
            PrecomputeState::Running
        };
        ProgressView {
            state,
            done: self.done.load(Ordering::Acquire),
            total: self.total.load(Ordering::Acquire),
            error,
        }
    }
}

#[derive(Debug)]
pub struct DatasetEntry {
    pub id: String,
    pub engine: Arc<Engine>,
    pub progress: Arc<Progress>,
}

/// One exploration session; mutations are serialized by the mutex.
#[derive(Debug)]
pub struct SessionEntry {
    pub dataset_id: String,
    pub state: tokio::sync::Mutex<ExplorationState>,
}

#[derive(Debug, Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

#[derive(Debug)]
struct Inner {
    config: EngineConfig,
    datasets: RwLock<HashMap<String, Arc<DatasetEntry>>>,
    sessions: RwLock<HashMap<String, Arc<SessionEntry>>>,
    next_dataset: AtomicU64,
    next_session: AtomicU64,
}

impl AppState {
    pub fn new(config: EngineConfig) -> Self {
        Self {
            inner: Arc::new(Inner {
                config,
                datasets: RwLock::new(HashMap::new()),
                sessions: RwLock::new(HashMap::new()),
                next_dataset: AtomicU64::new(1),
                next_session: AtomicU64::new(1),
            }),
        }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.inner.config
    }

    /// Registers an engine and starts its precompute on the blocking pool.
    ///
    /// `id` defaults to the next `ds-<n>`. Must be called inside a Tokio runtime.
    pub fn add_engine(&self, engine: Engine, id: Option<String>) -> Arc<DatasetEntry> {
        let id = id.unwrap_or_else(|| {
            format!(
                "ds-{}",
                self.inner.next_dataset.fetch_add(1, Ordering::Relaxed)
            )
        });
        let entry = Arc::new(DatasetEntry {
            id: id.clone(),
            engine: Arc::new(engine),
            progress: Arc::new(Progress::default()),
        });
        self.inner
            .datasets
            .write()
            .expect("dataset lock")
            .insert(id, entry.clone());
        let (engine, progress) = (entry.engine.clone(), entry.progress.clone());
        tokio::task::spawn_blocking(move || {
            let report = |done: usize, total: usize| {
                progress.total.store(total, Ordering::Release);
                progress.done.store(done, Ordering::Release);
            };
            let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
                engine.precompute(&report)
            }));
            match outcome {
                Ok(()) => progress.finished.store(true, Ordering::Release),
                Err(_) => {
                    *progress.failed.lock().expect("progress lock") =
                        Some("precompute panicked".into())
                }
            }
        });
        entry
    }

    pub fn dataset(&self, id: &str) -> Result<Arc<DatasetEntry>, ApiError> {
        self.inner
            .datasets
            .read()
            .expect("dataset lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("dataset", id))
    }

    pub fn dataset_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self
            .inner
            .datasets
            .read()
            .expect("dataset lock")
            .keys()
            .cloned()
            .collect();
        ids.sort();
        ids
    }

    fn add_session(
        &self,
        dataset_id: String,
        state: ExplorationState,
    ) -> (String, Arc<SessionEntry>) {
        let id = format!(
            "s-{}",
            self.inner.next_session.fetch_add(1, Ordering::Relaxed)
        );
        let entry = Arc::new(SessionEntry {
            dataset_id,
            state: tokio::sync::Mutex::new(state),
        });
        self.inner
            .sessions
            .write()
            .expect("session lock")
            .insert(id.clone(), entry.clone());
        (id, entry)
    }

    pub fn session(&self, id: &str) -> Result<Arc<SessionEntry>, ApiError> {
        self.inner
            .sessions
            .read()
            .expect("session lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("session", id))
    }
}

pub fn router(state: AppState) -> Router {
    use routes::*;
    let v1 = Router::new()
        .route("/health", get(health))
        .route("/classes", get(classes))
        .route("/datasets", post(upload).get(list_datasets))
        .route("/datasets/{id}", get(get_dataset))
        .route("/datasets/{id}/precompute", get(precompute_progress))
        .route("/datasets/{id}/query", post(query))
        .route("/datasets/{id}/visualize", post(visualize))
        .route("/datasets/{id}/overview/{class}", get(overview))
        .route("/datasets/{id}/neighborhood", post(neighborhood))
        .route("/sessions", post(create_session))
        .route("/sessions/load", post(load_session))
        .route("/sessions/{sid}", get(get_session))
        .route("/sessions/{sid}/focus", post(focus))
        .route("/sessions/{sid}/unfocus", post(unfocus))
        .route("/sessions/{sid}/constraints", put(set_constraint))
        .route(
            "/sessions/{sid}/constraints/{class}",
            delete(clear_constraint),
        )
        .route("/sessions/{sid}/save", get(save_session));
    Router::new()
        .nest("/v1", v1)
        .fallback(not_found)
        .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES))
        .with_state(state)
}

/// Serves the router on `addr` until the process is stopped.
pub async fn serve(addr: std::net::SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state)).await
}
