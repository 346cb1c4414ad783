//! HTTP API over the geographically weighted correlation engine.
//!
//! | method | path                        | purpose                              |
//! |--------|-----------------------------|--------------------------------------|
//! | POST   | `/datasets`                 | upload GeoJSON or point CSV          |
//! | GET    | `/datasets/{id}/variables`  | variable schema                      |
//! | POST   | `/analyses`                 | run an analysis, returns a summary   |
//! | GET    | `/analyses/{id}/result`     | GeoJSON map document (`?pair=a,b`)   |
//! | GET    | `/analyses/{id}/scatter`    | scatter records (`?pair=a,b`)        |
//! | GET    | `/config`                   | UI configuration (tile URL)          |
//!
//! Errors are JSON objects `{error_kind, message}`.

mod error;
mod store;

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::body::{to_bytes, Body};
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use gwcorr_core::{run_analysis, Analysis, AnalysisRequest, AnalysisSummary, CoordMode, Dataset};
use gwcorr_core::geodata::{parse_geojson, parse_point_csv};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

pub use error::ApiError;
pub use store::Lru;

#[derive(Debug, Clone)]
pub struct Config {
    /// Largest accepted upload, in bytes.
    pub size_limit: usize,
    pub timeout: Duration,
    /// Datasets kept in memory before the least recently used is evicted.
    pub dataset_capacity: usize,
    pub analysis_capacity: usize,
    /// Base-map tile URL relayed to the browser UI.
    pub tiles_url: Option<String>,
    /// Built web UI assets, served at `/`.
    pub static_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            size_limit: 64 * 1024 * 1024,
            timeout: Duration::from_secs(120),
            dataset_capacity: 8,
            analysis_capacity: 64,
            tiles_url: None,
            static_dir: None,
        }
    }
}

struct StoredAnalysis {
    dataset: Arc<Dataset>,
    analysis: Analysis,
}

pub struct AppState {
    config: Config,
    datasets: Mutex<Lru<Arc<Dataset>>>,
    analyses: Mutex<Lru<Arc<StoredAnalysis>>>,
    computations: AtomicUsize,
}

impl AppState {
    pub fn new(config: Config) -> Arc<Self> {
        Arc::new(Self {
            datasets: Mutex::new(Lru::new(config.dataset_capacity)),
            analyses: Mutex::new(Lru::new(config.analysis_capacity)),
            config,
            computations: AtomicUsize::new(0),
        })
    }

    /// Number of engine invocations so far.
    pub fn computations(&self) -> usize {
        self.computations.load(Ordering::SeqCst)
    }

    fn dataset(&self, id: &str) -> Result<Arc<Dataset>, ApiError> {
        self.datasets
            .lock()
            .expect("dataset store poisoned")
            .get(id)
            .ok_or_else(|| ApiError::not_found("dataset", id))
    }

    fn analysis(&self, id: &str) -> Result<Arc<StoredAnalysis>, ApiError> {
        self.analyses
            .lock()
            .expect("analysis store poisoned")
            .get(id)
            .ok_or_else(|| ApiError::not_found("analysis", id))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let api = Router::new()
        .route("/datasets", post(upload_dataset))
        .route("/datasets/{id}/variables", get(list_variables))
        .route("/analyses", post(create_analysis))
        .route("/analyses/{id}/result", get(get_result))
        .route("/analyses/{id}/scatter", get(get_scatter))
        .route("/config", get(get_config));
    let api = match &state.config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(placeholder_index)),
    };
    api.with_state(state)
}

async fn placeholder_index() -> Html<&'static str> {
    Html(
        "<!doctype html><title>gwcorr</title>\
         <p>The web UI is not built. The JSON API is available under /datasets and /analyses.</p>",
    )
}

#[derive(Debug, Serialize)]
struct UiConfig {
    tiles_url: Option<String>,
}

async fn get_config(State(state): State<Arc<AppState>>) -> Json<UiConfig> {
    Json(UiConfig {
        tiles_url: state.config.tiles_url.clone(),
    })
}

#[derive(Debug, Deserialize, Default)]
struct UploadParams {
    format: Option<String>,
    x_col: Option<String>,
    y_col: Option<String>,
    #[serde(default)]
    assume_planar: bool,
}

#[derive(Debug, Serialize)]
struct UploadResponse<'a> {
    dataset_id: String,
    n: usize,
    geometry_kind: gwcorr_core::GeometryKind,
    projected: bool,
    schema: &'a gwcorr_core::VariableSchema,
}

fn is_csv(params: &UploadParams, headers: &HeaderMap) -> bool {
    match params.format.as_deref() {
        Some(f) => f.eq_ignore_ascii_case("csv"),
        None => headers
            .get(header::CONTENT_TYPE)
            .and_then(|v| v.to_str().ok())
            .is_some_and(|ct| ct.starts_with("text/csv")),
    }
}

async fn read_body(body: Body, limit: usize) -> Result<axum::body::Bytes, ApiError> {
    to_bytes(body, limit).await.map_err(|_| {
        ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            "PayloadTooLarge",
            format!("request body exceeds {limit} bytes"),
        )
    })
}

async fn upload_dataset(
    State(state): State<Arc<AppState>>,
    Query(params): Query<UploadParams>,
    headers: HeaderMap,
    body: Body,
) -> Result<Response, ApiError> {
    let bytes = read_body(body, state.config.size_limit).await?;
    let mode = if params.assume_planar {
        CoordMode::Planar
    } else {
        CoordMode::Auto
    };
    let csv = is_csv(&params, &headers);
    let parsed = tokio::task::spawn_blocking(move || {
        if csv {
            parse_point_csv(
                &bytes,
                params.x_col.as_deref().unwrap_or("x"),
                params.y_col.as_deref().unwrap_or("y"),
                mode,
            )
        } else {
            parse_geojson(&bytes, mode)
        }
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))?
    .map_err(|e| ApiError::core(StatusCode::BAD_REQUEST, e))?;

    let id = format!("ds-{}", uuid::Uuid::new_v4().simple());
    let dataset = Arc::new(parsed);
    let body = serde_json::to_vec(&UploadResponse {
        dataset_id: id.clone(),
        n: dataset.len(),
        geometry_kind: dataset.geometry_kind,
        projected: dataset.projected,
        schema: &dataset.schema,
    })
    .expect("serialisable");
    state
        .datasets
        .lock()
        .expect("dataset store poisoned")
        .insert(id, dataset);
    Ok((
        StatusCode::CREATED,
        [(header::CONTENT_TYPE, "application/json")],
        body,
    )
        .into_response())
}

async fn list_variables(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<gwcorr_core::VariableSchema>, ApiError> {
    Ok(Json(state.dataset(&id)?.schema.clone()))
}

#[derive(Debug, Deserialize)]
struct CreateAnalysis {
    dataset_id: String,
    #[serde(flatten)]
    request: AnalysisRequest,
}

#[derive(Debug, Serialize)]
struct CreatedAnalysis {
    analysis_id: String,
    summary: AnalysisSummary,
}

async fn create_analysis(
    State(state): State<Arc<AppState>>,
    body: Body,
) -> Result<Json<CreatedAnalysis>, ApiError> {
    let bytes = read_body(body, state.config.size_limit).await?;
    let value: serde_json::Value = serde_json::from_slice(&bytes).map_err(|e| {
        ApiError::new(StatusCode::BAD_REQUEST, "MalformedInput", format!("invalid JSON: {e}"))
    })?;
    let CreateAnalysis {
        dataset_id,
        request,
    } = serde_json::from_value(value).map_err(|e| {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "InvalidSpec", e.to_string())
    })?;
    let dataset = state.dataset(&dataset_id)?;

    state.computations.fetch_add(1, Ordering::SeqCst);
    let ds = Arc::clone(&dataset);
    let task = tokio::task::spawn_blocking(move || run_analysis(&ds, &request));
    let analysis = tokio::time::timeout(state.config.timeout, task)
        .await
        .map_err(|_| {
            ApiError::new(
                StatusCode::GATEWAY_TIMEOUT,
                "Timeout",
                format!("analysis exceeded {:?}", state.config.timeout),
            )
        })?
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))?
        .map_err(|e| ApiError::core(StatusCode::UNPROCESSABLE_ENTITY, e))?;

    let analysis_id = format!("an-{}", uuid::Uuid::new_v4().simple());
    let summary = analysis.summary(&analysis_id);
    state
        .analyses
        .lock()
        .expect("analysis store poisoned")
        .insert(analysis_id.clone(), Arc::new(StoredAnalysis { dataset, analysis }));
    Ok(Json(CreatedAnalysis {
        analysis_id,
        summary,
    }))
}

#[derive(Debug, Deserialize)]
struct PairQuery {
    pair: Option<String>,
}

fn displayed_pair(stored: &StoredAnalysis, q: &PairQuery) -> Result<(String, String), ApiError> {
    match &q.pair {
        None => Ok(stored.analysis.request.displayed()),
        Some(raw) => {
            let mut parts = raw.splitn(2, ',');
            match (parts.next(), parts.next()) {
                (Some(a), Some(b)) if !a.is_empty() && !b.is_empty() && a != b => {
                    Ok((a.to_string(), b.to_string()))
                }
                _ => Err(ApiError::new(
                    StatusCode::UNPROCESSABLE_ENTITY,
                    "InvalidPair",
                    format!("pair must be two distinct variable names as a,b; got {raw:?}"),
                )),
            }
        }
    }
}

async fn get_result(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<PairQuery>,
) -> Result<Response, ApiError> {
    let stored = state.analysis(&id)?;
    let (a, b) = displayed_pair(&stored, &q)?;
    let bytes = stored
        .analysis
        .document_bytes(&stored.dataset, (&a, &b))
        .map_err(|e| ApiError::core(StatusCode::UNPROCESSABLE_ENTITY, e))?;
    Ok(([(header::CONTENT_TYPE, "application/geo+json")], bytes).into_response())
}

async fn get_scatter(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<PairQuery>,
) -> Result<Response, ApiError> {
    let stored = state.analysis(&id)?;
    let (a, b) = displayed_pair(&stored, &q)?;
    let records = stored
        .analysis
        .scatter(&stored.dataset, (&a, &b))
        .map_err(|e| ApiError::core(StatusCode::UNPROCESSABLE_ENTITY, e))?;
    Ok(Json(records).into_response())
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: Arc<AppState>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    tracing::info!(addr = ?listener.local_addr().ok(), "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
}
