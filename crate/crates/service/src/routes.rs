use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use insight_core::{
    ingest_csv, ColumnKind, CsvOptions, Engine, ExplorationState, InsightClass, InsightDescriptor,
    InsightQuery, Mode,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::{ApiError, AppState, DatasetEntry, API_VERSION, MAX_PAGE};

type ApiResult = Result<Response, ApiError>;

/// Wraps a payload object with the API version.
fn reply(status: StatusCode, body: Value) -> Response {
    let mut body = body;
    if let Value::Object(map) = &mut body {
        map.insert("api_version".into(), API_VERSION.into());
    }
    (status, Json(body)).into_response()
}

fn ok(body: Value) -> ApiResult {
    Ok(reply(StatusCode::OK, body))
}

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    Ok(serde_json::from_slice(body)?)
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, ApiError> {
    serde_json::to_value(v).map_err(|e| ApiError::internal(e.to_string()))
}

/// Runs engine work off the async workers.
async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> Result<T, ApiError> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

fn check_limit(limit: usize) -> Result<(), ApiError> {
    if limit == 0 || limit > MAX_PAGE {
        return Err(ApiError::bad_request(format!(
            "limit must be between 1 and {MAX_PAGE}"
        )));
    }
    Ok(())
}

pub async fn health() -> ApiResult {
    ok(json!({ "status": "ok" }))
}

pub async fn not_found() -> ApiError {
    ApiError::new(crate::ErrorCode::NotFound, "no such route")
}

pub async fn classes() -> ApiResult {
    let specs: Vec<_> = InsightClass::ALL.iter().map(|c| c.spec()).collect();
    ok(json!({ "classes": to_value(&specs)? }))
}

#[derive(Debug, Deserialize)]
pub struct UploadParams {
    name: Option<String>,
    delimiter: Option<char>,
    has_header: Option<bool>,
    null_token: Option<String>,
}

fn dataset_info(entry: &DatasetEntry) -> Value {
    let ds = entry.engine.dataset();
    let columns: Vec<Value> = ds
        .columns()
        .iter()
        .map(|c| {
            json!({
                "name": c.name(),
                "kind": match c.kind() { ColumnKind::Numeric => "numeric", ColumnKind::Categorical => "categorical" },
                "valid_count": c.valid_count(),
            })
        })
        .collect();
    json!({
        "id": entry.id,
        "name": ds.name(),
        "fingerprint": ds.fingerprint_hex(),
        "n_rows": ds.n_rows(),
        "columns": columns,
    })
}

pub async fn upload(
    State(app): State<AppState>,
    Query(p): Query<UploadParams>,
    body: Bytes,
) -> ApiResult {
    let mut options = CsvOptions::default();
    if let Some(d) = p.delimiter {
        if !d.is_ascii() {
            return Err(ApiError::bad_request(
                "delimiter must be a single ASCII character",
            ));
        }
        options.delimiter = d as u8;
    }
    if let Some(h) = p.has_header {
        options.has_header = h;
    }
    if let Some(t) = p.null_token {
        options.null_token = t;
    }
    let name = p.name.unwrap_or_else(|| "upload".into());
    let config = app.config().clone();
    let engine = blocking(move || {
        let ds = ingest_csv(&name, body.as_ref(), &options)?;
        Ok(Engine::new(ds, config))
    })
    .await?;
    let entry = app.add_engine(engine, None);
    Ok(reply(StatusCode::CREATED, dataset_info(&entry)))
}

pub async fn list_datasets(State(app): State<AppState>) -> ApiResult {
    let mut out = Vec::new();
    for id in app.dataset_ids() {
        out.push(dataset_info(&*app.dataset(&id)?));
    }
    ok(json!({ "datasets": out }))
}

pub async fn get_dataset(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult {
    ok(dataset_info(&*app.dataset(&id)?))
}

pub async fn precompute_progress(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let entry = app.dataset(&id)?;
    ok(to_value(&entry.progress.view())?)
}

pub async fn query(State(app): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let entry = app.dataset(&id)?;
    let q: InsightQuery = parse(&body)?;
    check_limit(q.limit)?;
    let engine = entry.engine.clone();
    let insights = blocking(move || Ok(engine.rank(&q)?)).await?;
    ok(json!({ "insights": to_value(&insights)? }))
}

#[derive(Debug, Deserialize)]
struct VisualizeBody {
    insight: InsightDescriptor,
}

pub async fn visualize(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let entry = app.dataset(&id)?;
    let VisualizeBody { insight } = parse(&body)?;
    let engine = entry.engine.clone();
    let payload = blocking(move || Ok(engine.visualize(&insight)?)).await?;
    ok(json!({ "visualization": to_value(&payload)? }))
}

#[derive(Debug, Deserialize)]
pub struct ModeParam {
    mode: Option<String>,
}

pub async fn overview(
    State(app): State<AppState>,
    Path((id, class)): Path<(String, String)>,
    Query(p): Query<ModeParam>,
) -> ApiResult {
    let entry = app.dataset(&id)?;
    let class: InsightClass = class.parse()?;
    let mode: Mode = p.mode.as_deref().unwrap_or("auto").parse()?;
    let engine = entry.engine.clone();
    let view = blocking(move || Ok(engine.overview(class, mode))).await?;
    ok(json!({ "overview": to_value(&view)? }))
}

#[derive(Debug, Deserialize)]
struct NeighborhoodBody {
    focus: InsightDescriptor,
    #[serde(default = "default_neighbors")]
    limit: usize,
}

fn default_neighbors() -> usize {
    insight_core::query::DEFAULT_LIMIT
}

pub async fn neighborhood(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let entry = app.dataset(&id)?;
    let b: NeighborhoodBody = parse(&body)?;
    check_limit(b.limit)?;
    let engine = entry.engine.clone();
    let near = blocking(move || Ok(engine.neighborhood(&b.focus, b.limit)?)).await?;
    ok(json!({ "neighbors": to_value(&near)? }))
}

fn session_view(id: &str, dataset_id: &str, state: &ExplorationState) -> Result<Value, ApiError> {
    Ok(json!({ "session_id": id, "dataset_id": dataset_id, "state": to_value(state)? }))
}

fn created_session(app: &AppState, dataset_id: String, state: ExplorationState) -> ApiResult {
    let view = session_view("", &dataset_id, &state)?;
    let (sid, _) = app.add_session(dataset_id, state);
    let mut view = view;
    view["session_id"] = sid.into();
    Ok(reply(StatusCode::CREATED, view))
}

#[derive(Debug, Deserialize)]
struct CreateSession {
    dataset_id: String,
}

pub async fn create_session(State(app): State<AppState>, body: Bytes) -> ApiResult {
    let CreateSession { dataset_id } = parse(&body)?;
    let entry = app.dataset(&dataset_id)?;
    let engine = entry.engine.clone();
    let state = blocking(move || Ok(ExplorationState::new(&engine)?)).await?;
    created_session(&app, dataset_id, state)
}

#[derive(Debug, Deserialize)]
struct LoadSession {
    dataset_id: String,
    /// A saved state, either as the JSON object or as its serialized string.
    document: Value,
}

pub async fn load_session(State(app): State<AppState>, body: Bytes) -> ApiResult {
    let LoadSession {
        dataset_id,
        document,
    } = parse(&body)?;
    let entry = app.dataset(&dataset_id)?;
    let doc = match document {
        Value::String(s) => s,
        other => other.to_string(),
    };
    let engine = entry.engine.clone();
    let state = blocking(move || Ok(ExplorationState::load(&doc, &engine)?)).await?;
    created_session(&app, dataset_id, state)
}

/// Applies `f` to a session's state on the blocking pool and returns the new view.
async fn mutate<F>(app: &AppState, sid: &str, f: F) -> Result<(Value, Option<String>), ApiError>
where
    F: FnOnce(&mut ExplorationState, &Engine) -> Result<Option<String>, ApiError> + Send + 'static,
{
    let session = app.session(sid)?;
    let engine = app.dataset(&session.dataset_id)?.engine.clone();
    let mut guard = session.state.lock().await;
    let mut working = guard.clone();
    let (working, note) = blocking(move || {
        let note = f(&mut working, &engine)?;
        Ok((working, note))
    })
    .await?;
    *guard = working;
    Ok((session_view(sid, &session.dataset_id, &guard)?, note))
}

pub async fn get_session(State(app): State<AppState>, Path(sid): Path<String>) -> ApiResult {
    let session = app.session(&sid)?;
    let state = session.state.lock().await;
    ok(session_view(&sid, &session.dataset_id, &state)?)
}

#[derive(Debug, Deserialize)]
struct InsightBody {
    insight: InsightDescriptor,
}

pub async fn focus(State(app): State<AppState>, Path(sid): Path<String>, body: Bytes) -> ApiResult {
    let InsightBody { insight } = parse(&body)?;
    let (view, _) = mutate(&app, &sid, move |s, e| {
        s.focus(e, insight)?;
        Ok(None)
    })
    .await?;
    ok(view)
}

pub async fn unfocus(
    State(app): State<AppState>,
    Path(sid): Path<String>,
    body: Bytes,
) -> ApiResult {
    let InsightBody { insight } = parse(&body)?;
    let (mut view, warning) = mutate(&app, &sid, move |s, e| Ok(s.unfocus(e, &insight)?)).await?;
    view["warning"] = warning.map_or(Value::Null, Value::String);
    ok(view)
}

pub async fn set_constraint(
    State(app): State<AppState>,
    Path(sid): Path<String>,
    body: Bytes,
) -> ApiResult {
    let q: InsightQuery = parse(&body)?;
    check_limit(q.limit)?;
    let (view, _) = mutate(&app, &sid, move |s, e| {
        s.set_constraint(e, q)?;
        Ok(None)
    })
    .await?;
    ok(view)
}

pub async fn clear_constraint(
    State(app): State<AppState>,
    Path((sid, class)): Path<(String, String)>,
) -> ApiResult {
    let class: InsightClass = class.parse()?;
    let (view, _) = mutate(&app, &sid, move |s, e| {
        s.clear_constraint(e, class)?;
        Ok(None)
    })
    .await?;
    ok(view)
}

pub async fn save_session(State(app): State<AppState>, Path(sid): Path<String>) -> ApiResult {
    let session = app.session(&sid)?;
    let state = session.state.lock().await;
    let document: Value =
        serde_json::from_str(&state.save()).map_err(|e| ApiError::internal(e.to_string()))?;
    ok(json!({ "session_id": sid, "document": document }))
}
