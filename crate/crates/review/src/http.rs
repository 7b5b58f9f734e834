//! JSON over HTTP. Errors come back as `{"error": code, "message": text}`
//! with the current `version` added to stale-version conflicts.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use oncoextract::eval::disagreements;
use oncoextract::resolver::EndpointObservation;
use oncoextract::schema::EntitySpan;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::ReviewError;
use crate::export::{export_state, ExportView, RECONCILED_FILE, SELECTED_FILE};
use crate::service::CorpusService;
use crate::state::{Action, Correction, ReviewState, SelectionMark, SpanRef, RECONCILED};

pub const DEFAULT_PAGE: usize = 100;
pub const MAX_PAGE: usize = 1000;

type Services = Arc<BTreeMap<String, Arc<CorpusService>>>;

pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> ApiError {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: json!({"error": "bad_request", "message": message.into()}),
        }
    }
}

impl From<ReviewError> for ApiError {
    fn from(err: ReviewError) -> Self {
        let status = match &err {
            ReviewError::NotFound(_) => StatusCode::NOT_FOUND,
            ReviewError::OverlapConflict { .. } | ReviewError::StaleVersion { .. } => StatusCode::CONFLICT,
            ReviewError::Invalid(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ReviewError::Io { .. } | ReviewError::CorruptLog { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let mut body = json!({"error": err.code(), "message": err.to_string()});
        if let ReviewError::StaleVersion { current, .. } = err {
            body["version"] = json!(current);
        }
        ApiError { status, body }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(err: JsonRejection) -> Self {
        ApiError {
            status: err.status(),
            body: json!({"error": "bad_request", "message": err.body_text()}),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn service(services: &Services, id: &str) -> ApiResult<Arc<CorpusService>> {
    services.get(id).cloned().ok_or_else(|| ReviewError::NotFound(format!("corpus `{id}`")).into())
}

/// Routes for every service, keyed by corpus id.
pub fn router(services: Vec<CorpusService>) -> Router {
    let map: BTreeMap<String, Arc<CorpusService>> = services.into_iter().map(|s| (s.id().to_string(), Arc::new(s))).collect();
    Router::new()
        .route("/healthz", get(healthz))
        .route("/corpora", get(list_corpora))
        .route("/corpora/{id}/sentences", get(list_sentences))
        .route("/corpora/{id}/sentences/{sid}/annotations", get(sentence_annotations))
        .route("/corpora/{id}/observations", get(list_observations))
        .route("/corpora/{id}/corrections", post(post_correction))
        .route("/corpora/{id}/selections", post(post_selection))
        .route("/corpora/{id}/disagreements", get(list_disagreements))
        .route("/corpora/{id}/export", get(export))
        .with_state(Arc::new(map))
}

/// Serves until interrupted.
pub async fn serve(router: Router, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// Builds a runtime and serves on it.
pub fn serve_blocking(services: Vec<CorpusService>, addr: SocketAddr) -> std::io::Result<()> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?
        .block_on(serve(router(services), addr))
}

async fn healthz() -> Json<Value> {
    Json(json!({"status": "ok"}))
}

async fn list_corpora(State(services): State<Services>) -> Json<Value> {
    let items: Vec<Value> = services
        .values()
        .map(|s| {
            let state = s.state();
            json!({
                "id": s.id(),
                "sentences": state.corpus().len(),
                "sources": state.sources().iter().map(|a| a.source.as_str()).collect::<Vec<_>>(),
                "version": state.version(),
            })
        })
        .collect();
    Json(json!({ "corpora": items }))
}

#[derive(Deserialize)]
struct Page {
    offset: Option<usize>,
    limit: Option<usize>,
}

async fn list_sentences(State(services): State<Services>, Path(id): Path<String>, Query(page): Query<Page>) -> ApiResult<Json<Value>> {
    let state = service(&services, &id)?.state();
    let offset = page.offset.unwrap_or(0);
    let limit = page.limit.unwrap_or(DEFAULT_PAGE).clamp(1, MAX_PAGE);
    let sentences: Vec<_> = state.corpus().sentences().skip(offset).take(limit).collect();
    Ok(Json(json!({
        "total": state.corpus().len(),
        "offset": offset,
        "limit": limit,
        "sentences": sentences,
    })))
}

#[derive(Deserialize)]
struct LayerQuery {
    source: Option<String>,
}

async fn sentence_annotations(
    State(services): State<Services>,
    Path((id, sid)): Path<(String, String)>,
    Query(q): Query<LayerQuery>,
) -> ApiResult<Json<Value>> {
    let state = service(&services, &id)?.state();
    let sentence = state.corpus().sentence(&sid).ok_or_else(|| ReviewError::NotFound(format!("sentence `{sid}`")))?;
    let names: Vec<&str> = match &q.source {
        Some(name) => {
            state.layer(name).ok_or_else(|| ReviewError::NotFound(format!("source `{name}`")))?;
            vec![name.as_str()]
        }
        None => state.layer_names(),
    };
    let layers: BTreeMap<&str, &[EntitySpan]> = names.into_iter().map(|n| (n, state.layer(n).map(|l| l.get(&sid)).unwrap_or(&[]))).collect();
    Ok(Json(json!({
        "sentence_id": sid,
        "text": sentence.text,
        "version": state.version(),
        "layers": layers,
    })))
}

#[derive(Serialize)]
struct ObservationView<'a> {
    #[serde(flatten)]
    observation: &'a EndpointObservation,
    selected: bool,
    reviewer: Option<&'a str>,
}

async fn list_observations(State(services): State<Services>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let state = service(&services, &id)?.state();
    let observations: Vec<ObservationView> = state
        .observations()
        .map(|o| {
            let pick = state.selections().get(&o.id);
            ObservationView {
                observation: o,
                selected: pick.is_some(),
                reviewer: pick.map(|p| p.reviewer.as_str()),
            }
        })
        .collect();
    let diagnostics: Vec<_> = state.diagnostics().collect();
    Ok(Json(json!({
        "version": state.version(),
        "observations": observations,
        "diagnostics": diagnostics,
    })))
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

#[derive(Deserialize)]
struct CorrectionRequest {
    base_version: u64,
    sentence_id: String,
    action: Action,
    span: SpanRef,
    author: String,
    timestamp: Option<String>,
}

async fn post_correction(
    State(services): State<Services>,
    Path(id): Path<String>,
    body: Result<Json<CorrectionRequest>, JsonRejection>,
) -> ApiResult<Json<Value>> {
    let Json(req) = body?;
    if req.author.trim().is_empty() {
        return Err(ApiError::bad_request("author must not be empty"));
    }
    let svc = service(&services, &id)?;
    let sentence_id = req.sentence_id.clone();
    let correction = Correction {
        sentence_id: req.sentence_id,
        action: req.action,
        span: req.span,
        author: req.author,
        timestamp: req.timestamp.unwrap_or_else(now),
    };
    let state = blocking(move || svc.correct(req.base_version, correction)).await?;
    Ok(Json(json!({
        "version": state.version(),
        "sentence_id": sentence_id,
        "spans": state.reconciled().get(&sentence_id),
    })))
}

#[derive(Deserialize)]
struct SelectionRequest {
    base_version: Option<u64>,
    observation_id: String,
    selected: bool,
    reviewer: String,
    timestamp: Option<String>,
}

async fn post_selection(
    State(services): State<Services>,
    Path(id): Path<String>,
    body: Result<Json<SelectionRequest>, JsonRejection>,
) -> ApiResult<Json<Value>> {
    let Json(req) = body?;
    if req.reviewer.trim().is_empty() {
        return Err(ApiError::bad_request("reviewer must not be empty"));
    }
    let svc = service(&services, &id)?;
    let observation_id = req.observation_id.clone();
    let mark = SelectionMark {
        observation_id: req.observation_id,
        selected: req.selected,
        reviewer: req.reviewer,
        timestamp: req.timestamp.unwrap_or_else(now),
    };
    let state = blocking(move || svc.select(req.base_version, mark)).await?;
    Ok(Json(json!({
        "version": state.version(),
        "observation_id": observation_id,
        "selected": state.selections().contains_key(&observation_id),
    })))
}

/// Mutations write to disk, so they run off the async workers.
async fn blocking(f: impl FnOnce() -> crate::Result<Arc<ReviewState>> + Send + 'static) -> ApiResult<Arc<ReviewState>> {
    match tokio::task::spawn_blocking(f).await {
        Ok(result) => Ok(result?),
        Err(e) => Err(ReviewError::io("<worker>", e).into()),
    }
}

#[derive(Deserialize)]
struct PairQuery {
    a: Option<String>,
    b: Option<String>,
    /// `pending` or `resolved`; both when absent.
    status: Option<String>,
}

/// Compares two layers. Defaults to the first two sources, or the only
/// source against the reconciled set.
async fn list_disagreements(State(services): State<Services>, Path(id): Path<String>, Query(q): Query<PairQuery>) -> ApiResult<Json<Value>> {
    let state = service(&services, &id)?.state();
    let names = state.layer_names();
    let default_b = if names.len() > 2 { names[1] } else { RECONCILED };
    let a = q.a.as_deref().unwrap_or(names[0]);
    let b = q.b.as_deref().unwrap_or(default_b);
    if let Some(s) = q.status.as_deref().filter(|s| !matches!(*s, "pending" | "resolved")) {
        return Err(ApiError::bad_request(format!("unknown status `{s}`")));
    }
    let layer = |n: &str| state.layer(n).ok_or_else(|| ApiError::from(ReviewError::NotFound(format!("source `{n}`"))));
    let diffs = disagreements(layer(a)?, layer(b)?, state.corpus()).map_err(ReviewError::from)?;
    let items: Vec<Value> = diffs
        .into_iter()
        .map(|d| {
            let text = state.corpus().sentence(&d.sentence_id).map(|s| s.text.as_str()).unwrap_or_default();
            let status = if state.is_corrected(&d.sentence_id) { "resolved" } else { "pending" };
            json!({
                "sentence_id": d.sentence_id,
                "text": text,
                "status": status,
                "only_a": d.only_a,
                "only_b": d.only_b,
                "conflicts": d.conflicts,
            })
        })
        .filter(|item: &Value| q.status.as_deref().is_none_or(|s| item["status"] == s))
        .collect();
    Ok(Json(json!({"version": state.version(), "a": a, "b": b, "items": items})))
}

#[derive(Deserialize)]
struct ViewQuery {
    view: Option<String>,
}

async fn export(State(services): State<Services>, Path(id): Path<String>, Query(q): Query<ViewQuery>) -> ApiResult<Response> {
    let state = service(&services, &id)?.state();
    let view: ExportView = q.view.as_deref().unwrap_or("full").parse().map_err(ApiError::bad_request)?;
    let mut files = export_state(&state, view);
    let version = HeaderValue::from(state.version());
    let mut response = match view {
        ExportView::ReconciledAnnotations => ([(header::CONTENT_TYPE, "application/x-ndjson")], files.remove(RECONCILED_FILE).unwrap_or_default()).into_response(),
        ExportView::SelectedObservations => ([(header::CONTENT_TYPE, "text/tab-separated-values")], files.remove(SELECTED_FILE).unwrap_or_default()).into_response(),
        ExportView::Full => Json(json!({"version": state.version(), "files": files})).into_response(),
    };
    response.headers_mut().insert("x-state-version", version);
    Ok(response)
}
