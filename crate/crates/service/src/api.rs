//! HTTP routes.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use dashlang_core::compose::{compose_page_with, export_html, ComposeError, ComposeOptions};
use dashlang_core::edit::{apply_edit, EditCommand, EditError, EditOp};
use dashlang_core::metrics::{window_series, DataProvider, MetricSeries, TimeWindow};
use dashlang_core::model::{parse_model, serialize_model, validate_model, DashboardModel, PageMode};
use serde::Deserialize;
use serde_json::{json, Value};
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::store::{DocumentStore, StoreError};

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<dyn DocumentStore>,
    /// Seed of placeholder data for widgets without a metric binding.
    pub seed: u64,
}

pub fn router(state: AppState, cors_origin: Option<&str>) -> Router {
    let router = Router::new()
        .route("/api/dashboards", get(list_dashboards).post(create_dashboard))
        .route(
            "/api/dashboards/{id}",
            get(get_dashboard).put(put_dashboard).delete(delete_dashboard),
        )
        .route("/api/dashboards/{id}/edits", axum::routing::post(post_edit))
        .route("/api/dashboards/{id}/render", get(render))
        .route("/api/dashboards/{id}/export", get(export))
        .route("/api/metrics", axum::routing::post(post_series))
        .route("/api/metrics/{id}", get(get_series))
        .with_state(state);
    match cors_origin {
        Some(origin) => router.layer(cors(origin)),
        None => router,
    }
}

fn cors(origin: &str) -> CorsLayer {
    let allow = if origin == "*" {
        AllowOrigin::any()
    } else {
        AllowOrigin::exact(HeaderValue::from_str(origin).unwrap_or(HeaderValue::from_static("null")))
    };
    CorsLayer::new()
        .allow_origin(allow)
        .allow_methods([Method::GET, Method::POST, Method::PUT, Method::DELETE])
        .allow_headers([header::CONTENT_TYPE, header::IF_MATCH])
        .expose_headers([header::ETAG])
}

/// Error response with a JSON body `{"error": {"code", "message", ...}}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl ToString) -> Self {
        ApiError {
            status,
            body: json!({"error": {"code": code, "message": message.to_string()}}),
        }
    }

    fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.body["error"][key] = value.into();
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match &e {
            StoreError::NotFound(_) => ApiError::new(StatusCode::NOT_FOUND, "NOT_FOUND", e),
            StoreError::AlreadyExists(_) => ApiError::new(StatusCode::CONFLICT, "ALREADY_EXISTS", e),
            StoreError::Conflict { expected, actual } => ApiError::new(StatusCode::CONFLICT, "REVISION_CONFLICT", &e)
                .with("expectedRevision", *expected)
                .with("currentRevision", *actual),
            StoreError::InvalidId(_) => ApiError::new(StatusCode::BAD_REQUEST, "INVALID_ID", e),
            StoreError::InvalidSeries(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "INVALID_SERIES", e),
            StoreError::Corrupt { .. } | StoreError::Io(_) => {
                tracing::error!(error = %e, "store failure");
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "STORE_ERROR", e)
            }
        }
    }
}

impl From<EditError> for ApiError {
    fn from(e: EditError) -> Self {
        match &e {
            EditError::TargetNotFound(target) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "TARGET_NOT_FOUND", &e).with("target", target.as_str())
            }
            EditError::InvalidPayload { rule, .. } => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "INVALID_PAYLOAD", &e).with("rule", rule.as_str())
            }
            EditError::IllegalEdit(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "ILLEGAL_EDIT", e),
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Run blocking store and rendering work off the async workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL", e))?
}

fn json_text(status: StatusCode, text: String, revision: Option<u64>) -> Response {
    let mut response = (status, [(header::CONTENT_TYPE, "application/json")], text).into_response();
    if let Some(r) = revision {
        response
            .headers_mut()
            .insert(header::ETAG, HeaderValue::from_str(&format!("\"{r}\"")).expect("digits"));
    }
    response
}

/// Parse and validate a model body.
fn model_body(body: &[u8]) -> ApiResult<DashboardModel> {
    let text = std::str::from_utf8(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "BAD_ENCODING", e))?;
    let model = parse_model(text).map_err(|e| {
        let path = e.path().map(str::to_string);
        let err = ApiError::new(StatusCode::BAD_REQUEST, "PARSE_ERROR", &e);
        match path {
            Some(p) => err.with("path", p),
            None => err,
        }
    })?;
    let report = validate_model(&model);
    if let Some(first) = report.violations.first() {
        let violations: Vec<Value> = report
            .violations
            .iter()
            .map(|v| json!({"rule": v.rule.as_str(), "path": v.path, "message": v.message}))
            .collect();
        return Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "VALIDATION_FAILED", first)
            .with("rule", first.rule.as_str())
            .with("violations", violations));
    }
    Ok(model)
}

fn if_match(headers: &HeaderMap) -> ApiResult<u64> {
    let value = headers.get(header::IF_MATCH).ok_or_else(|| {
        ApiError::new(StatusCode::PRECONDITION_REQUIRED, "REVISION_REQUIRED", "If-Match revision header is required")
    })?;
    value
        .to_str()
        .ok()
        .map(|s| s.trim().trim_start_matches("W/").trim_matches('"'))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "BAD_REVISION", "If-Match must be a revision number"))
}

async fn list_dashboards(State(state): State<AppState>) -> ApiResult<Response> {
    let list = blocking(move || Ok(state.store.list_models()?)).await?;
    Ok(Json(list).into_response())
}

async fn create_dashboard(State(state): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let model = model_body(&body)?;
    let id = model.id.clone();
    let revision = blocking(move || Ok(state.store.put_model(&model, None)?)).await?;
    let location = format!("/api/dashboards/{id}");
    let mut response = (StatusCode::CREATED, Json(json!({"id": id, "revision": revision}))).into_response();
    if let Ok(v) = HeaderValue::from_str(&location) {
        response.headers_mut().insert(header::LOCATION, v);
    }
    Ok(response)
}

async fn get_dashboard(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let model = blocking(move || Ok(state.store.get_model(&id)?)).await?;
    Ok(json_text(StatusCode::OK, serialize_model(&model), Some(model.revision)))
}

async fn put_dashboard(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Response> {
    let expected = if_match(&headers)?;
    let model = model_body(&body)?;
    if model.id != id {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "ID_MISMATCH",
            format!("body id `{}` does not match `{id}`", model.id),
        ));
    }
    let revision = blocking(move || Ok(state.store.put_model(&model, Some(expected))?)).await?;
    Ok(Json(json!({"revision": revision})).into_response())
}

async fn delete_dashboard(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    blocking(move || Ok(state.store.delete_model(&id)?)).await?;
    Ok(StatusCode::NO_CONTENT)
}

async fn post_edit(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let mut value: Value =
        serde_json::from_slice(&body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "PARSE_ERROR", e))?;
    let expected = match value.as_object_mut().and_then(|o| o.remove("expectedRevision")) {
        Some(v) => v
            .as_u64()
            .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "BAD_REVISION", "expectedRevision must be a number"))?,
        None => {
            return Err(ApiError::new(
                StatusCode::PRECONDITION_REQUIRED,
                "REVISION_REQUIRED",
                "expectedRevision is required",
            ))
        }
    };
    let cmd: EditCommand = serde_json::from_value(value)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "INVALID_COMMAND", e).with("rule", "INVALID_COMMAND"))?;

    blocking(move || {
        let current = state.store.get_model(&id)?;
        if current.revision != expected {
            return Err(StoreError::Conflict {
                expected,
                actual: current.revision,
            }
            .into());
        }
        // Switching dashboards selects another document; nothing is written.
        if let EditOp::SwitchModel { dashboard_id } = &cmd.op {
            let other = state.store.get_model(dashboard_id)?;
            return Ok(Json(json!({"revision": current.revision, "activeDashboardId": other.id, "activeRevision": other.revision})).into_response());
        }
        let next = apply_edit(&current, &cmd)?;
        let revision = state.store.put_model(&next, Some(expected))?;
        Ok(Json(json!({"revision": revision})).into_response())
    })
    .await
}

#[derive(Deserialize)]
struct PageQuery {
    page: Option<String>,
    mode: Option<String>,
}

struct StoreData(Arc<dyn DocumentStore>);

impl DataProvider for StoreData {
    fn series(&self, id: &str) -> Option<MetricSeries> {
        self.0.get_series(id).ok()
    }
}

fn compose(state: &AppState, id: &str, query: &PageQuery) -> ApiResult<dashlang_core::compose::RenderTree> {
    let mode = match query.mode.as_deref() {
        None => PageMode::Full,
        Some(m) => m
            .parse::<PageMode>()
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "BAD_MODE", e))?,
    };
    let model = state.store.get_model(id)?;
    let page = query.page.clone().unwrap_or_else(|| model.pages[0].id.clone());
    let options = ComposeOptions {
        seed: state.seed,
        ..ComposeOptions::default()
    };
    compose_page_with(&model, &page, &StoreData(state.store.clone()), mode, options).map_err(|e| match e {
        ComposeError::UnknownPage(_) => ApiError::new(StatusCode::NOT_FOUND, "UNKNOWN_PAGE", e),
    })
}

async fn render(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(query): Query<PageQuery>,
) -> ApiResult<Response> {
    let tree = blocking(move || compose(&state, &id, &query)).await?;
    Ok(json_text(StatusCode::OK, tree.to_json(), None))
}

async fn export(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(query): Query<PageQuery>,
) -> ApiResult<Response> {
    let html = blocking(move || compose(&state, &id, &query).map(|t| export_html(&t))).await?;
    Ok(([(header::CONTENT_TYPE, "text/html; charset=utf-8")], html).into_response())
}

#[derive(Deserialize)]
struct WindowQuery {
    from: Option<i64>,
    to: Option<i64>,
}

async fn get_series(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(window): Query<WindowQuery>,
) -> ApiResult<Response> {
    let series = blocking(move || Ok(state.store.get_series(&id)?)).await?;
    let window = match (window.from, window.to) {
        (None, None) => None,
        (from, to) => Some(TimeWindow::new(from.unwrap_or(i64::MIN), to.unwrap_or(i64::MAX))),
    };
    Ok(json_text(StatusCode::OK, window_series(&series, window).to_json(), None))
}

async fn post_series(State(state): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let text = std::str::from_utf8(&body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "BAD_ENCODING", e))?;
    let series = MetricSeries::from_json(text).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "PARSE_ERROR", e))?;
    let id = series.id.clone();
    blocking(move || Ok(state.store.put_series(&series)?)).await?;
    Ok((StatusCode::CREATED, Json(json!({"id": id}))).into_response())
}
