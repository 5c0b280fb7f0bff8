//! HTTP JSON service.
//!
//! - `POST /datasets` with a CSV body registers a dataset and returns its id
//!   and inferred schema.
//! - `GET /datasets/{id}/layout?<plot request>` returns the layout JSON.
//! - `GET /datasets/{id}/stats?x=&y=&s=` returns overlap indices.
//! - `GET /datasets/{id}/transition?from=&to=&t=` returns the interpolated
//!   layout between two plot requests.
//!
//! Bodies are canonical JSON. Errors are `{"errors": [{field, message}]}`
//! with status 404 for unknown datasets and 422 for invalid requests.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, RawQuery, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use gatherplot_core::json::to_canonical_string;
use gatherplot_core::model::{read_csv, Dataset};
use gatherplot_core::stats::{dataset_stats, StatsError};
use gatherplot_core::transitions::{interpolate, TransitionPlan, DEFAULT_DURATION_MS};
use gatherplot_core::{plot, Layout, ModelError};
use serde_json::json;

use crate::request::{layout_field_error, FieldError, PlotRequest, RequestErrors, StatsRequest, TransitionRequest};

pub const DEFAULT_PORT: u16 = 8080;
pub const PORT_ENV: &str = "GATHERPLOT_PORT";

/// Insert-only dataset registry. Stored datasets are never modified.
#[derive(Debug, Default)]
pub struct Registry {
    datasets: RwLock<HashMap<u64, Arc<Dataset>>>,
    next_id: AtomicU64,
}

impl Registry {
    pub fn insert(&self, dataset: Dataset) -> u64 {
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        self.datasets
            .write()
            .expect("registry lock poisoned")
            .insert(id, Arc::new(dataset));
        id
    }

    pub fn get(&self, id: u64) -> Option<Arc<Dataset>> {
        self.datasets.read().expect("registry lock poisoned").get(&id).cloned()
    }
}

pub fn router(registry: Arc<Registry>) -> Router {
    Router::new()
        .route("/datasets", post(create_dataset))
        .route("/datasets/{id}/layout", get(layout))
        .route("/datasets/{id}/stats", get(stats))
        .route("/datasets/{id}/transition", get(transition))
        .with_state(registry)
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

#[derive(Debug)]
pub enum ApiError {
    NotFound(String),
    Invalid(RequestErrors),
}

impl From<RequestErrors> for ApiError {
    fn from(e: RequestErrors) -> ApiError {
        ApiError::Invalid(e)
    }
}

impl From<FieldError> for ApiError {
    fn from(e: FieldError) -> ApiError {
        ApiError::Invalid(e.into())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, errors) = match self {
            ApiError::NotFound(id) => (
                StatusCode::NOT_FOUND,
                vec![FieldError::new("id", format!("no dataset `{id}`"))],
            ),
            ApiError::Invalid(RequestErrors(errors)) => (StatusCode::UNPROCESSABLE_ENTITY, errors),
        };
        json_response(status, to_canonical_string(&json!({ "errors": errors })))
    }
}

fn lookup(registry: &Registry, id: &str) -> Result<Arc<Dataset>, ApiError> {
    id.parse::<u64>()
        .ok()
        .and_then(|n| registry.get(n))
        .ok_or_else(|| ApiError::NotFound(id.to_string()))
}

/// Layout for `req`, exactly as the library computes it.
pub fn compute_layout(dataset: &Dataset, req: &PlotRequest) -> Result<Layout, RequestErrors> {
    let (cfg, opts) = req.resolve(dataset)?;
    plot(dataset, &cfg, &opts).map_err(|e| layout_field_error(&e).into())
}

/// `{id, rows, schema}` for a registered dataset.
pub fn dataset_summary(id: Option<u64>, dataset: &Dataset) -> serde_json::Value {
    let mut v = json!({
        "rows": dataset.len(),
        "schema": dataset.dimensions(),
    });
    if let Some(id) = id {
        v["id"] = json!(id);
    }
    v
}

async fn create_dataset(State(registry): State<Arc<Registry>>, body: Bytes) -> Result<Response, ApiError> {
    let dataset = read_csv(body.as_ref()).map_err(|e| FieldError::new("body", e.to_string()))?;
    let summary = dataset_summary(None, &dataset);
    let id = registry.insert(dataset);
    let mut summary = summary;
    summary["id"] = json!(id);
    Ok(json_response(StatusCode::CREATED, to_canonical_string(&summary)))
}

async fn layout(
    State(registry): State<Arc<Registry>>,
    Path(id): Path<String>,
    RawQuery(query): RawQuery,
) -> Result<Response, ApiError> {
    let dataset = lookup(&registry, &id)?;
    let req = PlotRequest::from_query(query.as_deref().unwrap_or(""))?;
    let layout = compute_layout(&dataset, &req)?;
    Ok(json_response(StatusCode::OK, layout.to_json()))
}

async fn stats(
    State(registry): State<Arc<Registry>>,
    Path(id): Path<String>,
    RawQuery(query): RawQuery,
) -> Result<Response, ApiError> {
    let dataset = lookup(&registry, &id)?;
    let req = StatsRequest::from_query(query.as_deref().unwrap_or(""))?;
    let stats = dataset_stats(&dataset, req.x.as_deref(), req.y.as_deref(), req.mark_size).map_err(|e| {
        let field = match &e {
            StatsError::Model(ModelError::UnknownDimension(d)) if req.x.as_deref() != Some(d.as_str()) => "y",
            StatsError::Model(_) => "x",
            StatsError::Scale(_) => "s",
        };
        FieldError::new(field, e.to_string())
    })?;
    let body = serde_json::to_value(stats).expect("stats serialize");
    Ok(json_response(StatusCode::OK, to_canonical_string(&body)))
}

/// Interpolated layout for a transition request.
pub fn compute_transition(dataset: &Dataset, req: &TransitionRequest) -> Result<Layout, RequestErrors> {
    let prefix = |field: &str, e: RequestErrors| {
        RequestErrors(
            e.0.into_iter()
                .map(|fe| FieldError::new(format!("{field}.{}", fe.field), fe.message))
                .collect(),
        )
    };
    let from = compute_layout(dataset, &req.from).map_err(|e| prefix("from", e));
    let to = compute_layout(dataset, &req.to).map_err(|e| prefix("to", e));
    let (from, to) = match (from, to) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => {
            let mut errors = Vec::new();
            errors.extend(a.err().into_iter().flat_map(|e| e.0));
            errors.extend(b.err().into_iter().flat_map(|e| e.0));
            return Err(RequestErrors(errors));
        }
    };
    let plan = TransitionPlan::new(from, to, DEFAULT_DURATION_MS, req.easing)
        .map_err(|e| FieldError::new("to", e.to_string()))?;
    interpolate(&plan, req.t).map_err(|e| FieldError::new("t", e.to_string()).into())
}

async fn transition(
    State(registry): State<Arc<Registry>>,
    Path(id): Path<String>,
    RawQuery(query): RawQuery,
) -> Result<Response, ApiError> {
    let dataset = lookup(&registry, &id)?;
    let req = TransitionRequest::from_query(query.as_deref().unwrap_or(""))?;
    let layout = compute_transition(&dataset, &req)?;
    Ok(json_response(StatusCode::OK, layout.to_json()))
}

/// Port from [`PORT_ENV`], falling back to [`DEFAULT_PORT`].
pub fn port_from_env() -> Result<u16, String> {
    match std::env::var(PORT_ENV) {
        Ok(v) => v.parse().map_err(|_| format!("{PORT_ENV}: `{v}` is not a port number")),
        Err(_) => Ok(DEFAULT_PORT),
    }
}

pub async fn serve(port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(Registry::default())))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
