//! Read-only HTTP API over a shared, immutable search index.
//!
//! Endpoints:
//!
//! * `GET /api/v1/search?q=&limit=&classes=&include_dead=&min_score=`
//! * `GET /api/v1/records/{serial}`
//! * `GET /api/v1/healthz`
//!
//! Errors are returned as `{"error": CODE, "message": str}`.

use std::collections::BTreeSet;
use std::future::Future;
use std::io;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use knockout_core::corpus::{Status, TrademarkRecord, MAX_CLASS, MIN_CLASS};
use knockout_core::search::{knockout_search_detailed, SearchError, SearchResult};
use knockout_core::{EngineProfile, Index, RiskBand};
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;

pub const EMPTY_QUERY: &str = "EMPTY_QUERY";
pub const BAD_PARAM: &str = "BAD_PARAM";
pub const NOT_FOUND: &str = "NOT_FOUND";

/// Index plus the engine profile whose defaults every request starts from.
pub struct AppState {
    index: Arc<Index>,
    profile: EngineProfile,
}

impl AppState {
    pub fn new(index: Arc<Index>, profile: EngineProfile) -> Self {
        Self { index, profile }
    }

    pub fn index(&self) -> &Index {
        &self.index
    }

    pub fn profile(&self) -> &EngineProfile {
        &self.profile
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                error: code.to_owned(),
                message: message.into(),
            },
        }
    }

    fn bad_param(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, BAD_PARAM, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

/// One search hit on the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultBody {
    pub serial: String,
    pub mark: String,
    pub status: Status,
    pub classes: Vec<u8>,
    pub owner: Option<String>,
    /// Rounded to four decimal places.
    pub score: f64,
    pub band: RiskBand,
    pub exact_match: bool,
    pub phonetic_match: bool,
    pub levenshtein: usize,
    pub rank: usize,
}

impl ResultBody {
    pub fn from_result(r: &SearchResult, rank: usize) -> Self {
        Self {
            serial: r.serial.clone(),
            mark: r.mark.clone(),
            status: r.status,
            classes: r.classes.iter().copied().collect(),
            owner: r.owner.clone(),
            score: r.score.display_value(),
            band: r.band,
            exact_match: r.exact_match,
            phonetic_match: r.phonetic_match,
            levenshtein: r.levenshtein,
            rank,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBody {
    pub query: String,
    pub normalized: String,
    pub total: usize,
    pub truncated: bool,
    pub results: Vec<ResultBody>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HealthBody {
    pub status: String,
    pub records: usize,
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/v1/search", get(handle_search))
        .route("/api/v1/records/{serial}", get(handle_record))
        .route("/api/v1/healthz", get(handle_health))
        .with_state(state)
}

/// Serves until `shutdown` resolves; in-flight requests are allowed to finish.
pub async fn serve(
    listener: TcpListener,
    state: Arc<AppState>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
}

fn parse_classes(raw: &str) -> Result<BTreeSet<u8>, ApiError> {
    raw.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| match s.trim().parse::<u8>() {
            Ok(c) if (MIN_CLASS..=MAX_CLASS).contains(&c) => Ok(c),
            _ => Err(ApiError::bad_param(format!(
                "classes: {s:?} is not a class number in {MIN_CLASS}..={MAX_CLASS}"
            ))),
        })
        .collect()
}

async fn handle_search(
    State(state): State<Arc<AppState>>,
    Query(params): Query<Vec<(String, String)>>,
) -> Result<Json<SearchBody>, ApiError> {
    let param = |name: &str| {
        params
            .iter()
            .rev()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    };
    let query = param("q").unwrap_or("");
    if query.trim().is_empty() {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            EMPTY_QUERY,
            "q is required",
        ));
    }

    let mut opts = state.profile.search_options(Some(100));
    if let Some(raw) = param("limit") {
        match raw.parse::<usize>() {
            Ok(n) if n >= 1 => opts.limit = Some(n),
            _ => {
                return Err(ApiError::bad_param(format!(
                    "limit: {raw:?} is not a positive integer"
                )))
            }
        }
    }
    if let Some(raw) = param("classes") {
        let classes = parse_classes(raw)?;
        opts.classes = (!classes.is_empty()).then_some(classes);
    }
    if let Some(raw) = param("include_dead") {
        opts.include_dead = match raw {
            "true" => true,
            "false" => false,
            _ => {
                return Err(ApiError::bad_param(format!(
                    "include_dead: {raw:?} is not true or false"
                )))
            }
        };
    }
    if let Some(raw) = param("min_score") {
        match raw.parse::<f64>() {
            Ok(x) if (0.0..=1.0).contains(&x) => opts.min_score = x,
            _ => {
                return Err(ApiError::bad_param(format!(
                    "min_score: {raw:?} is not a decimal in [0, 1]"
                )))
            }
        }
    }

    let outcome = knockout_search_detailed(&state.index, query, &opts).map_err(|e| match e {
        SearchError::EmptyQuery(_) => {
            ApiError::new(StatusCode::BAD_REQUEST, EMPTY_QUERY, e.to_string())
        }
        SearchError::InvalidOptions(_) => ApiError::bad_param(e.to_string()),
    })?;

    Ok(Json(SearchBody {
        query: query.to_owned(),
        normalized: outcome.normalized.canonical().to_owned(),
        total: outcome.total,
        truncated: outcome.truncated(),
        results: outcome
            .results
            .iter()
            .enumerate()
            .map(|(i, r)| ResultBody::from_result(r, i + 1))
            .collect(),
    }))
}

fn serial_is_safe(serial: &str) -> bool {
    !serial.is_empty()
        && serial
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.'))
}

async fn handle_record(
    State(state): State<Arc<AppState>>,
    Path(serial): Path<String>,
) -> Result<Json<TrademarkRecord>, ApiError> {
    if !serial_is_safe(&serial) {
        return Err(ApiError::bad_param(format!(
            "serial {serial:?} contains unsupported characters"
        )));
    }
    state
        .index
        .by_serial(&serial)
        .cloned()
        .map(Json)
        .ok_or_else(|| {
            ApiError::new(
                StatusCode::NOT_FOUND,
                NOT_FOUND,
                format!("no record with serial {serial}"),
            )
        })
}

async fn handle_health(State(state): State<Arc<AppState>>) -> Json<HealthBody> {
    Json(HealthBody {
        status: "ok".into(),
        records: state.index.len(),
    })
}
