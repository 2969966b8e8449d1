//! JSON API over [`SessionStore`], mounted under `/api/v1`.
//!
//! | method | path                        | body                                   |
//! |--------|-----------------------------|----------------------------------------|
//! | POST   | `/session`                  | `{"host": ..., "prior": "1/2", ...}`   |
//! | POST   | `/session/{id}/pick`        | `{"door": 2}` (optional `"intent"`)    |
//! | POST   | `/session/{id}/decision`    | `"stay"` or `{"decision": "switch"}`   |
//! | GET    | `/session/{id}`             |                                        |
//! | GET    | `/analytics?p=1/2&q=3/4`    |                                        |
//!
//! Every response body carries `schema_version`.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::analytics::{self, AnalyticsRow};
use crate::error::Error;
use crate::game::Decision;
use crate::probability::Probability;
use crate::session::{HostSpec, MoodMode, SessionStore, SCHEMA_VERSION};

pub type AppState = Arc<SessionStore>;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, code: "BadRequest", message: message.into() }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, code) = match &e {
            Error::UnknownSession(_) => (StatusCode::NOT_FOUND, "UnknownSession"),
            Error::PhaseViolation { .. } => (StatusCode::CONFLICT, "PhaseViolation"),
            Error::IllegalDoor(_) => (StatusCode::BAD_REQUEST, "IllegalDoor"),
            Error::InvalidProbability(_) | Error::InvalidParameter(_) => (StatusCode::BAD_REQUEST, "InvalidParameter"),
            _ => (StatusCode::UNPROCESSABLE_ENTITY, "Unprocessable"),
        };
        ApiError { status, code, message: e.to_string() }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::bad_request(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({
            "schema_version": SCHEMA_VERSION,
            "error": { "code": self.code, "message": self.message },
        });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

fn to_json<T: serde::Serialize>(value: T) -> ApiResult {
    serde_json::to_value(value).map(Json).map_err(|e| ApiError::bad_request(e.to_string()))
}

/// `"fair"`, `"evil"`, `"moody"`, `"mind_reader"`, `"adaptive"`, or a
/// tagged object such as `{"kind": "moody", "p": "1/2"}`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum HostField {
    Spec(HostSpec),
    Name(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    host: HostField,
    p: Option<Probability>,
    accuracy: Option<Probability>,
    prior: Option<Probability>,
    #[serde(default)]
    mood_mode: MoodMode,
    seed: Option<u64>,
}

fn host_spec(req: &CreateSession) -> Result<HostSpec, ApiError> {
    match &req.host {
        HostField::Spec(spec) => Ok(spec.clone()),
        HostField::Name(name) => match name.as_str() {
            "fair" => Ok(HostSpec::Fair),
            "evil" => Ok(HostSpec::Evil),
            "adaptive" => Ok(HostSpec::Adaptive),
            "moody" => req
                .p
                .clone()
                .map(|p| HostSpec::Moody { p })
                .ok_or_else(|| ApiError::bad_request("a moody host needs \"p\"")),
            "mind_reader" => {
                Ok(HostSpec::MindReader { accuracy: req.accuracy.clone().unwrap_or_else(Probability::one) })
            }
            other => Err(ApiError::bad_request(format!("unknown host {other:?}"))),
        },
    }
}

async fn create_session(
    State(store): State<AppState>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    let Json(req) = body?;
    let host = host_spec(&req)?;
    let view = store.create(host, req.prior, req.mood_mode, req.seed);
    Ok((StatusCode::CREATED, to_json(view)?))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PickBody {
    door: i64,
    intent: Option<Decision>,
}

async fn pick(
    State(store): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<PickBody>, JsonRejection>,
) -> ApiResult {
    let Json(req) = body?;
    to_json(store.pick(&id, req.door, req.intent)?)
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum DecisionBody {
    Bare(Decision),
    Object { decision: Decision },
}

async fn decision(
    State(store): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<DecisionBody>, JsonRejection>,
) -> ApiResult {
    let decision = match body? {
        Json(DecisionBody::Bare(d)) | Json(DecisionBody::Object { decision: d }) => d,
    };
    to_json(store.decide(&id, decision)?)
}

async fn get_session(State(store): State<AppState>, Path(id): Path<String>) -> ApiResult {
    to_json(store.view(&id)?)
}

#[derive(Debug, Deserialize)]
struct AnalyticsQuery {
    p: Option<String>,
    q: Option<String>,
}

async fn get_analytics(query: Result<Query<AnalyticsQuery>, axum::extract::rejection::QueryRejection>) -> ApiResult {
    let Query(query) = query.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let parse = |v: Option<String>, default: Probability| -> Result<Probability, ApiError> {
        v.map_or(Ok(default), |s| s.parse().map_err(|e: Error| ApiError::from(e)))
    };
    let p = parse(query.p, crate::probability::prob(1, 2))?;
    let q = parse(query.q, crate::probability::prob(1, 2))?;
    let mut body = AnalyticsRow::at(&p, &q).to_json();
    let extra = [
        ("prob_other", analytics::prob_other(&p)),
        ("prob_my", analytics::prob_my(&p)),
        ("mind_reader_win_rate", analytics::mind_reader_win_rate(&q)),
        ("mind_reader_open_rate", analytics::mind_reader_open_rate(&q)),
        ("indifference_point", analytics::indifference_point()),
    ];
    let map = body.as_object_mut().expect("row is an object");
    for (name, value) in extra {
        map.insert(name.into(), value.to_fraction_string().into());
        map.insert(format!("{name}_decimal"), value.to_decimal_string().into());
    }
    map.insert("best_response".into(), analytics::best_response(&p).to_string().into());
    map.insert("schema_version".into(), SCHEMA_VERSION.into());
    Ok(Json(body))
}

pub fn router(store: AppState) -> Router {
    let api = Router::new()
        .route("/session", post(create_session))
        .route("/session/{id}", get(get_session))
        .route("/session/{id}/pick", post(pick))
        .route("/session/{id}/decision", post(decision))
        .route("/analytics", get(get_analytics));
    Router::new().nest("/api/v1", api).with_state(store)
}

/// Serves the API until ctrl-c.
pub async fn serve(addr: SocketAddr, store: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
