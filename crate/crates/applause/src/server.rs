//! HTTP scoring service. One immutable model per process; handlers share it
//! read-only.
//!
//! - `POST /score` with `{"text": "..."}` returns `{"sentences": [...]}`
//! - `GET /model/importance` returns the model's importance weights
//! - `GET /healthz` returns `{"status": "ok"}`
//!
//! Every response carries `x-model-fingerprint`, the SHA-256 of the model
//! file. Malformed bodies get 400 and bodies over 1 MiB get 413, both with a
//! JSON `{"error": ...}` body.

use std::sync::Arc;

use anyhow::{Context, Result};
use applause_core::glm::{relative_importance, GlmError, LassoModel};
use applause_core::score::{check_model, score_draft, ScoreResult};
use axum::body::Bytes;
use axum::extract::rejection::BytesRejection;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::{header, HeaderName, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::set_header::SetResponseHeaderLayer;

use crate::data::Resources;
use crate::formats::sorted_importance;

pub const MAX_BODY_BYTES: usize = 1 << 20;
pub const FINGERPRINT_HEADER: &str = "x-model-fingerprint";

pub struct AppState {
    pub model: LassoModel,
    pub resources: Resources,
    /// SHA-256 of the model file, hex encoded.
    pub fingerprint: String,
}

impl AppState {
    /// Fails when the model was trained on a different feature layout.
    pub fn new(model: LassoModel, resources: Resources, fingerprint: String) -> Result<Self> {
        check_model(&model, &resources.registry).context("model does not match the configured lexicons")?;
        Ok(Self {
            model,
            resources,
            fingerprint,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScoreRequest {
    text: String,
}

#[derive(Serialize)]
struct Device {
    feature: String,
    value: f64,
}

#[derive(Serialize)]
struct ScoredSentence {
    text: String,
    probability: f64,
    fired_devices: Vec<Device>,
}

impl From<ScoreResult> for ScoredSentence {
    fn from(r: ScoreResult) -> Self {
        Self {
            text: r.text,
            probability: r.probability,
            fired_devices: r
                .fired_devices
                .into_iter()
                .map(|(feature, value)| Device { feature, value })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct ScoreResponse {
    sentences: Vec<ScoredSentence>,
}

#[derive(Serialize)]
struct Weight {
    feature: String,
    weight: f64,
}

#[derive(Serialize)]
struct ImportanceResponse {
    importance: Vec<Weight>,
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(serde_json::json!({ "error": message.into() }))).into_response()
}

async fn score(State(state): State<Arc<AppState>>, body: Result<Bytes, BytesRejection>) -> Response {
    let body = match body {
        Ok(b) => b,
        Err(rejection) => return error(rejection.status(), rejection.body_text()),
    };
    let request: ScoreRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("invalid request body: {e}")),
    };
    let r = &state.resources;
    match score_draft(&state.model, &r.bundle, &r.registry, &request.text) {
        Ok(results) => Json(ScoreResponse {
            sentences: results.into_iter().map(ScoredSentence::from).collect(),
        })
        .into_response(),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

async fn importance(State(state): State<Arc<AppState>>) -> Response {
    let weights = match relative_importance(&state.model) {
        Ok(w) => sorted_importance(&w),
        Err(GlmError::ImportanceUndefined) => Vec::new(),
        Err(e) => return error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    };
    Json(ImportanceResponse {
        importance: weights.into_iter().map(|(feature, weight)| Weight { feature, weight }).collect(),
    })
    .into_response()
}

async fn healthz() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

/// `cors_origin` of `None` or `"*"` allows any origin.
pub fn router(state: Arc<AppState>, cors_origin: Option<&str>) -> Result<Router> {
    let origin = match cors_origin {
        None | Some("*") => AllowOrigin::any(),
        Some(o) => AllowOrigin::exact(HeaderValue::from_str(o).with_context(|| format!("invalid CORS origin {o:?}"))?),
    };
    let fingerprint_header = HeaderName::from_static(FINGERPRINT_HEADER);
    let cors = CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE])
        .expose_headers([fingerprint_header.clone()]);
    let fingerprint = HeaderValue::from_str(&state.fingerprint)?;
    Ok(Router::new()
        .route("/score", post(score))
        .route("/model/importance", get(importance))
        .route("/healthz", get(healthz))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .layer(SetResponseHeaderLayer::overriding(fingerprint_header, fingerprint))
        .layer(cors)
        .with_state(state))
}

pub async fn serve(addr: &str, state: Arc<AppState>, cors_origin: Option<&str>) -> Result<()> {
    let app = router(state, cors_origin)?;
    let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
