//! Stateless HTTP service: `POST /api/{command}` mirrors [`run_json`], `GET /api/health`.

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde_json::json;

use crate::commands::{run_json, Config};
use crate::error::ApiError;

/// The body and status a request for `command` produces. Shared by the CLI so both
/// print byte-identical JSON.
pub fn respond(command: &str, body: &str, config: Config) -> (u16, String) {
    match run_json(command, body, config) {
        Ok(envelope) => (200, envelope.to_json()),
        Err(e) => (e.status, e.to_json()),
    }
}

fn json_response(status: u16, body: String) -> Response {
    let status = StatusCode::from_u16(status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

async fn health() -> Response {
    json_response(200, json!({ "status": "ok" }).to_string())
}

async fn command(State(config): State<Config>, Path(command): Path<String>, body: Bytes) -> Response {
    let (status, body) = match String::from_utf8(body.to_vec()) {
        Err(e) => {
            let err = ApiError::bad_request("invalid_json", format!("body is not UTF-8: {e}"), json!({}));
            (err.status, err.to_json())
        }
        Ok(text) => match tokio::task::spawn_blocking(move || respond(&command, &text, config)).await {
            Ok(out) => out,
            Err(e) => {
                let err = ApiError::new(500, "internal_error", format!("request handler failed: {e}"), json!({}));
                (err.status, err.to_json())
            }
        },
    };
    json_response(status, body)
}

pub fn router(config: Config) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/{command}", post(command))
        .with_state(config)
}

/// Binds `host:port` and serves until the process is stopped.
pub async fn serve(host: &str, port: u16, config: Config) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    axum::serve(listener, router(config)).await
}
