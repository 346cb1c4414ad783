use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use gwcorr_core::Error;
use serde::Serialize;

#[derive(Debug, Serialize)]
struct Body {
    error_kind: String,
    message: String,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub kind: String,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, kind: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            kind: kind.to_string(),
            message: message.into(),
        }
    }

    pub fn not_found(what: &str, id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "NotFound", format!("unknown {what} {id:?}"))
    }

    /// Wraps an engine error with the status the calling endpoint assigns it.
    pub fn core(status: StatusCode, err: Error) -> Self {
        Self::new(status, err.kind(), err.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Body {
            error_kind: self.kind,
            message: self.message,
        };
        (self.status, Json(body)).into_response()
    }
}
