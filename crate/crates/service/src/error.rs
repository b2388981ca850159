use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use insight_core::Error;
use serde::Serialize;
use serde_json::json;

use crate::API_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    BadRequest,
    NotFound,
    Conflict,
    Internal,
}

impl ErrorCode {
    pub fn status(self) -> StatusCode {
        match self {
            ErrorCode::BadRequest => StatusCode::BAD_REQUEST,
            ErrorCode::NotFound => StatusCode::NOT_FOUND,
            ErrorCode::Conflict => StatusCode::CONFLICT,
            ErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            detail: None,
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::BadRequest, message)
    }

    pub fn not_found(what: &str, id: &str) -> Self {
        Self {
            detail: Some(json!({ "id": id })),
            ..Self::new(ErrorCode::NotFound, format!("no {what} `{id}`"))
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::Internal, message)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        let (code, detail) = match &e {
            Error::FingerprintMismatch { expected, found } => (
                ErrorCode::Conflict,
                Some(json!({ "expected": expected, "found": found })),
            ),
            Error::RaggedRow {
                row,
                expected,
                found,
            } => (
                ErrorCode::BadRequest,
                Some(json!({ "row": row, "expected": expected, "found": found })),
            ),
            Error::VersionMismatch { expected, found } => (
                ErrorCode::BadRequest,
                Some(json!({ "expected": expected, "found": found })),
            ),
            Error::UnknownAttribute(a) | Error::StaleInsight(a) => {
                (ErrorCode::BadRequest, Some(json!({ "attribute": a })))
            }
            Error::Io(_) => (ErrorCode::Internal, None),
            Error::EmptyDataset
            | Error::DuplicateColumn(_)
            | Error::Csv(_)
            | Error::UnknownClass(_)
            | Error::InvalidQuery(_)
            | Error::UnknownFocus(_)
            | Error::Merge(_)
            | Error::EmptySketch
            | Error::WidthMismatch(..)
            | Error::EmptyColumn
            | Error::Malformed(_)
            | Error::InvalidPlant(_) => (ErrorCode::BadRequest, None),
        };
        Self {
            code,
            message,
            detail,
        }
    }
}

impl From<serde_json::Error> for ApiError {
    fn from(e: serde_json::Error) -> Self {
        ApiError::bad_request(format!("malformed body: {e}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = self.code.status();
        (
            status,
            Json(json!({ "api_version": API_VERSION, "error": self })),
        )
            .into_response()
    }
}
