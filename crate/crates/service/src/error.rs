use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

use linky_core::corpus::CorpusError;
use linky_core::evaluation::EvalError;
use linky_core::linkage::LinkageError;
use linky_core::vizprep::VizError;
use linky_core::workspace::WorkspaceError;

use crate::SCHEMA_VERSION;

/// An error response: HTTP status plus a stable machine-readable code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({})", self.message, self.code)
    }
}

impl std::error::Error for ApiError {}

#[derive(Serialize)]
struct ErrorBody<'a> {
    schema_version: &'static str,
    error: ErrorDetail<'a>,
}

#[derive(Serialize)]
struct ErrorDetail<'a> {
    code: &'a str,
    message: &'a str,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }

    pub fn no_workspace(message: impl Into<String>) -> Self {
        Self::new(StatusCode::SERVICE_UNAVAILABLE, "no_workspace", message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            schema_version: SCHEMA_VERSION,
            error: ErrorDetail {
                code: self.code,
                message: &self.message,
            },
        };
        (self.status, Json(body)).into_response()
    }
}

impl From<CorpusError> for ApiError {
    fn from(e: CorpusError) -> Self {
        use CorpusError::*;
        let code = match &e {
            UnknownPlatform(_) => "unknown_platform",
            UnknownIdentity(_) => return Self::not_found("unknown_identity", e.to_string()),
            UnknownIdentityRef { .. } => "unknown_identity_ref",
            InvalidGroundTruth { .. } => "invalid_ground_truth",
            Io { .. } => return Self::internal(e.to_string()),
            MalformedRecord { .. }
            | DuplicateIdentity { .. }
            | DanglingEdge { .. }
            | SelfLoop { .. }
            | DuplicateEdge { .. }
            | InvalidPlatform(_)
            | CountMismatch { .. } => "invalid_dataset",
            InvalidPattern { .. } => "invalid_pattern",
            InvalidParameter(_) => "invalid_parameter",
        };
        Self::bad_request(code, e.to_string())
    }
}

impl From<LinkageError> for ApiError {
    fn from(e: LinkageError) -> Self {
        use LinkageError::*;
        let code = match &e {
            UnknownPlatform(_) => "unknown_platform",
            EmptyPlatform(_) => "empty_platform",
            SamePlatform(_) => "same_platform",
            InvalidK => "invalid_k",
            MalformedSolution { .. } => "malformed_solution",
            UnknownIdentityRef { .. } => "unknown_identity_ref",
            DuplicateCandidate { .. } => "duplicate_candidate",
            DuplicateMethodId(_) => {
                return Self::new(StatusCode::CONFLICT, "duplicate_method_id", e.to_string())
            }
            Index(_) | Io { .. } => return Self::internal(e.to_string()),
        };
        Self::bad_request(code, e.to_string())
    }
}

impl From<EvalError> for ApiError {
    fn from(e: EvalError) -> Self {
        match &e {
            EvalError::NoGroundTruth { .. } => {
                Self::new(StatusCode::CONFLICT, "no_ground_truth", e.to_string())
            }
            EvalError::PlatformMismatch { .. } => {
                Self::new(StatusCode::CONFLICT, "platform_mismatch", e.to_string())
            }
            EvalError::InvalidCriterion(_) => Self::bad_request("invalid_criterion", e.to_string()),
        }
    }
}

impl From<VizError> for ApiError {
    fn from(e: VizError) -> Self {
        match e {
            VizError::UnknownMethod(_) => Self::not_found("unknown_method", e.to_string()),
            VizError::UnknownSource(_) => Self::not_found("unknown_source", e.to_string()),
            VizError::NoCandidates(_) => Self::not_found("no_candidates", e.to_string()),
            VizError::InvalidK => Self::bad_request("invalid_k", e.to_string()),
            VizError::Corpus(e) => e.into(),
        }
    }
}

impl From<WorkspaceError> for ApiError {
    fn from(e: WorkspaceError) -> Self {
        match e {
            WorkspaceError::Corpus(e) => e.into(),
            WorkspaceError::Linkage(e) => e.into(),
            WorkspaceError::Eval(e) => e.into(),
            WorkspaceError::Viz(e) => e.into(),
            WorkspaceError::UnknownMethod(_) => Self::not_found("unknown_method", e.to_string()),
            WorkspaceError::NotInitialized(_) => Self::no_workspace(e.to_string()),
            WorkspaceError::Io { .. } => Self::internal(e.to_string()),
        }
    }
}
