use axum::body::Bytes;
use axum::extract::{FromRequestParts, Path, Query, State};
use axum::http::request::Parts;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use linky_core::corpus::{IdentityRef, Platform, RecordCounts, UserIdentity};
use linky_core::evaluation::{Criterion, DiffReport};
use linky_core::linkage::{ImportOptions, MethodDescriptor, DEFAULT_K_STORED};
use linky_core::vizprep::{self, PairView};
use linky_core::workspace::{StoredSolution, Workspace};

use crate::{ApiError, AppState, DEFAULT_SEARCH_LIMIT, MAX_SEARCH_LIMIT, SCHEMA_VERSION};

/// Query-string extractor that rejects unknown or malformed parameters with
/// a JSON 400.
pub struct Params<T>(pub T);

impl<T: DeserializeOwned, S: Send + Sync> FromRequestParts<S> for Params<T> {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &S) -> Result<Self, Self::Rejection> {
        Query::<T>::from_request_parts(parts, state)
            .await
            .map(|Query(q)| Params(q))
            .map_err(|e| ApiError::bad_request("invalid_query", e.body_text()))
    }
}

pub struct Segments<T>(pub T);

impl<T: DeserializeOwned + Send, S: Send + Sync> FromRequestParts<S> for Segments<T> {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &S) -> Result<Self, Self::Rejection> {
        Path::<T>::from_request_parts(parts, state)
            .await
            .map(|Path(p)| Segments(p))
            .map_err(|e| ApiError::bad_request("invalid_path", e.body_text()))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoParams {}

#[derive(Serialize)]
struct Versioned<T> {
    schema_version: &'static str,
    #[serde(flatten)]
    body: T,
}

fn ok<T: Serialize>(body: T) -> Json<Versioned<T>> {
    Json(Versioned {
        schema_version: SCHEMA_VERSION,
        body,
    })
}

pub async fn not_found() -> ApiError {
    ApiError::not_found("no_route", "no such endpoint")
}

#[derive(Serialize)]
struct WorkspaceInfo<'a> {
    name: &'a str,
    platforms: &'a [Platform],
    counts: RecordCounts,
}

pub async fn workspace_info(
    State(state): State<AppState>,
    Params(NoParams {}): Params<NoParams>,
) -> Result<Response, ApiError> {
    let ws = state.snapshot().await?;
    let ds = ws.dataset();
    Ok(ok(WorkspaceInfo {
        name: ds.name(),
        platforms: ds.platforms(),
        counts: ds.counts(),
    })
    .into_response())
}

/// One row of the solution list. Metrics are `null` when the dataset has no
/// ground truth for the solution's platform pair.
#[derive(Serialize)]
pub struct SolutionEntry {
    #[serde(flatten)]
    method: MethodDescriptor,
    source_platform: String,
    target_platform: String,
    n_evaluated: Option<usize>,
    prec_at_1: Option<f64>,
    mrr: Option<f64>,
}

impl From<&StoredSolution> for SolutionEntry {
    fn from(s: &StoredSolution) -> Self {
        let report = s.report.as_ref();
        Self {
            method: s.solution.method.clone(),
            source_platform: s.solution.source_platform.clone(),
            target_platform: s.solution.target_platform.clone(),
            n_evaluated: report.map(|r| r.n_evaluated),
            prec_at_1: report.map(|r| r.prec_at_1),
            mrr: report.map(|r| r.mrr),
        }
    }
}

#[derive(Serialize)]
struct SolutionList {
    solutions: Vec<SolutionEntry>,
}

#[derive(Serialize)]
struct SolutionBody {
    solution: SolutionEntry,
}

fn stored<'a>(ws: &'a Workspace, method_id: &str) -> Result<&'a StoredSolution, ApiError> {
    ws.solution(method_id).ok_or_else(|| {
        ApiError::not_found("unknown_method", format!("unknown method `{method_id}`"))
    })
}

pub async fn list_solutions(
    State(state): State<AppState>,
    Params(NoParams {}): Params<NoParams>,
) -> Result<Response, ApiError> {
    let ws = state.snapshot().await?;
    let solutions = ws
        .method_ids()
        .map(|id| SolutionEntry::from(ws.solution(id).expect("listed id exists")))
        .collect();
    Ok(ok(SolutionList { solutions }).into_response())
}

pub async fn get_solution(
    State(state): State<AppState>,
    Segments(method_id): Segments<String>,
    Params(NoParams {}): Params<NoParams>,
) -> Result<Response, ApiError> {
    let ws = state.snapshot().await?;
    let solution = stored(&ws, &method_id)?.into();
    Ok(ok(SolutionBody { solution }).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateParams {
    #[serde(default)]
    replace: bool,
    k_stored: Option<usize>,
    min_score: Option<f64>,
}

pub async fn create_solution(
    State(state): State<AppState>,
    Params(params): Params<CreateParams>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let text = String::from_utf8(body.to_vec()).map_err(|e| {
        ApiError::bad_request("malformed_solution", format!("body is not UTF-8: {e}"))
    })?;
    let options = ImportOptions {
        k_stored: params.k_stored.unwrap_or(DEFAULT_K_STORED),
        min_score: params.min_score,
    };
    if options.k_stored == 0 {
        return Err(ApiError::bad_request("invalid_k", "k_stored must be at least 1"));
    }
    let solution = state
        .update(move |ws| {
            let stored = ws.import_text(&text, &options, params.replace)?;
            Ok(SolutionEntry::from(stored))
        })
        .await?;
    tracing::info!(method_id = %solution.method.method_id, "solution imported");
    Ok((StatusCode::CREATED, ok(SolutionBody { solution })).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairParams {
    k: Option<usize>,
}

pub async fn pair(
    State(state): State<AppState>,
    Segments((method_id, source_id)): Segments<(String, String)>,
    Params(params): Params<PairParams>,
) -> Result<Response, ApiError> {
    let ws = state.snapshot().await?;
    let k = params.k.unwrap_or(state.config().topk_default);
    let view: PairView = ws.pair_view(&method_id, &source_id, k, &state.config().viz)?;
    Ok(ok(view).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffParams {
    against: String,
    #[serde(default)]
    criterion: Option<String>,
}

#[derive(Serialize)]
struct DiffEntry {
    source_id: String,
    username: String,
}

#[derive(Serialize)]
struct DiffBody {
    #[serde(flatten)]
    report: DiffReport,
    entries: Vec<DiffEntry>,
}

pub async fn diff(
    State(state): State<AppState>,
    Segments(method_id): Segments<String>,
    Params(params): Params<DiffParams>,
) -> Result<Response, ApiError> {
    let criterion: Criterion = match &params.criterion {
        Some(c) => c
            .parse()
            .map_err(|e: linky_core::evaluation::EvalError| ApiError::from(e))?,
        None => Criterion::default(),
    };
    let ws = state.snapshot().await?;
    let source_platform = stored(&ws, &method_id)?.solution.source_platform.clone();
    stored(&ws, &params.against)?;
    let report = ws.diff(&method_id, &params.against, criterion)?;
    let entries = report
        .correct_in_a_not_b
        .iter()
        .map(|id| DiffEntry {
            source_id: id.clone(),
            username: ws
                .dataset()
                .lookup(&source_platform, id)
                .map(|u| u.username.clone())
                .unwrap_or_default(),
        })
        .collect();
    Ok(ok(DiffBody { report, entries }).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchParams {
    platform: String,
    #[serde(default)]
    q: String,
    limit: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchKind {
    Exact,
    Prefix,
    Substring,
}

#[derive(Serialize)]
struct IdentitySummary {
    platform: String,
    user_id: String,
    username: String,
    screen_name: Option<String>,
    #[serde(rename = "match")]
    kind: MatchKind,
}

#[derive(Serialize)]
struct SearchBody {
    identities: Vec<IdentitySummary>,
}

fn classify(field: &str, q: &str) -> Option<MatchKind> {
    let field = field.to_lowercase();
    if field == q {
        Some(MatchKind::Exact)
    } else if field.starts_with(q) {
        Some(MatchKind::Prefix)
    } else if field.contains(q) {
        Some(MatchKind::Substring)
    } else {
        None
    }
}

/// Best match class of an identity over its username and screen name.
pub fn match_kind(identity: &UserIdentity, q: &str) -> Option<MatchKind> {
    let q = q.to_lowercase();
    let by_name = classify(&identity.username, &q);
    let by_screen = identity.screen_name.as_deref().and_then(|s| classify(s, &q));
    match (by_name, by_screen) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

pub async fn search_identities(
    State(state): State<AppState>,
    Params(params): Params<SearchParams>,
) -> Result<Response, ApiError> {
    let ws = state.snapshot().await?;
    let ds = ws.dataset();
    if ds.platform(&params.platform).is_none() {
        return Err(ApiError::bad_request(
            "unknown_platform",
            format!("unknown platform `{}`", params.platform),
        ));
    }
    let limit = params.limit.unwrap_or(DEFAULT_SEARCH_LIMIT).min(MAX_SEARCH_LIMIT);
    let mut hits: Vec<(MatchKind, &UserIdentity)> = ds
        .identities_on(&params.platform)
        .filter_map(|u| match_kind(u, &params.q).map(|k| (k, u)))
        .collect();
    hits.sort_by(|(ka, a), (kb, b)| {
        ka.cmp(kb)
            .then_with(|| a.username.to_lowercase().cmp(&b.username.to_lowercase()))
            .then_with(|| a.username.cmp(&b.username))
            .then_with(|| a.user_id.cmp(&b.user_id))
    });
    let identities = hits
        .into_iter()
        .take(limit)
        .map(|(kind, u)| IdentitySummary {
            platform: u.platform.clone(),
            user_id: u.user_id.clone(),
            username: u.username.clone(),
            screen_name: u.screen_name.clone(),
            kind,
        })
        .collect();
    Ok(ok(SearchBody { identities }).into_response())
}

fn content_type(path: &std::path::Path) -> &'static str {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("png") => "image/png",
        Some("jpg" | "jpeg") => "image/jpeg",
        Some("gif") => "image/gif",
        Some("webp") => "image/webp",
        Some("svg") => "image/svg+xml",
        Some("bmp") => "image/bmp",
        _ => "application/octet-stream",
    }
}

/// Streams the local file behind an identity's profile image reference.
pub async fn profile_image(
    State(state): State<AppState>,
    Segments((platform, user_id)): Segments<(String, String)>,
    Params(NoParams {}): Params<NoParams>,
) -> Result<Response, ApiError> {
    let ws = state.snapshot().await?;
    let key = IdentityRef::new(platform, user_id);
    let identity = ws
        .dataset()
        .identity(&key)
        .ok_or_else(|| ApiError::not_found("unknown_identity", format!("unknown identity {key}")))?;
    let missing = || ApiError::not_found("image_missing", format!("{key} has no local profile image"));
    let image_ref = identity.profile_image_ref.as_deref().ok_or_else(missing)?;
    let path = vizprep::local_image_path(image_ref, state.config().viz.image_root.as_deref())
        .ok_or_else(missing)?;
    let bytes = tokio::fs::read(&path).await.map_err(|_| missing())?;
    Ok(([(header::CONTENT_TYPE, content_type(&path))], bytes).into_response())
}
