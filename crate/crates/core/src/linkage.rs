//! Linkage methods as ranked predictions, the username baseline, and the
//! solution file format used to import results of external methods.
//!
//! A solution file is NDJSON: one header record
//! `{method_id, display_name, source_platform, target_platform, parameters}`
//! followed by one record per source identity
//! `{source_id, candidates: [{target_id, score}]}` with candidates in rank order.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corpus::{Dataset, IdentityRef};
use crate::ngram::{self, IndexError, InvertedIndex};

/// Lists are stored truncated to this many candidates unless configured otherwise.
pub const DEFAULT_K_STORED: usize = 3;

#[derive(Debug, thiserror::Error)]
pub enum LinkageError {
    #[error("unknown platform `{0}`")]
    UnknownPlatform(String),
    #[error("platform `{0}` has no identities")]
    EmptyPlatform(String),
    #[error("source and target platform are both `{0}`")]
    SamePlatform(String),
    #[error("k must be at least 1")]
    InvalidK,
    #[error("line {line}: malformed solution: {message}")]
    MalformedSolution { line: usize, message: String },
    #[error("line {line}: unknown identity {platform}/{user_id}")]
    UnknownIdentityRef {
        line: usize,
        platform: String,
        user_id: String,
    },
    #[error("line {line}: candidate {target_id} listed twice")]
    DuplicateCandidate { line: usize, target_id: String },
    #[error("method `{0}` already exists")]
    DuplicateMethodId(String),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = LinkageError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    BuiltinBaseline,
    Imported,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodDescriptor {
    pub method_id: String,
    pub display_name: String,
    pub origin: Origin,
    pub parameters: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidate {
    pub target: IdentityRef,
    pub score: f64,
    /// 1-based.
    pub rank: usize,
}

/// A method's ranked predictions from one platform onto another.
///
/// A source with an empty candidate list and a source that is absent are
/// equivalent: both count as a miss, and equality treats them the same.
#[derive(Debug, Clone)]
pub struct Solution {
    pub method: MethodDescriptor,
    pub source_platform: String,
    pub target_platform: String,
    /// Source user_id → candidates in rank order.
    pub predictions: BTreeMap<String, Vec<RankedCandidate>>,
}

impl PartialEq for Solution {
    fn eq(&self, other: &Self) -> bool {
        fn nonempty(s: &Solution) -> Vec<(&String, &Vec<RankedCandidate>)> {
            s.predictions.iter().filter(|(_, c)| !c.is_empty()).collect()
        }
        self.method == other.method
            && self.source_platform == other.source_platform
            && self.target_platform == other.target_platform
            && nonempty(self) == nonempty(other)
    }
}

impl Solution {
    pub fn candidates(&self, source_id: &str) -> &[RankedCandidate] {
        self.predictions
            .get(source_id)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Rank of `target` in the source's list, if present.
    pub fn rank_of(&self, source_id: &str, target_user_id: &str) -> Option<usize> {
        self.candidates(source_id)
            .iter()
            .find(|c| c.target.user_id == target_user_id)
            .map(|c| c.rank)
    }

    pub fn top1(&self) -> impl Iterator<Item = (&str, &RankedCandidate)> {
        self.predictions
            .iter()
            .filter_map(|(s, c)| c.first().map(|c| (s.as_str(), c)))
    }
}

pub fn baseline_method_id(n: usize) -> String {
    format!("baseline-{n}gram")
}

fn index_key(platform: &str, user_id: &str) -> String {
    // platform ids are lowercase tokens without ':'
    format!("{platform}:{user_id}")
}

fn split_key(key: &str) -> IdentityRef {
    let (platform, user_id) = key.split_once(':').expect("keys built by index_key");
    IdentityRef::new(platform, user_id)
}

fn check_platforms(dataset: &Dataset, source: &str, target: &str) -> Result<()> {
    for p in [source, target] {
        if dataset.platform(p).is_none() {
            return Err(LinkageError::UnknownPlatform(p.to_string()));
        }
    }
    if source == target {
        return Err(LinkageError::SamePlatform(source.to_string()));
    }
    Ok(())
}

/// Ranks target identities for every source identity by username n-gram
/// cosine similarity, keeping the top `k`.
///
/// The index (and therefore INF) covers both platforms' usernames; only
/// target identities are eligible as candidates.
pub fn run_baseline(
    dataset: &Dataset,
    source_platform: &str,
    target_platform: &str,
    n: usize,
    k: usize,
) -> Result<Solution> {
    check_platforms(dataset, source_platform, target_platform)?;
    if k == 0 {
        return Err(LinkageError::InvalidK);
    }
    let sources: Vec<_> = dataset.identities_on(source_platform).collect();
    let targets: Vec<_> = dataset.identities_on(target_platform).collect();
    for (p, list) in [(source_platform, &sources), (target_platform, &targets)] {
        if list.is_empty() {
            return Err(LinkageError::EmptyPlatform(p.to_string()));
        }
    }

    let index = InvertedIndex::build(
        sources
            .iter()
            .chain(targets.iter())
            .map(|i| (index_key(&i.platform, &i.user_id), i.username.as_str())),
        n,
    )?;
    let target_keys: Vec<String> = targets
        .iter()
        .map(|t| index_key(&t.platform, &t.user_id))
        .collect();
    let candidates = index.candidate_set(target_keys.iter().map(String::as_str))?;
    let queries: Vec<&str> = sources.iter().map(|s| s.username.as_str()).collect();
    let results = index.top_k_batch(&queries, k, Some(&candidates));

    let mut predictions = BTreeMap::new();
    for (source, hits) in sources.iter().zip(results) {
        let list = hits?
            .into_iter()
            .enumerate()
            .map(|(i, hit)| RankedCandidate {
                target: split_key(&hit.id),
                score: hit.score,
                rank: i + 1,
            })
            .collect();
        predictions.insert(source.user_id.clone(), list);
    }

    let mut parameters = BTreeMap::new();
    parameters.insert("n".to_string(), Value::from(n));
    parameters.insert("k".to_string(), Value::from(k));
    Ok(Solution {
        method: MethodDescriptor {
            method_id: baseline_method_id(n),
            display_name: format!("Username {n}-gram cosine baseline"),
            origin: Origin::BuiltinBaseline,
            parameters,
        },
        source_platform: source_platform.to_string(),
        target_platform: target_platform.to_string(),
        predictions,
    })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeaderRecord {
    method_id: String,
    display_name: String,
    source_platform: String,
    target_platform: String,
    #[serde(default)]
    parameters: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "is_imported")]
    origin: Option<Origin>,
}

fn is_imported(origin: &Option<Origin>) -> bool {
    !matches!(origin, Some(Origin::BuiltinBaseline))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceRecord {
    #[serde(alias = "source")]
    source_id: String,
    candidates: Vec<CandidateRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CandidateRecord {
    #[serde(alias = "target")]
    target_id: String,
    score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportOptions {
    /// Lists are truncated to this many candidates.
    pub k_stored: usize,
    /// Candidates scoring below this are dropped.
    pub min_score: Option<f64>,
}

impl Default for ImportOptions {
    fn default() -> Self {
        Self {
            k_stored: DEFAULT_K_STORED,
            min_score: None,
        }
    }
}

/// Method ids double as file names in a workspace.
pub fn valid_method_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.'))
}

fn malformed(line: usize, message: impl Into<String>) -> LinkageError {
    LinkageError::MalformedSolution {
        line,
        message: message.into(),
    }
}

/// Parses and validates a solution file body against `dataset`.
///
/// Ranks are assigned from the order candidates are listed in.
pub fn parse_solution(text: &str, dataset: &Dataset, options: &ImportOptions) -> Result<Solution> {
    if options.k_stored == 0 {
        return Err(LinkageError::InvalidK);
    }
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let (header_line, header_text) = lines
        .next()
        .ok_or_else(|| malformed(1, "missing header record"))?;
    let header: HeaderRecord =
        serde_json::from_str(header_text).map_err(|e| malformed(header_line, e.to_string()))?;
    if !valid_method_id(&header.method_id) {
        return Err(malformed(
            header_line,
            format!("method_id `{}` must match [A-Za-z0-9._-]+", header.method_id),
        ));
    }
    check_platforms(dataset, &header.source_platform, &header.target_platform).map_err(|e| {
        malformed(header_line, e.to_string())
    })?;

    let mut predictions = BTreeMap::new();
    for (line, body) in lines {
        let record: SourceRecord =
            serde_json::from_str(body).map_err(|e| malformed(line, e.to_string()))?;
        if !dataset.contains(&IdentityRef::new(&header.source_platform, &record.source_id)) {
            return Err(LinkageError::UnknownIdentityRef {
                line,
                platform: header.source_platform.clone(),
                user_id: record.source_id,
            });
        }
        if predictions.contains_key(&record.source_id) {
            return Err(malformed(
                line,
                format!("source {} listed twice", record.source_id),
            ));
        }
        let mut seen = HashSet::new();
        let mut previous = f64::INFINITY;
        for c in &record.candidates {
            let target = IdentityRef::new(&header.target_platform, &c.target_id);
            if !dataset.contains(&target) {
                return Err(LinkageError::UnknownIdentityRef {
                    line,
                    platform: target.platform,
                    user_id: target.user_id,
                });
            }
            if !seen.insert(c.target_id.as_str()) {
                return Err(LinkageError::DuplicateCandidate {
                    line,
                    target_id: c.target_id.clone(),
                });
            }
            if c.score > previous {
                return Err(malformed(line, "candidate scores must be non-increasing"));
            }
            previous = c.score;
        }
        let list = record
            .candidates
            .into_iter()
            .filter(|c| options.min_score.is_none_or(|min| c.score >= min))
            .take(options.k_stored)
            .enumerate()
            .map(|(i, c)| RankedCandidate {
                target: IdentityRef::new(&header.target_platform, c.target_id),
                score: c.score,
                rank: i + 1,
            })
            .collect();
        predictions.insert(record.source_id, list);
    }

    Ok(Solution {
        method: MethodDescriptor {
            method_id: header.method_id,
            display_name: header.display_name,
            origin: header.origin.unwrap_or(Origin::Imported),
            parameters: header.parameters,
        },
        source_platform: header.source_platform,
        target_platform: header.target_platform,
        predictions,
    })
}

pub fn import_solution(path: &Path, dataset: &Dataset, options: &ImportOptions) -> Result<Solution> {
    let text = fs::read_to_string(path).map_err(|source| LinkageError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_solution(&text, dataset, options)
}

/// Canonical file body: header, then sources ascending, candidates by rank.
/// Sources with empty lists are not written.
pub fn solution_to_string(solution: &Solution) -> String {
    let header = HeaderRecord {
        method_id: solution.method.method_id.clone(),
        display_name: solution.method.display_name.clone(),
        source_platform: solution.source_platform.clone(),
        target_platform: solution.target_platform.clone(),
        parameters: solution.method.parameters.clone(),
        origin: Some(solution.method.origin),
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for (source_id, list) in &solution.predictions {
        if list.is_empty() {
            continue;
        }
        let record = SourceRecord {
            source_id: source_id.clone(),
            candidates: list
                .iter()
                .map(|c| CandidateRecord {
                    target_id: c.target.user_id.clone(),
                    score: c.score,
                })
                .collect(),
        };
        out.push_str(&serde_json::to_string(&record).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn export_solution(solution: &Solution, path: &Path) -> Result<()> {
    fs::write(path, solution_to_string(solution)).map_err(|source| LinkageError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Username index over the given platforms, keyed `platform:user_id`.
pub fn build_name_index(
    dataset: &Dataset,
    platforms: &[&str],
    n: usize,
) -> Result<InvertedIndex> {
    for p in platforms {
        if dataset.platform(p).is_none() {
            return Err(LinkageError::UnknownPlatform(p.to_string()));
        }
    }
    Ok(ngram::InvertedIndex::build(
        dataset
            .identities()
            .iter()
            .filter(|i| platforms.contains(&i.platform.as_str()))
            .map(|i| (index_key(&i.platform, &i.user_id), i.username.as_str())),
        n,
    )?)
}
