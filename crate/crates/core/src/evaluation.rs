//! Prec@1 / MRR against ground truth, and method-difference sets.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::GroundTruthLink;
use crate::linkage::Solution;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("no ground truth for {source_platform} -> {target_platform}")]
    NoGroundTruth {
        source_platform: String,
        target_platform: String,
    },
    #[error("solutions link different platform pairs ({a} vs {b})")]
    PlatformMismatch { a: String, b: String },
    #[error("invalid criterion `{0}` (expected `rank1` or `topk:K`)")]
    InvalidCriterion(String),
}

pub type Result<T, E = EvalError> = std::result::Result<T, E>;

/// Source user_id → true target user_id for one platform pair.
///
/// Links stored in the opposite direction are used flipped, unless the
/// source already has a link stored in the requested direction.
pub fn truth_for_pair(
    links: &[GroundTruthLink],
    source_platform: &str,
    target_platform: &str,
) -> BTreeMap<String, String> {
    let mut truth = BTreeMap::new();
    for link in links {
        if link.source.platform == source_platform && link.target.platform == target_platform {
            truth.insert(link.source.user_id.clone(), link.target.user_id.clone());
        }
    }
    for link in links {
        if link.source.platform == target_platform && link.target.platform == source_platform {
            truth
                .entry(link.target.user_id.clone())
                .or_insert_with(|| link.source.user_id.clone());
        }
    }
    truth
}

fn truth_or_err(solution: &Solution, links: &[GroundTruthLink]) -> Result<BTreeMap<String, String>> {
    let truth = truth_for_pair(links, &solution.source_platform, &solution.target_platform);
    if truth.is_empty() {
        return Err(EvalError::NoGroundTruth {
            source_platform: solution.source_platform.clone(),
            target_platform: solution.target_platform.clone(),
        });
    }
    Ok(truth)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub method_id: String,
    pub n_evaluated: usize,
    pub prec_at_1: f64,
    pub mrr: f64,
    /// Source user_id → reciprocal rank of the true target (0 when absent).
    pub per_user: BTreeMap<String, f64>,
}

/// The exported form of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub method_id: String,
    pub n_evaluated: usize,
    pub prec_at_1: f64,
    pub mrr: f64,
}

impl EvaluationReport {
    pub fn summary(&self) -> ReportSummary {
        ReportSummary {
            method_id: self.method_id.clone(),
            n_evaluated: self.n_evaluated,
            prec_at_1: self.prec_at_1,
            mrr: self.mrr,
        }
    }

    /// One JSON object and a trailing newline.
    pub fn to_export_string(&self) -> String {
        let mut s = serde_json::to_string(&self.summary()).expect("summary serializes");
        s.push('\n');
        s
    }
}

/// Scores every source that has a ground-truth target. Sources missing from
/// the solution, or whose list lacks the true target, score 0.
pub fn evaluate(solution: &Solution, ground_truth: &[GroundTruthLink]) -> Result<EvaluationReport> {
    let truth = truth_or_err(solution, ground_truth)?;
    let per_user: BTreeMap<String, f64> = truth
        .iter()
        .map(|(source, target)| {
            let rr = solution
                .rank_of(source, target)
                .map_or(0.0, |r| 1.0 / r as f64);
            (source.clone(), rr)
        })
        .collect();
    let n = per_user.len();
    let hits = per_user.values().filter(|&&rr| rr == 1.0).count();
    let total: f64 = per_user.values().sum();
    Ok(EvaluationReport {
        method_id: solution.method.method_id.clone(),
        n_evaluated: n,
        prec_at_1: hits as f64 / n as f64,
        mrr: total / n as f64,
        per_user,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Rank1,
    TopK(usize),
}

impl Default for Criterion {
    fn default() -> Self {
        Criterion::Rank1
    }
}

impl Criterion {
    fn accepts(self, rank: Option<usize>) -> bool {
        match (self, rank) {
            (_, None) => false,
            (Criterion::Rank1, Some(r)) => r == 1,
            (Criterion::TopK(k), Some(r)) => r <= k,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criterion::Rank1 => f.write_str("rank1"),
            Criterion::TopK(k) => write!(f, "topk:{k}"),
        }
    }
}

impl FromStr for Criterion {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || EvalError::InvalidCriterion(s.to_string());
        if s == "rank1" {
            return Ok(Criterion::Rank1);
        }
        let k = s
            .strip_prefix("topk:")
            .or_else(|| s.strip_prefix("top"))
            .ok_or_else(bad)?;
        match k.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Criterion::TopK(k)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Criterion {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Criterion {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffReport {
    pub method_a: String,
    pub method_b: String,
    pub criterion: Criterion,
    /// Sorted ascending.
    pub correct_in_a_not_b: Vec<String>,
}

/// Ground-truth sources that `solution` gets right under `criterion`.
pub fn correct_sources(
    solution: &Solution,
    ground_truth: &[GroundTruthLink],
    criterion: Criterion,
) -> Result<Vec<String>> {
    let truth = truth_or_err(solution, ground_truth)?;
    Ok(truth
        .iter()
        .filter(|(s, t)| criterion.accepts(solution.rank_of(s, t)))
        .map(|(s, _)| s.clone())
        .collect())
}

/// Sources correct under `criterion` in `a` and incorrect in `b`.
pub fn diff(
    a: &Solution,
    b: &Solution,
    ground_truth: &[GroundTruthLink],
    criterion: Criterion,
) -> Result<DiffReport> {
    if (&a.source_platform, &a.target_platform) != (&b.source_platform, &b.target_platform) {
        return Err(EvalError::PlatformMismatch {
            a: format!("{} -> {}", a.source_platform, a.target_platform),
            b: format!("{} -> {}", b.source_platform, b.target_platform),
        });
    }
    let truth = truth_or_err(a, ground_truth)?;
    let correct_in_a_not_b = truth
        .iter()
        .filter(|(s, t)| criterion.accepts(a.rank_of(s, t)) && !criterion.accepts(b.rank_of(s, t)))
        .map(|(s, _)| s.clone())
        .collect();
    Ok(DiffReport {
        method_a: a.method.method_id.clone(),
        method_b: b.method.method_id.clone(),
        criterion,
        correct_in_a_not_b,
    })
}
