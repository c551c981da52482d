//! Username n-gram inverted index with inverse-name-frequency weighting.
//!
//! A name is represented as a sparse vector over its n-grams. The weight of
//! gram `g` is `count(g in name) * inf(g)`, where `inf(g) = 1 / df(g)` and
//! `df(g)` is the number of indexed names containing `g`. Names are compared
//! with cosine similarity.
//!
//! All sums (dot products and squared norms) are taken over their terms in
//! ascending order of value. This makes a score depend only on the multiset
//! of terms, so mathematically tied candidates get bit-identical scores and
//! the `(score, username, id)` ordering is reproducible no matter how the
//! candidates were discovered.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use indexmap::IndexSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_GRAM_LEN: usize = 3;
pub const SNAPSHOT_VERSION: &str = "linky-ngram-index/1";

/// Slack used when pruning candidates by their accumulated score before the
/// exact rescoring pass. Far above accumulation rounding error.
const PRUNE_SLACK: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum IndexError {
    #[error("username is empty")]
    EmptyUsername,
    #[error("gram length must be at least 1")]
    InvalidGramLength,
    #[error("k must be at least 1")]
    InvalidK,
    #[error("duplicate name id `{0}`")]
    DuplicateNameId(String),
    #[error("unknown name id `{0}`")]
    UnknownNameId(String),
    #[error("invalid index snapshot: {0}")]
    Snapshot(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = IndexError> = std::result::Result<T, E>;

/// Lowercases a username. Every character is kept: no padding, no stripping.
pub fn normalize(username: &str) -> String {
    username.to_lowercase()
}

/// Splits a username into its overlapping grams of length `n`, with counts,
/// in order of first occurrence. Names shorter than `n` yield one gram: the
/// whole normalized name.
pub fn tokenize(username: &str, n: usize) -> Result<Vec<(String, u32)>> {
    if n == 0 {
        return Err(IndexError::InvalidGramLength);
    }
    if username.is_empty() {
        return Err(IndexError::EmptyUsername);
    }
    let chars: Vec<char> = normalize(username).chars().collect();
    if chars.len() < n {
        return Ok(vec![(chars.into_iter().collect(), 1)]);
    }
    let mut grams: Vec<(String, u32)> = Vec::with_capacity(chars.len() - n + 1);
    let mut positions: HashMap<String, usize> = HashMap::new();
    for window in chars.windows(n) {
        let gram: String = window.iter().collect();
        match positions.get(&gram) {
            Some(&i) => grams[i].1 += 1,
            None => {
                positions.insert(gram.clone(), grams.len());
                grams.push((gram, 1));
            }
        }
    }
    Ok(grams)
}

/// Sum of non-negative terms in ascending order.
fn ordered_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_unstable_by(f64::total_cmp);
    terms.into_iter().sum()
}

fn weight(count: u32, inf: f64) -> f64 {
    count as f64 * inf
}

fn cosine_from_parts(dot: f64, norm_a: f64, norm_b: f64) -> f64 {
    if norm_a == 0.0 || norm_b == 0.0 {
        return 0.0;
    }
    (dot / (norm_a * norm_b)).clamp(0.0, 1.0)
}

/// Gram → weight map for one name, sorted by gram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseNameVector {
    pub owner: Option<String>,
    pub entries: Vec<(String, f64)>,
}

impl SparseNameVector {
    pub fn norm(&self) -> f64 {
        ordered_sum(self.entries.iter().map(|(_, w)| w * w).collect()).sqrt()
    }

    pub fn weight(&self, gram: &str) -> Option<f64> {
        self.entries
            .binary_search_by(|(g, _)| g.as_str().cmp(gram))
            .ok()
            .map(|i| self.entries[i].1)
    }
}

/// `θ_a · θ_b / (‖θ_a‖ ‖θ_b‖)`, clamped into `[0, 1]`.
pub fn cosine_similarity(a: &SparseNameVector, b: &SparseNameVector) -> f64 {
    let mut products = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.entries.len() && j < b.entries.len() {
        match a.entries[i].0.cmp(&b.entries[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                products.push(a.entries[i].1 * b.entries[j].1);
                i += 1;
                j += 1;
            }
        }
    }
    cosine_from_parts(ordered_sum(products), a.norm(), b.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct Posting {
    name: u32,
    count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct IndexedName {
    id: String,
    name: String,
}

/// One ranked result of a [`InvertedIndex::top_k`] query.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredName {
    pub id: String,
    /// Normalized username.
    pub username: String,
    pub score: f64,
}

/// Restricts a query to a subset of the indexed names.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    allowed: Vec<bool>,
}

impl CandidateSet {
    fn allows(&self, name: u32) -> bool {
        self.allowed[name as usize]
    }
}

#[derive(Debug, Clone)]
pub struct InvertedIndex {
    n: usize,
    grams: IndexSet<String>,
    postings: Vec<Vec<Posting>>,
    names: Vec<IndexedName>,
    by_id: HashMap<String, u32>,
    /// Per name: (gram id, count), sorted by gram id.
    vectors: Vec<Vec<(u32, u32)>>,
    norms: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    version: String,
    n: usize,
    names: Vec<IndexedName>,
    grams: Vec<String>,
    postings: Vec<Vec<(u32, u32)>>,
}

impl InvertedIndex {
    /// Indexes `(name id, username)` pairs. Every entry counts as one name
    /// for document frequency, even if two entries share a username.
    pub fn build<I, S, T>(names: I, n: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: AsRef<str>,
    {
        if n == 0 {
            return Err(IndexError::InvalidGramLength);
        }
        let mut index = Self {
            n,
            grams: IndexSet::new(),
            postings: Vec::new(),
            names: Vec::new(),
            by_id: HashMap::new(),
            vectors: Vec::new(),
            norms: Vec::new(),
        };
        for (id, username) in names {
            let id: String = id.into();
            if index.by_id.contains_key(&id) {
                return Err(IndexError::DuplicateNameId(id));
            }
            let name_idx = index.names.len() as u32;
            let mut vector = Vec::new();
            for (gram, count) in tokenize(username.as_ref(), n)? {
                let (gid, fresh) = index.grams.insert_full(gram);
                if fresh {
                    index.postings.push(Vec::new());
                }
                index.postings[gid].push(Posting {
                    name: name_idx,
                    count,
                });
                vector.push((gid as u32, count));
            }
            vector.sort_unstable();
            index.by_id.insert(id.clone(), name_idx);
            index.names.push(IndexedName {
                id,
                name: normalize(username.as_ref()),
            });
            index.vectors.push(vector);
        }
        index.compute_norms();
        Ok(index)
    }

    fn compute_norms(&mut self) {
        let norms = self
            .vectors
            .par_iter()
            .map(|vector| {
                ordered_sum(
                    vector
                        .iter()
                        .map(|&(g, c)| {
                            let w = weight(c, self.inf_by_id(g));
                            w * w
                        })
                        .collect(),
                )
                .sqrt()
            })
            .collect();
        self.norms = norms;
    }

    pub fn gram_len(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn gram_count(&self) -> usize {
        self.grams.len()
    }

    fn inf_by_id(&self, gid: u32) -> f64 {
        1.0 / self.postings[gid as usize].len() as f64
    }

    /// Number of distinct indexed names containing `gram`.
    pub fn name_count(&self, gram: &str) -> usize {
        self.grams
            .get_index_of(gram)
            .map_or(0, |g| self.postings[g].len())
    }

    /// Inverse name frequency. Grams absent from the index get 1.
    pub fn inf(&self, gram: &str) -> f64 {
        self.grams
            .get_index_of(gram)
            .map_or(1.0, |g| self.inf_by_id(g as u32))
    }

    /// `(name id, count)` for every indexed name containing `gram`.
    pub fn postings(&self, gram: &str) -> Vec<(&str, u32)> {
        self.grams
            .get_index_of(gram)
            .map(|g| {
                self.postings[g]
                    .iter()
                    .map(|p| (self.names[p.name as usize].id.as_str(), p.count))
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn grams(&self) -> impl Iterator<Item = &str> {
        self.grams.iter().map(String::as_str)
    }

    pub fn norm(&self, id: &str) -> Option<f64> {
        self.by_id.get(id).map(|&i| self.norms[i as usize])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    /// `(id, normalized username)` in insertion order.
    pub fn names(&self) -> impl Iterator<Item = (&str, &str)> {
        self.names.iter().map(|n| (n.id.as_str(), n.name.as_str()))
    }

    /// Weights each gram of `username` by its count and the index's INF.
    pub fn vectorize(&self, username: &str) -> Result<SparseNameVector> {
        let mut entries: Vec<(String, f64)> = tokenize(username, self.n)?
            .into_iter()
            .map(|(gram, count)| {
                let w = weight(count, self.inf(&gram));
                (gram, w)
            })
            .collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(SparseNameVector {
            owner: None,
            entries,
        })
    }

    /// Vector of an indexed name.
    pub fn vector_of(&self, id: &str) -> Result<SparseNameVector> {
        let idx = *self
            .by_id
            .get(id)
            .ok_or_else(|| IndexError::UnknownNameId(id.to_string()))?;
        let mut v = self.vectorize(&self.names[idx as usize].name)?;
        v.owner = Some(id.to_string());
        Ok(v)
    }

    pub fn candidate_set<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> Result<CandidateSet> {
        let mut allowed = vec![false; self.names.len()];
        for id in ids {
            let idx = self
                .by_id
                .get(id)
                .ok_or_else(|| IndexError::UnknownNameId(id.to_string()))?;
            allowed[*idx as usize] = true;
        }
        Ok(CandidateSet { allowed })
    }

    /// Ranks indexed names by decreasing cosine similarity to `query`.
    ///
    /// Only names sharing at least one gram with the query are scored; ties
    /// are broken by normalized username, then name id. At most `k` results.
    pub fn top_k(
        &self,
        query: &str,
        k: usize,
        candidates: Option<&CandidateSet>,
    ) -> Result<Vec<ScoredName>> {
        if k == 0 {
            return Err(IndexError::InvalidK);
        }
        let grams = tokenize(query, self.n)?;
        let mut query_terms: Vec<(u32, f64)> = Vec::with_capacity(grams.len());
        let mut squares = Vec::with_capacity(grams.len());
        for (gram, count) in &grams {
            match self.grams.get_index_of(gram.as_str()) {
                Some(g) => {
                    let w = weight(*count, self.inf_by_id(g as u32));
                    query_terms.push((g as u32, w));
                    squares.push(w * w);
                }
                None => {
                    let w = weight(*count, 1.0);
                    squares.push(w * w);
                }
            }
        }
        query_terms.sort_unstable_by_key(|&(g, _)| g);
        let query_norm = ordered_sum(squares).sqrt();

        let mut acc = vec![0.0f64; self.names.len()];
        let mut touched: Vec<u32> = Vec::new();
        for &(g, qw) in &query_terms {
            let inf = self.inf_by_id(g);
            for p in &self.postings[g as usize] {
                if candidates.is_some_and(|c| !c.allows(p.name)) {
                    continue;
                }
                let slot = &mut acc[p.name as usize];
                if *slot == 0.0 {
                    touched.push(p.name);
                }
                *slot += qw * weight(p.count, inf);
            }
        }

        let mut approx: Vec<(u32, f64)> = touched
            .into_iter()
            .map(|name| {
                let s = cosine_from_parts(acc[name as usize], query_norm, self.norms[name as usize]);
                (name, s)
            })
            .collect();
        if approx.len() > k {
            let (_, kth, _) =
                approx.select_nth_unstable_by(k - 1, |a, b| b.1.total_cmp(&a.1));
            let threshold = kth.1 - PRUNE_SLACK;
            approx.retain(|&(_, s)| s >= threshold);
        }

        let mut scored: Vec<(u32, f64)> = approx
            .into_iter()
            .map(|(name, _)| (name, self.exact_score(&query_terms, query_norm, name)))
            .collect();
        scored.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then_with(|| self.names[a.0 as usize].name.cmp(&self.names[b.0 as usize].name))
                .then_with(|| self.names[a.0 as usize].id.cmp(&self.names[b.0 as usize].id))
        });
        scored.truncate(k);
        Ok(scored
            .into_iter()
            .map(|(name, score)| {
                let entry = &self.names[name as usize];
                ScoredName {
                    id: entry.id.clone(),
                    username: entry.name.clone(),
                    score,
                }
            })
            .collect())
    }

    fn exact_score(&self, query_terms: &[(u32, f64)], query_norm: f64, name: u32) -> f64 {
        let vector = &self.vectors[name as usize];
        let mut products = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < query_terms.len() && j < vector.len() {
            let (qg, qw) = query_terms[i];
            let (ng, count) = vector[j];
            match qg.cmp(&ng) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    products.push(qw * weight(count, self.inf_by_id(ng)));
                    i += 1;
                    j += 1;
                }
            }
        }
        cosine_from_parts(ordered_sum(products), query_norm, self.norms[name as usize])
    }

    /// Answers many queries in parallel; output order follows `queries`.
    pub fn top_k_batch<Q: AsRef<str> + Sync>(
        &self,
        queries: &[Q],
        k: usize,
        candidates: Option<&CandidateSet>,
    ) -> Vec<Result<Vec<ScoredName>>> {
        queries
            .par_iter()
            .map(|q| self.top_k(q.as_ref(), k, candidates))
            .collect()
    }

    pub fn to_snapshot_string(&self) -> String {
        let snapshot = Snapshot {
            version: SNAPSHOT_VERSION.to_string(),
            n: self.n,
            names: self.names.clone(),
            grams: self.grams.iter().cloned().collect(),
            postings: self
                .postings
                .iter()
                .map(|list| list.iter().map(|p| (p.name, p.count)).collect())
                .collect(),
        };
        serde_json::to_string(&snapshot).expect("snapshot serializes")
    }

    /// Restores an index from its snapshot without re-tokenizing any name.
    pub fn from_snapshot_str(text: &str) -> Result<Self> {
        let snapshot: Snapshot =
            serde_json::from_str(text).map_err(|e| IndexError::Snapshot(e.to_string()))?;
        if snapshot.version != SNAPSHOT_VERSION {
            return Err(IndexError::Snapshot(format!(
                "unsupported version `{}`",
                snapshot.version
            )));
        }
        if snapshot.n == 0 {
            return Err(IndexError::InvalidGramLength);
        }
        if snapshot.grams.len() != snapshot.postings.len() {
            return Err(IndexError::Snapshot("gram and posting counts differ".into()));
        }
        let mut by_id = HashMap::with_capacity(snapshot.names.len());
        for (i, entry) in snapshot.names.iter().enumerate() {
            if by_id.insert(entry.id.clone(), i as u32).is_some() {
                return Err(IndexError::DuplicateNameId(entry.id.clone()));
            }
        }
        let grams: IndexSet<String> = snapshot.grams.into_iter().collect();
        if grams.len() != snapshot.postings.len() {
            return Err(IndexError::Snapshot("duplicate gram".into()));
        }
        let mut vectors = vec![Vec::new(); snapshot.names.len()];
        let mut postings = Vec::with_capacity(snapshot.postings.len());
        for (g, list) in snapshot.postings.into_iter().enumerate() {
            if list.is_empty() {
                return Err(IndexError::Snapshot(format!("gram {g} has no postings")));
            }
            let mut out = Vec::with_capacity(list.len());
            for (name, count) in list {
                let slot = vectors.get_mut(name as usize).ok_or_else(|| {
                    IndexError::Snapshot(format!("posting references name {name}"))
                })?;
                if count == 0 || slot.last().is_some_and(|&(last, _)| last == g as u32) {
                    return Err(IndexError::Snapshot(format!("bad posting for gram {g}")));
                }
                slot.push((g as u32, count));
                out.push(Posting { name, count });
            }
            postings.push(out);
        }
        if vectors.iter().any(Vec::is_empty) {
            return Err(IndexError::Snapshot("name without grams".into()));
        }
        let mut index = Self {
            n: snapshot.n,
            grams,
            postings,
            names: snapshot.names,
            by_id,
            vectors,
            norms: Vec::new(),
        };
        index.compute_norms();
        Ok(index)
    }

    pub fn save_snapshot(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_snapshot_string()).map_err(|source| IndexError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load_snapshot(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| IndexError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_snapshot_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair_corpus() -> InvertedIndex {
        InvertedIndex::build([("1", "abcd"), ("2", "abce")], 3).unwrap()
    }

    fn grams_of(username: &str, n: usize) -> Vec<(String, u32)> {
        let mut g = tokenize(username, n).unwrap();
        g.sort();
        g
    }

    #[test]
    fn tokenize_contiguous() {
        assert_eq!(
            tokenize("roylee", 3).unwrap(),
            vec![
                ("roy".to_string(), 1),
                ("oyl".to_string(), 1),
                ("yle".to_string(), 1),
                ("lee".to_string(), 1)
            ]
        );
    }

    #[test]
    fn tokenize_overlapping_repeats_lowercased() {
        assert_eq!(grams_of("AAAA", 3), vec![("aaa".to_string(), 2)]);
    }

    #[test]
    fn tokenize_short_name_fallback() {
        assert_eq!(tokenize("ab", 3).unwrap(), vec![("ab".to_string(), 1)]);
    }

    #[test]
    fn tokenize_keeps_symbols_and_digits() {
        assert_eq!(
            grams_of("r_1", 2),
            vec![("_1".to_string(), 1), ("r_".to_string(), 1)]
        );
    }

    #[test]
    fn tokenize_errors() {
        assert!(matches!(tokenize("", 3), Err(IndexError::EmptyUsername)));
        assert!(matches!(tokenize("abc", 0), Err(IndexError::InvalidGramLength)));
    }

    #[test]
    fn name_counts_for_pair_corpus() {
        let index = pair_corpus();
        assert_eq!(index.name_count("abc"), 2);
        assert_eq!(index.name_count("bcd"), 1);
        assert_eq!(index.name_count("bce"), 1);
        assert_eq!(index.gram_count(), 3);
    }

    #[test]
    fn single_name_corpus_has_unit_inf() {
        let index = InvertedIndex::build([("x", "xyz")], 3).unwrap();
        assert_eq!(index.inf("xyz"), 1.0);
    }

    #[test]
    fn duplicate_id_rejected() {
        let err = InvertedIndex::build([("a", "foo"), ("a", "bar")], 3).unwrap_err();
        assert!(matches!(err, IndexError::DuplicateNameId(id) if id == "a"));
    }

    #[test]
    fn vectorize_pair_corpus() {
        let v = pair_corpus().vectorize("abcd").unwrap();
        assert_eq!(
            v.entries,
            vec![("abc".to_string(), 0.5), ("bcd".to_string(), 1.0)]
        );
    }

    #[test]
    fn vectorize_unseen_grams_unit_inf() {
        let v = pair_corpus().vectorize("zzzzq").unwrap();
        assert_eq!(
            v.entries,
            vec![("zzq".to_string(), 1.0), ("zzz".to_string(), 2.0)]
        );
    }

    #[test]
    fn vectorize_repeated_gram() {
        let index =
            InvertedIndex::build([("1", "aaab"), ("2", "baaa"), ("3", "xaaa"), ("4", "aaay")], 3)
                .unwrap();
        assert_eq!(index.name_count("aaa"), 4);
        let v = index.vectorize("aaaa").unwrap();
        assert_eq!(v.entries, vec![("aaa".to_string(), 0.5)]);
    }

    #[test]
    fn worked_cosine_value() {
        let index = pair_corpus();
        let a = index.vectorize("abcd").unwrap();
        let b = index.vectorize("abce").unwrap();
        assert!((cosine_similarity(&a, &b) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn cosine_identity_and_disjoint() {
        let index = pair_corpus();
        let a = index.vectorize("abcd").unwrap();
        assert!((cosine_similarity(&a, &a) - 1.0).abs() < 1e-12);
        let z = index.vectorize("qqq").unwrap();
        assert_eq!(cosine_similarity(&a, &z), 0.0);
    }

    #[test]
    fn top_k_self_match_and_no_candidates() {
        let index = InvertedIndex::build([("1", "roylee"), ("2", "roy_lee87"), ("3", "zed")], 3)
            .unwrap();
        let hits = index.top_k("RoyLee", 3, None).unwrap();
        assert_eq!(hits[0].id, "1");
        assert!((hits[0].score - 1.0).abs() < 1e-12);
        assert!(index.top_k("qqqq", 3, None).unwrap().is_empty());
        assert!(matches!(index.top_k("roy", 0, None), Err(IndexError::InvalidK)));
    }

    #[test]
    fn top_k_tie_breaks_by_username_then_id() {
        let index =
            InvertedIndex::build([("d", "abcx"), ("c", "abcx"), ("b", "abcy"), ("a", "abcy")], 3)
                .unwrap();
        let hits = index.top_k("abc", 4, None).unwrap();
        let ids: Vec<&str> = hits.iter().map(|h| h.id.as_str()).collect();
        assert_eq!(ids, ["c", "d", "a", "b"]);
        assert!(hits.windows(2).all(|w| w[0].score == w[1].score));
    }

    #[test]
    fn candidate_restriction() {
        let index = InvertedIndex::build([("s", "roylee"), ("t", "roylee1")], 3).unwrap();
        let only_t = index.candidate_set(["t"]).unwrap();
        let hits = index.top_k("roylee", 5, Some(&only_t)).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].id, "t");
        assert!(index.candidate_set(["nope"]).is_err());
    }

    #[test]
    fn snapshot_round_trip() {
        let index = InvertedIndex::build(
            [("1", "roylee"), ("2", "roy_lee87"), ("3", "bernard"), ("4", "ab")],
            3,
        )
        .unwrap();
        let back = InvertedIndex::from_snapshot_str(&index.to_snapshot_string()).unwrap();
        for q in ["roylee", "bernnn", "ab", "lee"] {
            assert_eq!(index.top_k(q, 4, None).unwrap(), back.top_k(q, 4, None).unwrap());
        }
        let bad = index.to_snapshot_string().replace(SNAPSHOT_VERSION, "v0");
        assert!(matches!(
            InvertedIndex::from_snapshot_str(&bad),
            Err(IndexError::Snapshot(_))
        ));
    }

    fn name_strategy() -> impl Strategy<Value = String> {
        "[a-e_1]{1,8}"
    }

    proptest! {
        #[test]
        fn cosine_symmetric_bounded_reflexive(
            corpus in prop::collection::vec(name_strategy(), 1..20),
            a in name_strategy(),
            b in name_strategy(),
        ) {
            let index = InvertedIndex::build(
                corpus.iter().enumerate().map(|(i, n)| (i.to_string(), n.as_str())),
                3,
            ).unwrap();
            let va = index.vectorize(&a).unwrap();
            let vb = index.vectorize(&b).unwrap();
            let ab = cosine_similarity(&va, &vb);
            prop_assert_eq!(ab, cosine_similarity(&vb, &va));
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert!((cosine_similarity(&va, &va) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn inf_is_one_iff_single_containing_name(
            corpus in prop::collection::vec(name_strategy(), 1..30),
        ) {
            let index = InvertedIndex::build(
                corpus.iter().enumerate().map(|(i, n)| (i.to_string(), n.as_str())),
                3,
            ).unwrap();
            for gram in index.grams() {
                let inf = index.inf(gram);
                prop_assert!(inf > 0.0 && inf <= 1.0);
                prop_assert_eq!(inf == 1.0, index.name_count(gram) == 1);
                prop_assert_eq!(index.postings(gram).len(), index.name_count(gram));
            }
        }

        #[test]
        fn rebuild_is_deterministic(
            corpus in prop::collection::vec(name_strategy(), 1..30),
            q in name_strategy(),
        ) {
            let build = || InvertedIndex::build(
                corpus.iter().enumerate().map(|(i, n)| (i.to_string(), n.as_str())),
                3,
            ).unwrap();
            let (x, y) = (build(), build());
            prop_assert_eq!(x.to_snapshot_string(), y.to_snapshot_string());
            prop_assert_eq!(x.top_k(&q, 50, None).unwrap(), y.top_k(&q, 50, None).unwrap());
        }
    }
}
