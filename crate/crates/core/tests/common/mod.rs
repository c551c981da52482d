//! Test-only reference implementations, written without the library's index.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;

use linky_core::corpus::{IdentityRef, Provenance};
use linky_core::linkage::{MethodDescriptor, Origin, RankedCandidate, Solution};
use linky_core::GroundTruthLink;

pub fn demo_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/demo")
}

/// Gram multiset of a username: lowercase, every length-`n` window, or the
/// whole name when it is shorter than `n`.
pub fn grams(name: &str, n: usize) -> BTreeMap<String, u32> {
    let lower: Vec<char> = name.to_lowercase().chars().collect();
    let mut out = BTreeMap::new();
    if lower.len() < n {
        out.insert(lower.iter().collect(), 1);
        return out;
    }
    for start in 0..=lower.len() - n {
        let g: String = lower[start..start + n].iter().collect();
        *out.entry(g).or_insert(0) += 1;
    }
    out
}

fn ascending_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut total = 0.0;
    for t in terms {
        total += t;
    }
    total
}

/// Exhaustive cosine ranking over a fixed corpus.
pub struct BruteForce {
    pub n: usize,
    pub entries: Vec<(String, String, BTreeMap<String, u32>)>,
    pub df: HashMap<String, usize>,
}

impl BruteForce {
    pub fn new<'a>(names: impl IntoIterator<Item = (&'a str, &'a str)>, n: usize) -> Self {
        let mut entries = Vec::new();
        let mut df = HashMap::new();
        for (id, name) in names {
            let g = grams(name, n);
            for gram in g.keys() {
                *df.entry(gram.clone()).or_insert(0) += 1;
            }
            entries.push((id.to_string(), name.to_lowercase(), g));
        }
        Self { n, entries, df }
    }

    fn inf(&self, gram: &str) -> f64 {
        match self.df.get(gram) {
            Some(&d) => 1.0 / d as f64,
            None => 1.0,
        }
    }

    pub fn weights(&self, g: &BTreeMap<String, u32>) -> BTreeMap<String, f64> {
        g.iter()
            .map(|(gram, &c)| (gram.clone(), c as f64 * self.inf(gram)))
            .collect()
    }

    pub fn cosine_of(&self, a: &BTreeMap<String, u32>, b: &BTreeMap<String, u32>) -> f64 {
        let wa = self.weights(a);
        let wb = self.weights(b);
        let dot = ascending_sum(
            wa.iter()
                .filter_map(|(g, x)| wb.get(g).map(|y| x * y))
                .collect(),
        );
        let na = ascending_sum(wa.values().map(|x| x * x).collect()).sqrt();
        let nb = ascending_sum(wb.values().map(|x| x * x).collect()).sqrt();
        if na == 0.0 || nb == 0.0 {
            return 0.0;
        }
        (dot / (na * nb)).clamp(0.0, 1.0)
    }

    pub fn cosine(&self, a: &str, b: &str) -> f64 {
        self.cosine_of(&grams(a, self.n), &grams(b, self.n))
    }

    /// Every entry with a positive score, best first, ties broken by
    /// lowercase name and then id.
    pub fn rank(&self, query: &str, k: usize, allowed: Option<&HashSet<String>>) -> Vec<(String, f64)> {
        let q = grams(query, self.n);
        let mut scored: Vec<(&str, &str, f64)> = self
            .entries
            .iter()
            .filter(|(id, _, _)| allowed.is_none_or(|a| a.contains(id)))
            .map(|(id, name, g)| (id.as_str(), name.as_str(), self.cosine_of(&q, g)))
            .filter(|(_, _, s)| *s > 0.0)
            .collect();
        scored.sort_by(|a, b| {
            b.2.partial_cmp(&a.2)
                .unwrap()
                .then(a.1.cmp(b.1))
                .then(a.0.cmp(b.0))
        });
        scored.truncate(k);
        scored.into_iter().map(|(id, _, s)| (id.to_string(), s)).collect()
    }
}

/// Usernames with deliberate overlap: shared stems, case variants, repeats,
/// and names shorter than the gram length.
pub fn messy_usernames(rng: &mut impl Rng, count: usize) -> Vec<String> {
    const STEMS: &[&str] = &[
        "roy", "lee", "tan", "ming", "bern", "joel", "kai", "amy", "_", "87", "x", "sg", "eat",
    ];
    const ALPHABET: &[u8] = b"abcdeilmnorst_019";
    let mut names: Vec<String> = Vec::with_capacity(count);
    while names.len() < count {
        let name = match rng.gen_range(0..10) {
            0 if !names.is_empty() => names.choose(rng).unwrap().clone(),
            1 if !names.is_empty() => names.choose(rng).unwrap().to_uppercase(),
            2 => (0..rng.gen_range(1..3))
                .map(|_| *ALPHABET.choose(rng).unwrap() as char)
                .collect(),
            3..=5 => (0..rng.gen_range(2..5))
                .map(|_| *STEMS.choose(rng).unwrap())
                .collect(),
            _ => (0..rng.gen_range(3..12))
                .map(|_| *ALPHABET.choose(rng).unwrap() as char)
                .collect(),
        };
        names.push(name);
    }
    names
}

/// A solution with random ranked lists over the given targets. Some sources
/// are left out and some lists miss the true target.
pub fn random_solution(
    rng: &mut impl Rng,
    method_id: &str,
    source_platform: &str,
    target_platform: &str,
    sources: &[String],
    targets: &[String],
    max_len: usize,
) -> Solution {
    let mut predictions = BTreeMap::new();
    for s in sources {
        if rng.gen_bool(0.1) {
            continue;
        }
        let len = rng.gen_range(0..=max_len.min(targets.len()));
        let picked: Vec<&String> = targets.choose_multiple(rng, len).collect();
        let mut scores: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..1.0)).collect();
        scores.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let list = picked
            .into_iter()
            .zip(scores)
            .enumerate()
            .map(|(i, (t, score))| RankedCandidate {
                target: IdentityRef::new(target_platform, t.as_str()),
                score,
                rank: i + 1,
            })
            .collect();
        predictions.insert(s.clone(), list);
    }
    Solution {
        method: MethodDescriptor {
            method_id: method_id.to_string(),
            display_name: method_id.to_string(),
            origin: Origin::Imported,
            parameters: BTreeMap::new(),
        },
        source_platform: source_platform.to_string(),
        target_platform: target_platform.to_string(),
        predictions,
    }
}

/// Reference Prec@1 and MRR computed straight from the definitions.
pub fn reference_metrics(
    solution: &Solution,
    truth: &[(String, String)],
) -> (usize, f64, f64) {
    let mut hits = 0usize;
    let mut rr = BTreeMap::new();
    for (s, t) in truth {
        let list = solution.predictions.get(s).cloned().unwrap_or_default();
        let pos = list.iter().position(|c| &c.target.user_id == t);
        let r = pos.map_or(0.0, |p| 1.0 / (p + 1) as f64);
        if pos == Some(0) {
            hits += 1;
        }
        rr.insert(s.clone(), r);
    }
    let n = rr.len();
    let total: f64 = rr.values().sum();
    (n, hits as f64 / n as f64, total / n as f64)
}

pub fn links(
    source_platform: &str,
    target_platform: &str,
    pairs: &[(String, String)],
) -> Vec<GroundTruthLink> {
    pairs
        .iter()
        .map(|(s, t)| GroundTruthLink {
            source: IdentityRef::new(source_platform, s.as_str()),
            target: IdentityRef::new(target_platform, t.as_str()),
            provenance: Provenance::Manual,
        })
        .collect()
}

/// Ground truth for `sources`, each paired with a distinct random target.
pub fn random_truth(
    rng: &mut impl Rng,
    sources: &[String],
    targets: &[String],
) -> Vec<(String, String)> {
    let mut pool: Vec<&String> = targets.iter().collect();
    pool.shuffle(rng);
    let mut used = BTreeSet::new();
    sources
        .iter()
        .zip(pool)
        .filter(|_| rng.gen_bool(0.8))
        .filter(|(_, t)| used.insert((*t).clone()))
        .map(|(s, t)| (s.clone(), t.clone()))
        .collect()
}
