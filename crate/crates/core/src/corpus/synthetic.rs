//! Seeded two-platform datasets with planted cross-platform links.
//!
//! Every synthetic person owns one account on each of two platforms. The
//! generator controls how often the two usernames differ, how many follow
//! edges the two ego networks share, and how much vocabulary the two posting
//! histories share. A fraction of source accounts declare their counterpart
//! handle in their bio, which [`extract_ground_truth`](super::extract_ground_truth)
//! can recover with [`DECLARED_HANDLE_PATTERN`].

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    ContentPost, CorpusError, Dataset, Directedness, GroundTruthLink, IdentityRef, Platform,
    Provenance, RelationshipEdge, Result, UserIdentity,
};
use crate::ngram;

pub const SOURCE_PLATFORM: &str = "twitter";
pub const TARGET_PLATFORM: &str = "foursquare";
/// Matches the declarations written into source bios.
pub const DECLARED_HANDLE_PATTERN: &str = r"foursquare:\s*(\S+)";

const FIRST_NAMES: &[&str] = &[
    "roy", "ming", "philips", "eepeng", "bernard", "benedict", "joelle", "wei", "hui", "jun",
    "kai", "lina", "amir", "siti", "ravi", "priya", "chen", "mei", "aaron", "shawn", "grace",
    "ivy", "jason", "kelvin", "nadia", "omar", "quinn", "rachel", "sean", "tara", "umar",
    "vera", "wendy", "xavier", "yusuf", "zara", "darren", "elaine", "farah", "gavin",
];
const LAST_NAMES: &[&str] = &[
    "lee", "tan", "lim", "ng", "wong", "goh", "chua", "koh", "teo", "ong", "soon", "hee",
    "prasetyo", "kumar", "singh", "rahman", "chan", "yeo", "low", "sim", "toh", "ho", "chong",
    "pang", "seah", "quek", "foo", "heng", "kwek", "yap", "loh", "tay", "aziz", "menon",
    "pillai", "nair", "ismail", "huang", "zhang", "liu",
];
const VOCAB: &[&str] = &[
    "food", "coffee", "laksa", "chicken", "rice", "noodles", "dessert", "brunch", "family",
    "kids", "weekend", "beach", "travel", "flight", "hotel", "museum", "music", "concert",
    "guitar", "football", "running", "marathon", "gym", "yoga", "cycling", "photography",
    "sunset", "camera", "coding", "startup", "design", "python", "data", "research",
    "lecture", "campus", "exam", "library", "books", "novel", "movie", "cinema", "netflix",
    "gaming", "anime", "shopping", "fashion", "sneakers", "market", "hawker", "durian",
    "mango", "tea", "bubble", "bakery", "pizza", "sushi", "ramen", "curry", "satay", "garden",
    "hiking", "island", "rain", "weather", "church", "temple", "festival", "lantern",
    "fireworks", "wedding", "birthday", "party", "friends", "office", "meeting", "train",
    "bus", "airport", "holiday",
];
const BIO_WORDS: &[&str] = &[
    "foodie", "dad", "mum", "engineer", "student", "traveller", "runner", "gamer",
    "photographer", "designer", "teacher", "singapore", "coffee", "addict", "dreamer",
    "builder", "reader", "writer", "lover", "of", "life", "and", "music", "tech",
];
const EDIT_ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789_";

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticParams {
    pub seed: u64,
    pub n_users: usize,
    /// Probability that a person's two usernames differ.
    pub username_mutation_rate: f64,
    /// Probability that a source follow edge is mirrored between counterparts.
    pub neighbor_overlap: f64,
    /// Probability that a target-platform post word comes from the person's own topics.
    pub content_overlap: f64,
    /// Probability that a source bio declares the counterpart handle.
    pub declare_rate: f64,
    pub avg_out_degree: usize,
    pub posts_per_user: usize,
}

impl SyntheticParams {
    pub fn new(seed: u64, n_users: usize) -> Self {
        Self {
            seed,
            n_users,
            username_mutation_rate: 0.0,
            neighbor_overlap: 0.5,
            content_overlap: 0.5,
            declare_rate: 0.5,
            avg_out_degree: 4,
            posts_per_user: 3,
        }
    }

    pub fn mutation_rate(mut self, rate: f64) -> Self {
        self.username_mutation_rate = rate;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_users < 2 {
            return Err(CorpusError::InvalidParameter(format!(
                "n_users must be at least 2, got {}",
                self.n_users
            )));
        }
        for (name, v) in [
            ("username_mutation_rate", self.username_mutation_rate),
            ("neighbor_overlap", self.neighbor_overlap),
            ("content_overlap", self.content_overlap),
            ("declare_rate", self.declare_rate),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(CorpusError::InvalidParameter(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// What the generator planted: the true pairing of every person, and the
/// subset whose source bio declares the target handle.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticLedger {
    pub links: Vec<GroundTruthLink>,
    pub declared: Vec<GroundTruthLink>,
}

pub fn source_user_id(person: usize) -> String {
    format!("t{person:06}")
}

pub fn target_user_id(person: usize) -> String {
    format!("f{person:06}")
}

fn gram_signature(name: &str) -> Vec<(String, u32)> {
    let mut grams = ngram::tokenize(name, ngram::DEFAULT_GRAM_LEN).expect("generated names are non-empty");
    grams.sort();
    grams
}

fn candidate_username(rng: &mut impl Rng) -> String {
    let first = FIRST_NAMES.choose(rng).unwrap();
    let last = LAST_NAMES.choose(rng).unwrap();
    let mut name = match rng.gen_range(0..5) {
        0 => format!("{first}{last}"),
        1 => format!("{first}_{last}"),
        2 => format!("{}{last}", &first[..1]),
        3 => format!("{first}{}", &last[..1]),
        _ => format!("{last}{first}"),
    };
    match rng.gen_range(0..4) {
        0 => {}
        1 => name.push_str(&rng.gen_range(0..10).to_string()),
        2 => name.push_str(&rng.gen_range(10..100).to_string()),
        _ => name.push_str(&rng.gen_range(1000..10000).to_string()),
    }
    name
}

/// `n` distinct usernames whose 3-gram multisets are also pairwise distinct,
/// so no two of them have identical name vectors.
pub fn synthetic_usernames(seed: u64, n: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    unique_usernames(&mut rng, n)
}

fn unique_usernames(rng: &mut impl Rng, n: usize) -> Vec<String> {
    let mut names = Vec::with_capacity(n);
    let mut seen = HashSet::with_capacity(n);
    let mut signatures = HashSet::with_capacity(n);
    while names.len() < n {
        let name = candidate_username(rng);
        if seen.contains(&name) {
            continue;
        }
        if signatures.insert(gram_signature(&name)) {
            seen.insert(name.clone());
            names.push(name);
        }
    }
    names
}

fn mutate(rng: &mut impl Rng, name: &str) -> String {
    let mut chars: Vec<u8> = name.bytes().collect();
    let edits = rng.gen_range(1..=2);
    for _ in 0..edits {
        let c = *EDIT_ALPHABET.choose(rng).unwrap();
        match rng.gen_range(0..4) {
            0 => {
                let i = rng.gen_range(0..chars.len());
                chars[i] = c;
            }
            1 => {
                let i = rng.gen_range(0..=chars.len());
                chars.insert(i, c);
            }
            2 if chars.len() > 3 => {
                let i = rng.gen_range(0..chars.len());
                chars.remove(i);
            }
            _ if chars.len() > 1 => {
                let i = rng.gen_range(0..chars.len() - 1);
                chars.swap(i, i + 1);
            }
            _ => chars.push(c),
        }
    }
    String::from_utf8(chars).expect("ascii edits")
}

fn words(rng: &mut impl Rng, pool: &[&str]) -> Vec<String> {
    let len = rng.gen_range(2..6);
    (0..len).map(|_| pool.choose(rng).unwrap().to_string()).collect()
}

fn screen_name(username: &str) -> String {
    let letters: String = username
        .chars()
        .map(|c| if c.is_ascii_alphabetic() { c } else { ' ' })
        .collect();
    letters
        .split_whitespace()
        .map(|w| {
            let mut cs = w.chars();
            match cs.next() {
                Some(f) => f.to_ascii_uppercase().to_string() + cs.as_str(),
                None => String::new(),
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Generates the dataset and its planted-link ledger. The dataset's ground
/// truth holds every planted link (provenance `synthetic`).
pub fn generate_synthetic_dataset(params: &SyntheticParams) -> Result<(Dataset, SyntheticLedger)> {
    params.validate()?;
    let n = params.n_users;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let source_names = unique_usernames(&mut rng, n);
    let mut used: HashSet<String> = source_names.iter().cloned().collect();
    let mut target_names = Vec::with_capacity(n);
    for name in &source_names {
        if rng.gen_bool(params.username_mutation_rate) {
            let mutated = loop {
                let candidate = mutate(&mut rng, name);
                if !used.contains(&candidate) {
                    break candidate;
                }
            };
            used.insert(mutated.clone());
            target_names.push(mutated);
        } else {
            target_names.push(name.clone());
        }
    }

    let mut identities = Vec::with_capacity(2 * n);
    let mut links = Vec::with_capacity(n);
    let mut declared = Vec::new();
    let mut target_identities = Vec::with_capacity(n);
    for person in 0..n {
        let display = screen_name(&source_names[person]);
        let mut bio = words(&mut rng, BIO_WORDS).join(" ");
        let link = GroundTruthLink {
            source: IdentityRef::new(SOURCE_PLATFORM, source_user_id(person)),
            target: IdentityRef::new(TARGET_PLATFORM, target_user_id(person)),
            provenance: Provenance::Synthetic,
        };
        if rng.gen_bool(params.declare_rate) {
            bio.push_str(&format!(" | foursquare: {}", target_names[person]));
            declared.push(GroundTruthLink {
                provenance: Provenance::DeclaredBio,
                ..link.clone()
            });
        }
        links.push(link);
        identities.push(
            UserIdentity::new(SOURCE_PLATFORM, source_user_id(person), &source_names[person])
                .with_screen_name(display.clone())
                .with_bio(bio),
        );
        let target_bio = words(&mut rng, BIO_WORDS).join(" ");
        target_identities.push(
            UserIdentity::new(TARGET_PLATFORM, target_user_id(person), &target_names[person])
                .with_screen_name(display)
                .with_bio(target_bio),
        );
    }
    identities.extend(target_identities);

    let max_edges = n * (n - 1);
    let wanted = (n * params.avg_out_degree).min(max_edges);
    let mut source_edges = Vec::with_capacity(wanted);
    let mut seen = HashSet::with_capacity(wanted);
    while source_edges.len() < wanted {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && seen.insert((a, b)) {
            source_edges.push((a, b));
        }
    }
    let mut target_edges = Vec::with_capacity(wanted);
    let mut target_seen = BTreeSet::new();
    for &(a, b) in &source_edges {
        let pair = if rng.gen_bool(params.neighbor_overlap) {
            Some((a, b))
        } else {
            (0..16).find_map(|_| {
                let c = rng.gen_range(0..n);
                let d = rng.gen_range(0..n);
                (c != d && !target_seen.contains(&(c, d))).then_some((c, d))
            })
        };
        if let Some(pair) = pair {
            if target_seen.insert(pair) {
                target_edges.push(pair);
            }
        }
    }
    let mut edges = Vec::with_capacity(source_edges.len() + target_edges.len());
    edges.extend(source_edges.iter().map(|&(a, b)| {
        RelationshipEdge::new(SOURCE_PLATFORM, source_user_id(a), source_user_id(b))
    }));
    edges.extend(target_edges.iter().map(|&(a, b)| {
        RelationshipEdge::new(TARGET_PLATFORM, target_user_id(a), target_user_id(b))
    }));

    let mut posts = Vec::with_capacity(2 * n * params.posts_per_user);
    let base_time: i64 = 1_500_000_000;
    for person in 0..n {
        let topics: Vec<&str> = VOCAB.choose_multiple(&mut rng, 5).copied().collect();
        for (platform, author, own_rate) in [
            (SOURCE_PLATFORM, source_user_id(person), 0.7),
            (TARGET_PLATFORM, target_user_id(person), params.content_overlap),
        ] {
            for _ in 0..params.posts_per_user {
                let len = rng.gen_range(3..9);
                let text = (0..len)
                    .map(|_| {
                        if rng.gen_bool(own_rate) {
                            *topics.choose(&mut rng).unwrap()
                        } else {
                            *VOCAB.choose(&mut rng).unwrap()
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" ");
                let mut post = ContentPost::new(platform, author.clone(), text);
                post.timestamp = Some(base_time + rng.gen_range(0..100_000_000));
                posts.push(post);
            }
        }
    }

    let dataset = Dataset::new(
        format!("synthetic-seed{}-n{}", params.seed, n),
        vec![
            Platform::new(SOURCE_PLATFORM, Directedness::Directed),
            Platform::new(TARGET_PLATFORM, Directedness::Directed),
        ],
        identities,
        edges,
        posts,
        links.clone(),
    )?;
    Ok((dataset, SyntheticLedger { links, declared }))
}
