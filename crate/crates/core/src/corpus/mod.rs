//! Multi-platform user datasets: identities, relationship edges, posts and
//! ground-truth links between accounts of the same person.
//!
//! A [`Dataset`] is validated once at construction and immutable afterwards,
//! so it can be shared freely between threads behind an `Arc`.

mod ego;
mod io;
pub mod synthetic;
mod truth;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use ego::{ego_network, EgoNetwork};
pub use io::{export_dataset, load_dataset, DatasetManifest, RecordCounts, MANIFEST_FILE_NAME};
pub use synthetic::{generate_synthetic_dataset, SyntheticLedger, SyntheticParams};
pub use truth::extract_ground_truth;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{file}:{line}: malformed record: {message}")]
    MalformedRecord {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{file}:{line}: duplicate identity {platform}/{user_id}")]
    DuplicateIdentity {
        file: String,
        line: usize,
        platform: String,
        user_id: String,
    },
    #[error("{file}:{line}: edge endpoint {platform}/{user_id} does not exist")]
    DanglingEdge {
        file: String,
        line: usize,
        platform: String,
        user_id: String,
    },
    #[error("{file}:{line}: self-loop on {platform}/{user_id}")]
    SelfLoop {
        file: String,
        line: usize,
        platform: String,
        user_id: String,
    },
    #[error("{file}:{line}: duplicate edge {from_id} -> {to_id} on {platform}")]
    DuplicateEdge {
        file: String,
        line: usize,
        platform: String,
        from_id: String,
        to_id: String,
    },
    #[error("{file}:{line}: unknown identity {platform}/{user_id}")]
    UnknownIdentityRef {
        file: String,
        line: usize,
        platform: String,
        user_id: String,
    },
    #[error("{file}:{line}: {message}")]
    InvalidGroundTruth {
        file: String,
        line: usize,
        message: String,
    },
    #[error("unknown platform `{0}`")]
    UnknownPlatform(String),
    #[error("invalid platform declaration: {0}")]
    InvalidPlatform(String),
    #[error("unknown identity {0}")]
    UnknownIdentity(IdentityRef),
    #[error("manifest declares {declared} {kind} but {actual} were loaded")]
    CountMismatch {
        kind: &'static str,
        declared: usize,
        actual: usize,
    },
    #[error("invalid handle pattern `{pattern}`: {source}")]
    InvalidPattern {
        pattern: String,
        #[source]
        source: regex::Error,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Directedness {
    Directed,
    Undirected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Platform {
    pub id: String,
    pub directedness: Directedness,
}

impl Platform {
    pub fn new(id: impl Into<String>, directedness: Directedness) -> Self {
        Self {
            id: id.into(),
            directedness,
        }
    }

    pub fn is_directed(&self) -> bool {
        self.directedness == Directedness::Directed
    }
}

fn valid_platform_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_' || b == b'-')
}

/// `(platform, user_id)`: the key of an identity within a dataset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IdentityRef {
    pub platform: String,
    pub user_id: String,
}

impl IdentityRef {
    pub fn new(platform: impl Into<String>, user_id: impl Into<String>) -> Self {
        Self {
            platform: platform.into(),
            user_id: user_id.into(),
        }
    }
}

impl fmt::Display for IdentityRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.platform, self.user_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserIdentity {
    pub platform: String,
    pub user_id: String,
    pub username: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub screen_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bio: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_image_ref: Option<String>,
}

impl UserIdentity {
    pub fn new(
        platform: impl Into<String>,
        user_id: impl Into<String>,
        username: impl Into<String>,
    ) -> Self {
        Self {
            platform: platform.into(),
            user_id: user_id.into(),
            username: username.into(),
            screen_name: None,
            bio: None,
            profile_image_ref: None,
        }
    }

    pub fn with_screen_name(mut self, screen_name: impl Into<String>) -> Self {
        self.screen_name = Some(screen_name.into());
        self
    }

    pub fn with_bio(mut self, bio: impl Into<String>) -> Self {
        self.bio = Some(bio.into());
        self
    }

    pub fn key(&self) -> IdentityRef {
        IdentityRef::new(&self.platform, &self.user_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationshipEdge {
    pub platform: String,
    pub from_id: String,
    pub to_id: String,
}

impl RelationshipEdge {
    pub fn new(
        platform: impl Into<String>,
        from_id: impl Into<String>,
        to_id: impl Into<String>,
    ) -> Self {
        Self {
            platform: platform.into(),
            from_id: from_id.into(),
            to_id: to_id.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContentPost {
    pub platform: String,
    pub author_id: String,
    /// Post text; for rich-media posts, the caption or description.
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<i64>,
}

impl ContentPost {
    pub fn new(
        platform: impl Into<String>,
        author_id: impl Into<String>,
        text: impl Into<String>,
    ) -> Self {
        Self {
            platform: platform.into(),
            author_id: author_id.into(),
            text: text.into(),
            timestamp: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    DeclaredBio,
    Manual,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruthLink {
    pub source: IdentityRef,
    pub target: IdentityRef,
    pub provenance: Provenance,
}

/// A validated, immutable multi-platform dataset.
#[derive(Debug, Clone)]
pub struct Dataset {
    name: String,
    platforms: Vec<Platform>,
    identities: Vec<UserIdentity>,
    edges: Vec<RelationshipEdge>,
    posts: Vec<ContentPost>,
    ground_truth: Vec<GroundTruthLink>,
    by_ref: HashMap<IdentityRef, usize>,
    adjacency: Vec<BTreeSet<usize>>,
    incident_edges: Vec<Vec<usize>>,
    posts_by_author: Vec<Vec<usize>>,
}

/// Records paired with the line they came from, for error reporting.
pub(crate) struct RawRecords {
    pub identities: Vec<(usize, UserIdentity)>,
    pub edges: Vec<(usize, RelationshipEdge)>,
    pub posts: Vec<(usize, ContentPost)>,
    pub ground_truth: Vec<(usize, GroundTruthLink)>,
}

/// File names used in error messages for records that were not read from disk.
pub(crate) struct SourceNames {
    pub identities: String,
    pub edges: String,
    pub posts: String,
    pub ground_truth: String,
}

impl Default for SourceNames {
    fn default() -> Self {
        Self {
            identities: "identities".into(),
            edges: "edges".into(),
            posts: "posts".into(),
            ground_truth: "ground_truth".into(),
        }
    }
}

fn numbered<T>(records: Vec<T>) -> Vec<(usize, T)> {
    records
        .into_iter()
        .enumerate()
        .map(|(i, r)| (i + 1, r))
        .collect()
}

impl Dataset {
    /// Validates the records and builds the lookup structures.
    ///
    /// Undirected edges are canonicalized so that `from_id < to_id`.
    pub fn new(
        name: impl Into<String>,
        platforms: Vec<Platform>,
        identities: Vec<UserIdentity>,
        edges: Vec<RelationshipEdge>,
        posts: Vec<ContentPost>,
        ground_truth: Vec<GroundTruthLink>,
    ) -> Result<Self> {
        Self::from_raw(
            name.into(),
            platforms,
            RawRecords {
                identities: numbered(identities),
                edges: numbered(edges),
                posts: numbered(posts),
                ground_truth: numbered(ground_truth),
            },
            &SourceNames::default(),
        )
    }

    pub(crate) fn from_raw(
        name: String,
        platforms: Vec<Platform>,
        raw: RawRecords,
        files: &SourceNames,
    ) -> Result<Self> {
        let mut directedness = HashMap::new();
        for p in &platforms {
            if !valid_platform_id(&p.id) {
                return Err(CorpusError::InvalidPlatform(format!(
                    "`{}` is not a lowercase token",
                    p.id
                )));
            }
            if directedness.insert(p.id.clone(), p.directedness).is_some() {
                return Err(CorpusError::InvalidPlatform(format!(
                    "platform `{}` declared twice",
                    p.id
                )));
            }
        }

        let mut identities = Vec::with_capacity(raw.identities.len());
        let mut by_ref = HashMap::with_capacity(raw.identities.len());
        for (line, identity) in raw.identities {
            if !directedness.contains_key(&identity.platform) {
                return Err(CorpusError::UnknownPlatform(identity.platform));
            }
            if identity.user_id.is_empty() {
                return Err(malformed(&files.identities, line, "empty user_id"));
            }
            if identity.username.is_empty() {
                return Err(malformed(&files.identities, line, "empty username"));
            }
            let key = identity.key();
            if by_ref.contains_key(&key) {
                return Err(CorpusError::DuplicateIdentity {
                    file: files.identities.clone(),
                    line,
                    platform: key.platform,
                    user_id: key.user_id,
                });
            }
            by_ref.insert(key, identities.len());
            identities.push(identity);
        }

        let lookup = |platform: &str, user_id: &str| {
            by_ref.get(&IdentityRef::new(platform, user_id)).copied()
        };

        let mut adjacency = vec![BTreeSet::new(); identities.len()];
        let mut incident_edges = vec![Vec::new(); identities.len()];
        let mut seen_edges = HashSet::new();
        let mut edges = Vec::with_capacity(raw.edges.len());
        for (line, mut edge) in raw.edges {
            let Some(&directed) = directedness.get(&edge.platform) else {
                return Err(CorpusError::UnknownPlatform(edge.platform));
            };
            if edge.from_id == edge.to_id {
                return Err(CorpusError::SelfLoop {
                    file: files.edges.clone(),
                    line,
                    platform: edge.platform,
                    user_id: edge.from_id,
                });
            }
            let mut endpoints = [0usize; 2];
            for (slot, id) in endpoints.iter_mut().zip([&edge.from_id, &edge.to_id]) {
                *slot = lookup(&edge.platform, id).ok_or_else(|| CorpusError::DanglingEdge {
                    file: files.edges.clone(),
                    line,
                    platform: edge.platform.clone(),
                    user_id: id.clone(),
                })?;
            }
            if directed == Directedness::Undirected && edge.from_id > edge.to_id {
                std::mem::swap(&mut edge.from_id, &mut edge.to_id);
            }
            let dedup_key = (
                edge.platform.clone(),
                edge.from_id.clone(),
                edge.to_id.clone(),
            );
            if !seen_edges.insert(dedup_key) {
                return Err(CorpusError::DuplicateEdge {
                    file: files.edges.clone(),
                    line,
                    platform: edge.platform,
                    from_id: edge.from_id,
                    to_id: edge.to_id,
                });
            }
            let [a, b] = endpoints;
            adjacency[a].insert(b);
            adjacency[b].insert(a);
            incident_edges[a].push(edges.len());
            incident_edges[b].push(edges.len());
            edges.push(edge);
        }

        let mut posts_by_author = vec![Vec::new(); identities.len()];
        let mut posts = Vec::with_capacity(raw.posts.len());
        for (line, post) in raw.posts {
            if !directedness.contains_key(&post.platform) {
                return Err(CorpusError::UnknownPlatform(post.platform));
            }
            let author = lookup(&post.platform, &post.author_id).ok_or_else(|| {
                CorpusError::UnknownIdentityRef {
                    file: files.posts.clone(),
                    line,
                    platform: post.platform.clone(),
                    user_id: post.author_id.clone(),
                }
            })?;
            posts_by_author[author].push(posts.len());
            posts.push(post);
        }

        let mut functional = HashSet::new();
        let mut ground_truth = Vec::with_capacity(raw.ground_truth.len());
        for (line, link) in raw.ground_truth {
            if link.source.platform == link.target.platform {
                return Err(CorpusError::InvalidGroundTruth {
                    file: files.ground_truth.clone(),
                    line,
                    message: "source and target are on the same platform".into(),
                });
            }
            for end in [&link.source, &link.target] {
                if !directedness.contains_key(&end.platform) {
                    return Err(CorpusError::UnknownPlatform(end.platform.clone()));
                }
                if !by_ref.contains_key(end) {
                    return Err(CorpusError::UnknownIdentityRef {
                        file: files.ground_truth.clone(),
                        line,
                        platform: end.platform.clone(),
                        user_id: end.user_id.clone(),
                    });
                }
            }
            if !functional.insert((link.source.clone(), link.target.platform.clone())) {
                return Err(CorpusError::InvalidGroundTruth {
                    file: files.ground_truth.clone(),
                    line,
                    message: format!(
                        "{} already has a ground-truth link to platform {}",
                        link.source, link.target.platform
                    ),
                });
            }
            ground_truth.push(link);
        }

        Ok(Self {
            name,
            platforms,
            identities,
            edges,
            posts,
            ground_truth,
            by_ref,
            adjacency,
            incident_edges,
            posts_by_author,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn platforms(&self) -> &[Platform] {
        &self.platforms
    }

    pub fn platform(&self, id: &str) -> Option<&Platform> {
        self.platforms.iter().find(|p| p.id == id)
    }

    pub(crate) fn require_platform(&self, id: &str) -> Result<&Platform> {
        self.platform(id)
            .ok_or_else(|| CorpusError::UnknownPlatform(id.to_string()))
    }

    pub fn identities(&self) -> &[UserIdentity] {
        &self.identities
    }

    pub fn identities_on<'a>(&'a self, platform: &'a str) -> impl Iterator<Item = &'a UserIdentity> + 'a {
        self.identities.iter().filter(move |i| i.platform == platform)
    }

    pub fn edges(&self) -> &[RelationshipEdge] {
        &self.edges
    }

    pub fn posts(&self) -> &[ContentPost] {
        &self.posts
    }

    pub fn ground_truth(&self) -> &[GroundTruthLink] {
        &self.ground_truth
    }

    pub fn identity(&self, key: &IdentityRef) -> Option<&UserIdentity> {
        self.by_ref.get(key).map(|&i| &self.identities[i])
    }

    pub fn lookup(&self, platform: &str, user_id: &str) -> Option<&UserIdentity> {
        self.identity(&IdentityRef::new(platform, user_id))
    }

    pub fn contains(&self, key: &IdentityRef) -> bool {
        self.by_ref.contains_key(key)
    }

    pub(crate) fn index_of(&self, key: &IdentityRef) -> Option<usize> {
        self.by_ref.get(key).copied()
    }

    /// Posts authored by the identity, in dataset order.
    pub fn posts_by(&self, key: &IdentityRef) -> impl Iterator<Item = &ContentPost> + '_ {
        let ids = self
            .by_ref
            .get(key)
            .map(|&i| self.posts_by_author[i].as_slice())
            .unwrap_or(&[]);
        ids.iter().map(move |&p| &self.posts[p])
    }

    pub(crate) fn neighbor_indices(&self, idx: usize) -> &BTreeSet<usize> {
        &self.adjacency[idx]
    }

    pub(crate) fn incident_edge_indices(&self, idx: usize) -> &[usize] {
        &self.incident_edges[idx]
    }

    pub(crate) fn identity_at(&self, idx: usize) -> &UserIdentity {
        &self.identities[idx]
    }

    /// Returns a copy of this dataset with `links` appended to its ground truth.
    ///
    /// Links whose source already has a link to the same target platform are
    /// skipped; the number of links actually added is returned alongside.
    pub fn with_additional_ground_truth(
        &self,
        links: impl IntoIterator<Item = GroundTruthLink>,
    ) -> Result<(Self, usize)> {
        let mut taken: HashSet<(IdentityRef, String)> = self
            .ground_truth
            .iter()
            .map(|l| (l.source.clone(), l.target.platform.clone()))
            .collect();
        let mut ground_truth = self.ground_truth.clone();
        let before = ground_truth.len();
        for link in links {
            if taken.insert((link.source.clone(), link.target.platform.clone())) {
                ground_truth.push(link);
            }
        }
        let added = ground_truth.len() - before;
        let dataset = Self::new(
            self.name.clone(),
            self.platforms.clone(),
            self.identities.clone(),
            self.edges.clone(),
            self.posts.clone(),
            ground_truth,
        )?;
        Ok((dataset, added))
    }

    pub fn counts(&self) -> RecordCounts {
        RecordCounts {
            identities: self.identities.len(),
            edges: self.edges.len(),
            posts: self.posts.len(),
            ground_truth: self.ground_truth.len(),
        }
    }
}

fn malformed(file: &str, line: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::MalformedRecord {
        file: file.to_string(),
        line,
        message: message.into(),
    }
}
