//! Payloads for the pair-comparison view: content word clouds, ego views
//! laid out on a degree-ordered circle, and green highlighting of neighbors
//! linked across the two ego networks.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{self, ContentPost, CorpusError, Dataset, EgoNetwork, IdentityRef, UserIdentity};
use crate::linkage::Solution;

pub const DEFAULT_TOP_N: usize = 50;
const ENGLISH_STOPWORDS: &str = include_str!("stopwords_en.txt");

#[derive(Debug, thiserror::Error)]
pub enum VizError {
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
    #[error("unknown source identity `{0}`")]
    UnknownSource(String),
    #[error("source `{0}` has no candidates")]
    NoCandidates(String),
    #[error("k must be at least 1")]
    InvalidK,
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

pub type Result<T, E = VizError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn english() -> Self {
        Self::parse(ENGLISH_STOPWORDS)
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        Self(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn from_file(path: &Path) -> std::io::Result<Self> {
        Ok(Self::parse(&fs::read_to_string(path)?))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }
}

impl<S: Into<String>> FromIterator<S> for Stopwords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self(iter.into_iter().map(|s| s.into().to_lowercase()).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCount {
    pub term: String,
    pub count: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordCloud {
    /// Descending count, then ascending term.
    pub terms: Vec<TermCount>,
}

/// Lowercase, split on non-alphanumeric characters, drop tokens shorter than
/// two characters.
pub fn content_tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2)
        .map(str::to_lowercase)
}

pub fn word_cloud<'a>(
    posts: impl IntoIterator<Item = &'a ContentPost>,
    stopwords: &Stopwords,
    top_n: usize,
) -> WordCloud {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for post in posts {
        for token in content_tokens(&post.text) {
            if !stopwords.contains(&token) {
                *counts.entry(token).or_default() += 1;
            }
        }
    }
    let mut terms: Vec<TermCount> = counts
        .into_iter()
        .map(|(term, count)| TermCount { term, count })
        .collect();
    terms.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.term.cmp(&b.term)));
    terms.truncate(top_n);
    WordCloud { terms }
}

/// Symmetric set of identity pairs considered linked across platforms.
#[derive(Debug, Clone, Default)]
pub struct LinkMap {
    pairs: HashMap<IdentityRef, BTreeSet<IdentityRef>>,
}

impl LinkMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: IdentityRef, b: IdentityRef) {
        self.pairs.entry(a.clone()).or_default().insert(b.clone());
        self.pairs.entry(b).or_default().insert(a);
    }

    pub fn contains(&self, a: &IdentityRef, b: &IdentityRef) -> bool {
        self.pairs.get(a).is_some_and(|s| s.contains(b))
    }

    /// Counterparts of `a`, ascending.
    pub fn linked(&self, a: &IdentityRef) -> impl Iterator<Item = &IdentityRef> {
        self.pairs.get(a).into_iter().flatten()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Ground truth between the solution's two platforms (either direction)
    /// plus the solution's rank-1 prediction for every source.
    pub fn for_solution(dataset: &Dataset, solution: &Solution) -> Self {
        let mut map = Self::new();
        let pair = [
            solution.source_platform.as_str(),
            solution.target_platform.as_str(),
        ];
        for link in dataset.ground_truth() {
            if pair.contains(&link.source.platform.as_str())
                && pair.contains(&link.target.platform.as_str())
            {
                map.insert(link.source.clone(), link.target.clone());
            }
        }
        for (source, top) in solution.top1() {
            map.insert(
                IdentityRef::new(&solution.source_platform, source),
                top.target.clone(),
            );
        }
        map
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EgoNode {
    pub identity: IdentityRef,
    pub username: String,
    pub screen_name: Option<String>,
    pub bio: Option<String>,
    /// Distinct adjacent nodes within the view.
    pub degree: usize,
    /// Slot on the circular layout; equals the node's index in `nodes`.
    pub position: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Highlight {
    /// Node indices drawn green, ascending.
    pub linked_highlight: Vec<usize>,
    pub counterpart_of: BTreeMap<usize, IdentityRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EgoView {
    pub ego: IdentityRef,
    pub ego_index: usize,
    pub directed: bool,
    /// Sorted by non-increasing degree, then ascending username.
    pub nodes: Vec<EgoNode>,
    /// `[from, to]` node indices.
    pub edges: Vec<[usize; 2]>,
    #[serde(flatten)]
    pub highlight: Highlight,
}

impl EgoView {
    pub fn index_of(&self, identity: &IdentityRef) -> Option<usize> {
        self.nodes.iter().position(|n| &n.identity == identity)
    }
}

/// Neighbors of this view's ego that `link_map` pairs with a neighbor of the
/// counterpart ego. The egos themselves are never highlighted.
fn highlight_against(
    nodes: &[EgoNode],
    ego_index: usize,
    link_map: &LinkMap,
    counterpart: Option<&EgoNetwork>,
) -> Highlight {
    let mut highlight = Highlight::default();
    let Some(other) = counterpart else {
        return highlight;
    };
    for (i, node) in nodes.iter().enumerate() {
        if i == ego_index {
            continue;
        }
        let partner = link_map
            .linked(&node.identity)
            .find(|c| **c != other.ego && other.contains(c));
        if let Some(partner) = partner {
            highlight.linked_highlight.push(i);
            highlight.counterpart_of.insert(i, partner.clone());
        }
    }
    highlight
}

fn layout(dataset: &Dataset, net: &EgoNetwork) -> (Vec<EgoNode>, Vec<[usize; 2]>) {
    let members: Vec<&UserIdentity> = net
        .nodes()
        .map(|r| dataset.identity(r).expect("ego network members exist"))
        .collect();
    let by_id: HashMap<&str, usize> = members
        .iter()
        .enumerate()
        .map(|(i, m)| (m.user_id.as_str(), i))
        .collect();
    let mut adjacent = vec![BTreeSet::new(); members.len()];
    for e in &net.edges {
        let (a, b) = (by_id[e.from_id.as_str()], by_id[e.to_id.as_str()]);
        adjacent[a].insert(b);
        adjacent[b].insert(a);
    }
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&a, &b| {
        adjacent[b]
            .len()
            .cmp(&adjacent[a].len())
            .then_with(|| members[a].username.cmp(&members[b].username))
            .then_with(|| members[a].user_id.cmp(&members[b].user_id))
    });
    let mut slot = vec![0; members.len()];
    for (pos, &m) in order.iter().enumerate() {
        slot[m] = pos;
    }
    let nodes = order
        .iter()
        .enumerate()
        .map(|(pos, &m)| EgoNode {
            identity: members[m].key(),
            username: members[m].username.clone(),
            screen_name: members[m].screen_name.clone(),
            bio: members[m].bio.clone(),
            degree: adjacent[m].len(),
            position: pos,
        })
        .collect();
    let edges = net
        .edges
        .iter()
        .map(|e| [slot[by_id[e.from_id.as_str()]], slot[by_id[e.to_id.as_str()]]])
        .collect();
    (nodes, edges)
}

/// Builds the circular ego view of `identity`, highlighting neighbors that are
/// linked to neighbors of `counterpart`.
pub fn ego_view(
    dataset: &Dataset,
    identity: &IdentityRef,
    link_map: &LinkMap,
    counterpart: Option<&EgoNetwork>,
) -> Result<EgoView> {
    let net = corpus::ego_network(dataset, &identity.platform, &identity.user_id)?;
    Ok(view_of(dataset, &net, link_map, counterpart))
}

fn view_of(
    dataset: &Dataset,
    net: &EgoNetwork,
    link_map: &LinkMap,
    counterpart: Option<&EgoNetwork>,
) -> EgoView {
    let (nodes, edges) = layout(dataset, net);
    let ego_index = nodes
        .iter()
        .position(|n| n.identity == net.ego)
        .expect("ego is a node");
    let highlight = highlight_against(&nodes, ego_index, link_map, counterpart);
    EgoView {
        ego: net.ego.clone(),
        ego_index,
        directed: dataset
            .platform(&net.ego.platform)
            .is_some_and(|p| p.is_directed()),
        nodes,
        edges,
        highlight,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub platform: String,
    pub user_id: String,
    pub username: String,
    pub screen_name: Option<String>,
    pub bio: Option<String>,
    pub profile_image_ref: Option<String>,
    /// True when no usable profile image exists; the UI shows a placeholder.
    pub image_placeholder: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateTab {
    pub rank: usize,
    pub score: f64,
    pub target: Profile,
    pub target_cloud: WordCloud,
    pub target_ego: EgoView,
    /// Highlights of the source ego view when this tab is selected.
    pub source_highlight: Highlight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairView {
    pub method_id: String,
    pub source: Profile,
    pub source_cloud: WordCloud,
    /// Highlights synchronized against the first tab.
    pub source_ego: EgoView,
    pub tabs: Vec<CandidateTab>,
}

#[derive(Debug, Clone)]
pub struct VizOptions {
    pub stopwords: Stopwords,
    pub top_n: usize,
    /// Directory that relative `profile_image_ref` paths resolve against.
    pub image_root: Option<PathBuf>,
}

impl Default for VizOptions {
    fn default() -> Self {
        Self {
            stopwords: Stopwords::english(),
            top_n: DEFAULT_TOP_N,
            image_root: None,
        }
    }
}

/// Resolves a local image reference. URIs are passed through unresolved.
pub fn local_image_path(image_ref: &str, image_root: Option<&Path>) -> Option<PathBuf> {
    if image_ref.contains("://") {
        return None;
    }
    let path = Path::new(image_ref);
    Some(match image_root {
        Some(root) if path.is_relative() => root.join(path),
        _ => path.to_path_buf(),
    })
}

fn profile(identity: &UserIdentity, options: &VizOptions) -> Profile {
    let image_placeholder = match identity.profile_image_ref.as_deref() {
        None => true,
        Some(r) => match local_image_path(r, options.image_root.as_deref()) {
            Some(path) => !path.is_file(),
            None => false,
        },
    };
    Profile {
        platform: identity.platform.clone(),
        user_id: identity.user_id.clone(),
        username: identity.username.clone(),
        screen_name: identity.screen_name.clone(),
        bio: identity.bio.clone(),
        profile_image_ref: identity.profile_image_ref.clone(),
        image_placeholder,
    }
}

/// Assembles the comparison payload for one source identity and up to `k`
/// of its candidates.
pub fn pair_view(
    dataset: &Dataset,
    solution: &Solution,
    link_map: &LinkMap,
    source_id: &str,
    k: usize,
    options: &VizOptions,
) -> Result<PairView> {
    if k == 0 {
        return Err(VizError::InvalidK);
    }
    let source_ref = IdentityRef::new(&solution.source_platform, source_id);
    let source = dataset
        .identity(&source_ref)
        .ok_or_else(|| VizError::UnknownSource(source_id.to_string()))?;
    let candidates = solution.candidates(source_id);
    if candidates.is_empty() {
        return Err(VizError::NoCandidates(source_id.to_string()));
    }
    let source_net = corpus::ego_network(dataset, &source_ref.platform, &source_ref.user_id)?;
    let (source_nodes, _) = layout(dataset, &source_net);
    let source_ego_index = source_nodes
        .iter()
        .position(|n| n.identity == source_ref)
        .expect("ego is a node");

    let mut tabs = Vec::new();
    for candidate in candidates.iter().take(k) {
        let target = dataset
            .identity(&candidate.target)
            .ok_or_else(|| CorpusError::UnknownIdentity(candidate.target.clone()))?;
        let target_net =
            corpus::ego_network(dataset, &candidate.target.platform, &candidate.target.user_id)?;
        tabs.push(CandidateTab {
            rank: candidate.rank,
            score: candidate.score,
            target: profile(target, options),
            target_cloud: word_cloud(
                dataset.posts_by(&candidate.target),
                &options.stopwords,
                options.top_n,
            ),
            target_ego: view_of(dataset, &target_net, link_map, Some(&source_net)),
            source_highlight: highlight_against(
                &source_nodes,
                source_ego_index,
                link_map,
                Some(&target_net),
            ),
        });
    }
    let source_ego = {
        let mut view = view_of(dataset, &source_net, link_map, None);
        view.highlight = tabs[0].source_highlight.clone();
        view
    };
    Ok(PairView {
        method_id: solution.method.method_id.clone(),
        source: profile(source, options),
        source_cloud: word_cloud(dataset.posts_by(&source_ref), &options.stopwords, options.top_n),
        source_ego,
        tabs,
    })
}
