use std::collections::BTreeSet;

use super::{CorpusError, Dataset, IdentityRef, RelationshipEdge, Result};

/// The ego, its neighbors, and every stored edge among them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgoNetwork {
    pub ego: IdentityRef,
    /// Sorted ascending.
    pub neighbors: Vec<IdentityRef>,
    /// Induced edges in dataset order, with their stored direction.
    pub edges: Vec<RelationshipEdge>,
}

impl EgoNetwork {
    /// Ego first, then neighbors.
    pub fn nodes(&self) -> impl Iterator<Item = &IdentityRef> {
        std::iter::once(&self.ego).chain(self.neighbors.iter())
    }

    pub fn contains(&self, key: &IdentityRef) -> bool {
        *key == self.ego || self.neighbors.binary_search(key).is_ok()
    }
}

/// Neighbors are direction-insensitive: on directed platforms both followers
/// and followees are included.
pub fn ego_network(dataset: &Dataset, platform: &str, user_id: &str) -> Result<EgoNetwork> {
    let ego = IdentityRef::new(platform, user_id);
    let idx = dataset
        .index_of(&ego)
        .ok_or_else(|| CorpusError::UnknownIdentity(ego.clone()))?;
    let neighbor_idx = dataset.neighbor_indices(idx);
    let members: BTreeSet<usize> = neighbor_idx.iter().copied().chain([idx]).collect();

    let mut edge_ids = BTreeSet::new();
    for &node in &members {
        for &e in dataset.incident_edge_indices(node) {
            let edge = &dataset.edges()[e];
            let other = if edge.from_id == dataset.identity_at(node).user_id {
                &edge.to_id
            } else {
                &edge.from_id
            };
            let other_idx = dataset
                .index_of(&IdentityRef::new(platform, other.as_str()))
                .expect("edge endpoints validated at load");
            if members.contains(&other_idx) {
                edge_ids.insert(e);
            }
        }
    }

    let mut neighbors: Vec<IdentityRef> = neighbor_idx
        .iter()
        .map(|&i| dataset.identity_at(i).key())
        .collect();
    neighbors.sort();
    Ok(EgoNetwork {
        ego,
        neighbors,
        edges: edge_ids
            .into_iter()
            .map(|e| dataset.edges()[e].clone())
            .collect(),
    })
}
