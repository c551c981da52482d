use std::collections::HashMap;

use regex::Regex;

use super::{CorpusError, Dataset, GroundTruthLink, Provenance, Result};

/// Scans source-platform bios for declared target-platform handles.
///
/// Each pattern is a regular expression; the handle is its first capture group
/// if it has one, otherwise the whole match. A handle produces a link only if
/// it equals (case-insensitively) the username of exactly one target identity.
/// Candidate handles are tried in the order they appear in the bio and the
/// first one that resolves wins, so each source gets at most one link.
pub fn extract_ground_truth(
    dataset: &Dataset,
    source_platform: &str,
    target_platform: &str,
    handle_patterns: &[impl AsRef<str>],
) -> Result<Vec<GroundTruthLink>> {
    dataset.require_platform(source_platform)?;
    dataset.require_platform(target_platform)?;
    let patterns = handle_patterns
        .iter()
        .map(|p| {
            Regex::new(p.as_ref()).map_err(|source| CorpusError::InvalidPattern {
                pattern: p.as_ref().to_string(),
                source,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // lowercase username -> target identity, None when ambiguous
    let mut targets: HashMap<String, Option<usize>> = HashMap::new();
    for (i, identity) in dataset.identities().iter().enumerate() {
        if identity.platform == target_platform {
            targets
                .entry(identity.username.to_lowercase())
                .and_modify(|slot| *slot = None)
                .or_insert(Some(i));
        }
    }

    let mut links = Vec::new();
    for identity in dataset.identities_on(source_platform) {
        let Some(bio) = identity.bio.as_deref() else {
            continue;
        };
        let mut hits: Vec<(usize, usize, &str)> = Vec::new();
        for (pattern_idx, re) in patterns.iter().enumerate() {
            for caps in re.captures_iter(bio) {
                let m = caps.get(1).or_else(|| caps.get(0)).expect("group 0 always matches");
                hits.push((m.start(), pattern_idx, m.as_str()));
            }
        }
        hits.sort_by_key(|&(start, pattern_idx, _)| (start, pattern_idx));
        let resolved = hits.iter().find_map(|&(_, _, handle)| {
            targets.get(&handle.to_lowercase()).copied().flatten()
        });
        if let Some(t) = resolved {
            links.push(GroundTruthLink {
                source: identity.key(),
                target: dataset.identities()[t].key(),
                provenance: Provenance::DeclaredBio,
            });
        }
    }
    Ok(links)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Directedness, IdentityRef, Platform, UserIdentity};

    fn dataset(bios: &[(&str, &str)], targets: &[&str]) -> Dataset {
        let mut ids: Vec<UserIdentity> = bios
            .iter()
            .map(|(id, bio)| UserIdentity::new("twitter", *id, *id).with_bio(*bio))
            .collect();
        ids.extend(
            targets
                .iter()
                .enumerate()
                .map(|(i, name)| UserIdentity::new("foursquare", format!("f{i}"), *name)),
        );
        Dataset::new(
            "t",
            vec![
                Platform::new("twitter", Directedness::Directed),
                Platform::new("foursquare", Directedness::Directed),
            ],
            ids,
            vec![],
            vec![],
            vec![],
        )
        .unwrap()
    }

    const PATTERN: &str = r"foursquare:\s*(\S+)";

    #[test]
    fn direct_pattern_hit() {
        let ds = dataset(&[("roy", "foodie | foursquare: roy_lee87")], &["roy_lee87"]);
        let links = extract_ground_truth(&ds, "twitter", "foursquare", &[PATTERN]).unwrap();
        assert_eq!(links.len(), 1);
        assert_eq!(links[0].source, IdentityRef::new("twitter", "roy"));
        assert_eq!(links[0].target, IdentityRef::new("foursquare", "f0"));
        assert_eq!(links[0].provenance, Provenance::DeclaredBio);
    }

    #[test]
    fn unmatched_handle_is_skipped() {
        let ds = dataset(&[("roy", "foursquare: ghost_user")], &["roy_lee87"]);
        let links = extract_ground_truth(&ds, "twitter", "foursquare", &[PATTERN]).unwrap();
        assert!(links.is_empty());
    }

    #[test]
    fn match_is_case_insensitive_and_first_in_bio_wins() {
        let ds = dataset(
            &[("roy", "4sq @second, foursquare: ROY_LEE87")],
            &["roy_lee87", "second"],
        );
        let links =
            extract_ground_truth(&ds, "twitter", "foursquare", &[PATTERN, r"@(\w+)"]).unwrap();
        assert_eq!(links.len(), 1);
        assert_eq!(links[0].target.user_id, "f1");
    }

    #[test]
    fn unresolvable_first_hit_falls_through_to_next() {
        let ds = dataset(&[("roy", "foursquare: nobody foursquare: roy_lee87")], &["roy_lee87"]);
        let links = extract_ground_truth(&ds, "twitter", "foursquare", &[PATTERN]).unwrap();
        assert_eq!(links[0].target.user_id, "f0");
    }

    #[test]
    fn ambiguous_target_username_is_skipped() {
        let ds = dataset(&[("roy", "foursquare: Twin")], &["twin", "TWIN"]);
        let links = extract_ground_truth(&ds, "twitter", "foursquare", &[PATTERN]).unwrap();
        assert!(links.is_empty());
    }

    #[test]
    fn bad_pattern_and_platform() {
        let ds = dataset(&[], &[]);
        assert!(matches!(
            extract_ground_truth(&ds, "twitter", "foursquare", &["("]),
            Err(CorpusError::InvalidPattern { .. })
        ));
        assert!(matches!(
            extract_ground_truth(&ds, "twitter", "myspace", &[PATTERN]),
            Err(CorpusError::UnknownPlatform(_))
        ));
    }
}
