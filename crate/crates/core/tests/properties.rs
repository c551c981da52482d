mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use linky_core::corpus::{
    self, Dataset, Directedness, IdentityRef, Platform, RelationshipEdge, UserIdentity,
};
use linky_core::evaluation::{self, Criterion};
use linky_core::linkage::{self, ImportOptions};

fn ids(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prec_never_exceeds_mrr(seed in any::<u64>(), n in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, t) = (ids("s", n), ids("t", n));
        let truth = common::random_truth(&mut rng, &s, &t);
        prop_assume!(!truth.is_empty());
        let sol = common::random_solution(&mut rng, "m", "a", "b", &s, &t, 4);
        let r = evaluation::evaluate(&sol, &common::links("a", "b", &truth)).unwrap();
        prop_assert!(r.prec_at_1 <= r.mrr);
        prop_assert!((0.0..=1.0).contains(&r.mrr));
        let (n_ref, p, m) = common::reference_metrics(&sol, &truth);
        prop_assert_eq!(r.n_evaluated, n_ref);
        prop_assert!((r.prec_at_1 - p).abs() < 1e-12 && (r.mrr - m).abs() < 1e-12);
    }

    #[test]
    fn diff_cardinality_identity(seed in any::<u64>(), n in 1usize..40, k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, t) = (ids("s", n), ids("t", n));
        let truth = common::random_truth(&mut rng, &s, &t);
        prop_assume!(!truth.is_empty());
        let gt = common::links("a", "b", &truth);
        let a = common::random_solution(&mut rng, "x", "a", "b", &s, &t, 3);
        let b = common::random_solution(&mut rng, "y", "a", "b", &s, &t, 3);
        for criterion in [Criterion::Rank1, Criterion::TopK(k)] {
            let ab = evaluation::diff(&a, &b, &gt, criterion).unwrap().correct_in_a_not_b.len() as i64;
            let ba = evaluation::diff(&b, &a, &gt, criterion).unwrap().correct_in_a_not_b.len() as i64;
            let ca = evaluation::correct_sources(&a, &gt, criterion).unwrap().len() as i64;
            let cb = evaluation::correct_sources(&b, &gt, criterion).unwrap().len() as i64;
            prop_assert_eq!(ab - ba, ca - cb);
            prop_assert!(evaluation::diff(&a, &a, &gt, criterion).unwrap().correct_in_a_not_b.is_empty());
        }
    }

    #[test]
    fn solution_files_round_trip(seed in any::<u64>(), n in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, t) = (ids("s", n), ids("t", n));
        let mut identities: Vec<UserIdentity> = s.iter().map(|i| UserIdentity::new("a", i.as_str(), i.as_str())).collect();
        identities.extend(t.iter().map(|i| UserIdentity::new("b", i.as_str(), i.as_str())));
        let ds = Dataset::new(
            "p",
            vec![Platform::new("a", Directedness::Directed), Platform::new("b", Directedness::Undirected)],
            identities, vec![], vec![], vec![],
        ).unwrap();
        let sol = common::random_solution(&mut rng, "rt", "a", "b", &s, &t, 5);
        let text = linkage::solution_to_string(&sol);
        let back = linkage::parse_solution(&text, &ds, &ImportOptions { k_stored: 5, min_score: None }).unwrap();
        prop_assert_eq!(&back, &sol);
        prop_assert_eq!(linkage::solution_to_string(&back), text);
    }

    #[test]
    fn ego_network_matches_edge_scan(
        n in 2usize..25,
        raw in proptest::collection::vec((0usize..25, 0usize..25), 0..80),
        directed in any::<bool>(),
        ego in 0usize..25,
    ) {
        let ego = ego % n;
        let identities: Vec<UserIdentity> =
            (0..n).map(|i| UserIdentity::new("p", format!("u{i:02}"), format!("name{i}"))).collect();
        let mut seen = BTreeSet::new();
        let mut edges = Vec::new();
        for (a, b) in raw {
            let (a, b) = (a % n, b % n);
            let key = if directed { (a, b) } else { (a.min(b), a.max(b)) };
            if a != b && seen.insert(key) {
                edges.push(RelationshipEdge::new("p", format!("u{a:02}"), format!("u{b:02}")));
            }
        }
        let dir = if directed { Directedness::Directed } else { Directedness::Undirected };
        let ds = Dataset::new("g", vec![Platform::new("p", dir)], identities, edges.clone(), vec![], vec![]).unwrap();
        let me = format!("u{ego:02}");
        let net = corpus::ego_network(&ds, "p", &me).unwrap();

        let want: BTreeSet<String> = edges.iter().filter_map(|e| {
            if e.from_id == me { Some(e.to_id.clone()) }
            else if e.to_id == me { Some(e.from_id.clone()) }
            else { None }
        }).collect();
        let got: BTreeSet<String> = net.neighbors.iter().map(|r| r.user_id.clone()).collect();
        prop_assert_eq!(&got, &want);

        let members: BTreeSet<String> = want.iter().cloned().chain([me.clone()]).collect();
        let induced = ds.edges().iter()
            .filter(|e| members.contains(&e.from_id) && members.contains(&e.to_id))
            .count();
        prop_assert_eq!(net.edges.len(), induced);
        prop_assert!(net.contains(&IdentityRef::new("p", me.as_str())));
    }
}
