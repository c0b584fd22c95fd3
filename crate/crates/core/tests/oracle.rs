//! The incremental engine against the definition-level reference transition.

use hygreedy::generators::random_uniform;
use hygreedy::process::{reference_transition, ProcessState};
use hygreedy::Hypergraph;
use proptest::prelude::*;

fn assert_matches(h: &Hypergraph, st: &ProcessState<'_>) -> Result<(), TestCaseError> {
    let (open, live) = reference_transition(h, st.independent_set()).unwrap();
    let mut engine_open = st.open_vertices().to_vec();
    engine_open.sort_unstable();
    prop_assert_eq!(engine_open, open);
    prop_assert_eq!(st.live_edge_sets(), live);
    prop_assert!(st.check_trackers().is_ok());
    prop_assert!(st.is_independent());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn uniform_instances(n in 5usize..=14, r in 2usize..=5, fill in 0.05f64..0.6, seed in any::<u64>()) {
        let r = r.min(n - 1);
        let total = (0..r).fold(1usize, |acc, j| acc * (n - j) / (j + 1));
        let m = ((total as f64 * fill) as usize).clamp(1, total.min(300));
        let h = random_uniform(n, r, m, seed).unwrap();
        let mut st = ProcessState::new(&h, seed ^ 0x5eed).unwrap();
        assert_matches(&h, &st)?;
        while !st.is_complete() {
            st.step().unwrap();
            assert_matches(&h, &st)?;
        }
        prop_assert!(st.is_maximal());
    }

    #[test]
    fn mixed_edge_sizes(n in 5usize..=12, edges in prop::collection::vec(prop::collection::btree_set(0u32..12, 2..=5), 1..30), seed in any::<u64>()) {
        let mut sets: Vec<Vec<u32>> = edges
            .into_iter()
            .map(|e| e.into_iter().filter(|&v| (v as usize) < n).collect::<Vec<_>>())
            .filter(|e| e.len() >= 2)
            .collect();
        sets.sort();
        sets.dedup();
        prop_assume!(!sets.is_empty());
        let h = Hypergraph::new(n, sets).unwrap();
        let mut st = ProcessState::new(&h, seed).unwrap();
        assert_matches(&h, &st)?;
        while !st.is_complete() {
            st.step().unwrap();
            assert_matches(&h, &st)?;
        }
        prop_assert!(st.is_maximal());
    }
}
