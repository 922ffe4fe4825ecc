//! Exact search at desk scale: copy enumeration, perfect-packing decision,
//! copies through a given vertex and odd-split copies of `C^3_3`.

mod copies;
mod exact;

pub use copies::{
    copy_through_vertex, copy_through_vertex_with, find_copies, find_copies_with,
    find_odd_split_c33, find_odd_split_c33_with, mask_of, unlabelled_copies, CopyConstraints,
    CopyIndex, CopyMode,
};
pub(crate) use copies::{visit_copies, HostIndex};
pub use exact::{decide_perfect_packing, decide_perfect_packing_with, SearchReport, SearchVerdict};

/// Guards and budgets for exhaustive search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Largest host handled; capped at 64 by the bitmask representation.
    pub max_vertices: usize,
    /// Largest number of distinct copy images enumerated.
    pub copy_cap: usize,
    /// Search nodes allowed per root branch before answering unknown.
    pub node_budget: u64,
    /// Largest number of failed vertex sets remembered per branch.
    pub memo_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_vertices: 40,
            copy_cap: 2_000_000,
            node_budget: 50_000_000,
            memo_cap: 4_000_000,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::KGraph;
    use crate::realisation::loose_cycle;

    fn complete(k: usize, n: usize) -> KGraph {
        let mut edges = Vec::new();
        crate::util::for_each_combination(n, k, |c| {
            edges.push(c.to_vec());
            true
        });
        KGraph::from_indices(k, n, edges).unwrap()
    }

    #[test]
    fn copy_counts() {
        let edge = KGraph::from_indices(3, 3, vec![vec![0, 1, 2]]).unwrap();
        let k34 = complete(3, 4);
        assert_eq!(find_copies(&edge, &k34, CopyMode::Unlabelled, None).unwrap().len(), 4);
        assert_eq!(find_copies(&edge, &k34, CopyMode::Labelled, None).unwrap().len(), 24);
        let c33 = loose_cycle(3, 3).unwrap();
        assert!(find_copies(&c33, &complete(3, 5), CopyMode::Unlabelled, None)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn decide_small() {
        let c32 = loose_cycle(3, 2).unwrap();
        let b4 = KGraph::complete_multipartite(&[4, 4, 4]).unwrap();
        let r = decide_perfect_packing(&c32, &b4).unwrap();
        match r.verdict {
            SearchVerdict::Packed(p) => assert!(p.verify().perfect),
            other => panic!("expected a packing, got {other:?}"),
        }
        let r = decide_perfect_packing(&c32, &complete(3, 6)).unwrap();
        assert_eq!(r.verdict, SearchVerdict::None);
    }

    #[test]
    fn odd_split() {
        let k9 = complete(3, 9);
        let c = find_odd_split_c33(&k9, &[0, 1, 2, 3]).unwrap().unwrap();
        let inside = c.iter().filter(|&&v| v < 4).count();
        assert_eq!(inside % 2, 1);
        assert!(find_odd_split_c33(&k9, &[]).unwrap().is_none());
    }

    #[test]
    fn through_vertex() {
        let c32 = loose_cycle(3, 2).unwrap();
        let b4 = KGraph::complete_multipartite(&[4, 4, 4]).unwrap();
        for u in 0..12 {
            assert!(copy_through_vertex(&c32, &b4, u).unwrap().unwrap().contains(&u));
        }
    }
}
