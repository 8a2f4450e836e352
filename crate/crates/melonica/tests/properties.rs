//! Property tests over randomized graphs: serialization, face structure,
//! isomorphism invariance, the amplitude theorem, and the melon bijection on
//! graphs larger than the exhaustive range.

use melonica::melonic::insert_melon;
use melonica::perm::Perm;
use melonica::{
    amplitude_exponent, amplitude_exponent_via_bubbles, degree, dipole, is_melonic,
    melon_to_tree, tree_to_melon, ColoredGraph,
};
use proptest::prelude::*;

fn perm_strategy(p: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..p).collect::<Vec<usize>>()).prop_shuffle()
}

fn graph_strategy(colors: std::ops::RangeInclusive<usize>, max_p: usize) -> impl Strategy<Value = ColoredGraph> {
    (colors, 1..=max_p).prop_flat_map(|(c, p)| {
        proptest::collection::vec(perm_strategy(p), c)
            .prop_map(move |images| ColoredGraph::new(c, images).expect("valid by construction"))
    })
}

/// A melonic graph built by a random insertion history.
fn melon_strategy(max_insertions: usize) -> impl Strategy<Value = ColoredGraph> {
    proptest::collection::vec((any::<u32>(), 0..4usize), 0..=max_insertions).prop_map(|moves| {
        let mut g = dipole(4);
        for (w, color) in moves {
            let white = w as usize % g.p();
            g = insert_melon(&g, white, color);
        }
        g
    })
}

proptest! {
    #[test]
    fn encode_decode_round_trip(g in graph_strategy(2..=4, 5)) {
        let back = ColoredGraph::decode(&g.encode()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn faces_partition_whites(g in graph_strategy(2..=4, 5)) {
        for i in 0..g.num_colors() {
            for j in (i + 1)..g.num_colors() {
                let total: usize = g.faces(i, j).unwrap().iter().map(|f| f.len()).sum();
                prop_assert_eq!(total, g.p());
            }
        }
    }

    #[test]
    fn relabeling_preserves_class_invariants(
        g in graph_strategy(3..=4, 4),
        wseed in proptest::collection::vec(any::<u32>(), 4),
    ) {
        // derive a relabeling pair from the seed material
        let p = g.p();
        let mut white: Vec<usize> = (0..p).collect();
        let mut black: Vec<usize> = (0..p).collect();
        for (k, s) in wseed.iter().enumerate() {
            white.swap(k % p, *s as usize % p);
            black.swap((k + 1) % p, (*s >> 8) as usize % p);
        }
        let relabeled = g.relabel(
            &Perm::from_images(white).unwrap(),
            &Perm::from_images(black).unwrap(),
        );
        prop_assert_eq!(
            g.canonical_form().graph,
            relabeled.canonical_form().graph
        );
        prop_assert_eq!(g.is_connected(), relabeled.is_connected());
        for i in 0..g.num_colors() {
            for j in (i + 1)..g.num_colors() {
                prop_assert_eq!(
                    g.face_count(i, j).unwrap(),
                    relabeled.face_count(i, j).unwrap()
                );
            }
        }
        if g.is_connected() {
            prop_assert_eq!(
                degree(&g).unwrap().omega,
                degree(&relabeled).unwrap().omega
            );
        }
    }

    #[test]
    fn amplitude_routes_agree_on_random_graphs(g in graph_strategy(4..=4, 6)) {
        prop_assume!(g.is_connected());
        let via_degree = amplitude_exponent(&g, 3).unwrap();
        let via_loops = amplitude_exponent_via_bubbles(&g, 3).unwrap();
        prop_assert_eq!(via_degree, via_loops);
        // non-negativity: the exponent never exceeds D
        prop_assert!(via_degree.0 <= num::rational::Ratio::new(3, 1));
    }

    #[test]
    fn melon_bijection_beyond_exhaustive_range(g in melon_strategy(5)) {
        prop_assert!(is_melonic(&g).unwrap());
        prop_assert_eq!(degree(&g).unwrap().omega, 0);
        let tree = melon_to_tree(&g).unwrap();
        prop_assert_eq!(tree.node_count(), g.p());
        let rebuilt = tree_to_melon(&tree).unwrap();
        prop_assert_eq!(
            rebuilt.canonical_form().graph,
            g.canonical_form().graph
        );
    }
}
