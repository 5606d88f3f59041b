mod common;

use bratteli::fixtures;
use bratteli::hgraph::{build_graph, connectivity, crossing_numbers};
use bratteli::verify::stationary_triples;
use bratteli::BratteliDiagram;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cells_crossings_and_loops(d in 2usize..=4, seed in any::<u64>()) {
        let f = common::random_primitive(d, 3, 9, seed);
        let b = BratteliDiagram::stationary(f.clone(), 3).unwrap();
        for tr in stationary_triples(&f).unwrap() {
            let skel = tr.triple.skeleton(&b).unwrap();
            let sigma = tr.triple.correspondence(3);
            let g = build_graph(&b, &skel, &sigma, 2).unwrap();
            let mut seen = vec![0; d];
            for (i, cell) in g.partition.cells.iter().enumerate() {
                for &w in &cell.members {
                    seen[w] += 1;
                    prop_assert_eq!(g.partition.cell_of[w], i);
                }
                prop_assert_eq!(g.has_loop(i), sigma.contains(1, cell.max_vertex, cell.min_vertex));
            }
            prop_assert!(seen.iter().all(|&c| c == 1));
            for u in 0..d {
                let c = crossing_numbers(&b, &skel, &g, u).unwrap();
                prop_assert_eq!(c.counts.iter().sum::<u64>(), f.row_sum(u) - 1);
            }
        }
    }
}

#[test]
fn perfect_order_graphs_are_strongly_connected() {
    let fx = fixtures::example_2_6_skeleton(6);
    for n in 2..=6 {
        let g = build_graph(&fx.diagram, &fx.skeleton, &fx.sigma, n).unwrap();
        assert!(connectivity(&g).strong, "level {n}");
    }
}
