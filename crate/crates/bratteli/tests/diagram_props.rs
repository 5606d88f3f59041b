mod common;

use bratteli::diagram::telescope;
use bratteli::BratteliDiagram;
use proptest::prelude::*;

fn levels_strategy(depth: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(any::<bool>(), depth).prop_map(move |keep| {
        let mut l = vec![0];
        l.extend((1..=depth).filter(|&i| keep[i - 1] || i == depth));
        l
    })
}

fn diagram_and_levels() -> impl Strategy<Value = (BratteliDiagram, Vec<usize>)> {
    (proptest::collection::vec(1usize..=3, 2..=5), any::<u64>()).prop_flat_map(|(counts, seed)| {
        let b = common::random_diagram(&counts, 2, seed);
        let d = b.depth();
        (Just(b), levels_strategy(d))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn telescoped_matrices_are_products((b, levels) in diagram_and_levels()) {
        let t = telescope(&b, &levels).unwrap();
        for i in 0..levels.len() - 1 {
            prop_assert_eq!(t.diagram.incidence_matrix(i).unwrap(), &b.product(levels[i], levels[i + 1]).unwrap());
        }
    }

    #[test]
    fn telescoping_composes((b, l1) in diagram_and_levels(), pick in proptest::collection::vec(any::<bool>(), 6)) {
        let t1 = telescope(&b, &l1).unwrap();
        let top = t1.diagram.depth();
        let mut l2 = vec![0];
        l2.extend((1..=top).filter(|&i| pick[(i - 1) % pick.len()] || i == top));
        let twice = telescope(&t1.diagram, &l2).unwrap();
        let composed: Vec<usize> = l2.iter().map(|&j| l1[j]).collect();
        let once = telescope(&b, &composed).unwrap();
        prop_assert_eq!(twice.diagram.matrices(), once.diagram.matrices());
    }

    #[test]
    fn matrices_round_trip(counts in proptest::collection::vec(1usize..=4, 1..=5), seed in any::<u64>()) {
        let b = common::random_diagram(&counts, 3, seed);
        let again = BratteliDiagram::from_matrices(b.matrices().to_vec()).unwrap();
        prop_assert_eq!(again.matrices(), b.matrices());
        prop_assert_eq!(again.vertex_counts(), b.vertex_counts());
    }

    #[test]
    fn degrees_are_positive(counts in proptest::collection::vec(1usize..=4, 1..=5), seed in any::<u64>()) {
        let b = common::random_diagram(&counts, 2, seed);
        for n in 1..=b.depth() {
            for v in 0..b.vertex_count(n) {
                prop_assert!(b.in_degree(n, v) >= 1);
            }
        }
        for n in 0..b.depth() {
            let f = b.incidence_matrix(n).unwrap();
            for w in 0..f.cols() {
                prop_assert!(f.col_sum(w) >= 1);
            }
        }
    }

    #[test]
    fn telescoped_edges_are_paths((b, levels) in diagram_and_levels()) {
        let t = telescope(&b, &levels).unwrap();
        for n in 1..=t.diagram.depth() {
            for e in t.diagram.edges(n) {
                let path = t.path_of(&e).unwrap();
                prop_assert_eq!(path.len(), levels[n] - levels[n - 1]);
                prop_assert_eq!(path.first().unwrap().source, e.source);
                prop_assert_eq!(path.last().unwrap().range, e.range);
                prop_assert_eq!(t.edge_of(&path).unwrap(), e);
            }
        }
    }
}

#[test]
fn stationary_extension_repeats_block() {
    let b = bratteli::fixtures::example_2_6_diagram(2);
    let deep = b.extend_to(5).unwrap();
    for n in 1..5 {
        assert_eq!(deep.incidence_matrix(n).unwrap(), b.stationary_block().unwrap());
    }
    assert_eq!(deep.truncate(2).unwrap(), b);
}
