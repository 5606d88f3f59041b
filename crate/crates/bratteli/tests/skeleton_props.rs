mod common;

use bratteli::fixtures;
use bratteli::skeleton::{sigma_from_order, skeleton_from_order, Skeleton};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extracted_skeletons_validate(counts in proptest::collection::vec(1usize..=3, 2..=5), s1 in any::<u64>(), s2 in any::<u64>()) {
        let b = common::random_diagram(&counts, 2, s1);
        let omega = common::random_order(&b, s2);
        if let Ok(ex) = skeleton_from_order(&b, &omega) {
            prop_assert!(ex.skeleton.validate(&ex.diagram).is_ok());
            prop_assert_eq!(ex.levels[0], 0);
            prop_assert_eq!(*ex.levels.last().unwrap(), b.depth());
        }
    }

    #[test]
    fn extremal_chains_are_coherent(counts in proptest::collection::vec(1usize..=3, 2..=5), s1 in any::<u64>(), s2 in any::<u64>()) {
        let b = common::random_diagram(&counts, 2, s1);
        let omega = common::random_order(&b, s2);
        let Ok(ex) = skeleton_from_order(&b, &omega) else { return Ok(()) };
        let skel = &ex.skeleton;
        let top = skel.depth();
        for u in 0..ex.diagram.vertex_count(top) {
            for v in 0..ex.diagram.vertex_count(top) {
                for n in (0..top).rev() {
                    if skel.tau_chain(top, u, n) == skel.tau_chain(top, v, n) {
                        for m in 0..n {
                            prop_assert_eq!(skel.tau_chain(top, u, m), skel.tau_chain(top, v, m));
                        }
                    }
                    if skel.mu_chain(top, u, n) == skel.mu_chain(top, v, n) {
                        for m in 0..n {
                            prop_assert_eq!(skel.mu_chain(top, u, m), skel.mu_chain(top, v, m));
                        }
                    }
                }
                for n in 1..top {
                    prop_assert!(skel.max_vertices(n).contains(&skel.tau_chain(top, u, n)));
                    prop_assert!(skel.min_vertices(n).contains(&skel.mu_chain(top, u, n)));
                }
            }
        }
    }
}

#[test]
fn sigma_is_stable_in_the_horizon() {
    let (b, omega) = fixtures::example_2_6_telescoped(5);
    let skel = Skeleton::stationary(&b, &[0, 1, 2, 0], &[0, 1, 2, 1]).unwrap();
    let first = sigma_from_order(&b, &omega, &skel, 1, 2).unwrap();
    for horizon in 3..=5 {
        assert_eq!(sigma_from_order(&b, &omega, &skel, 1, horizon).unwrap(), first);
    }
    let expected: Vec<(usize, Vec<usize>)> = vec![(0, vec![1]), (1, vec![2]), (2, vec![0])];
    let got: Vec<(usize, Vec<usize>)> = first.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect();
    assert_eq!(got, expected);
}

#[test]
fn coinciding_extremal_edges_are_rejected() {
    let f = bratteli::IncidenceMatrix::from_rows(vec![vec![1, 1], vec![3, 2]]).unwrap();
    let b = bratteli::BratteliDiagram::stationary(f, 3).unwrap();
    assert!(Skeleton::stationary(&b, &[1, 1], &[1, 1]).is_err());
    assert!(Skeleton::stationary(&b, &[1, 1], &[0, 0]).is_ok());
}
