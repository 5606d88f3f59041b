mod common;

use bratteli::infinitesimal::{epsilon_family, independence_rank, perron_pairing_check, propagate_check};
use bratteli::verify::stationary_triples;
use bratteli::BratteliDiagram;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn vectors_sum_to_zero_and_propagate(d in 2usize..=4, seed in any::<u64>()) {
        let f = common::random_primitive(d, 3, 9, seed);
        let b = BratteliDiagram::stationary(f.clone(), 5).unwrap();
        for tr in stationary_triples(&f).unwrap().into_iter().filter(|t| t.balance_holds()) {
            let skel = tr.triple.skeleton(&b).unwrap();
            let sigma = tr.triple.correspondence(5);
            for k in 1..=3 {
                let family = epsilon_family(&b, &skel, &sigma, 2, k).unwrap();
                for i in 0..d {
                    prop_assert_eq!(family.iter().map(|v| v.entries[i]).sum::<i64>(), 0);
                }
                for v in &family {
                    prop_assert!(v.formulas_agree, "{:?} k={}", tr.triple, k);
                }
            }
            for v in skel.max_vertices(1) {
                prop_assert!(propagate_check(&b, &skel, &sigma, 2, v).unwrap().pass);
            }
            let j = skel.max_vertices(1).len();
            if tr.strongly_connected && j >= 2 {
                let family = epsilon_family(&b, &skel, &sigma, 2, 1).unwrap();
                for skip in 0..j {
                    let subset: Vec<Vec<i64>> = family
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, v)| v.entries.clone())
                        .collect();
                    prop_assert_eq!(independence_rank(&subset).unwrap().rank, j - 1, "{:?}", tr.triple);
                }
            }
            if f.is_positive() {
                for v in epsilon_family(&b, &skel, &sigma, 2, 1).unwrap() {
                    prop_assert!(perron_pairing_check(&b, &v.entries).unwrap().pass);
                }
            }
        }
    }
}
