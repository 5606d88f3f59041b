mod common;

use bratteli::diagram::telescope;
use bratteli::ordering::telescope_order;
use bratteli::synth::{synthesize_stationary, WalkPolicy};
use bratteli::verify::{
    brute_force_orders, check_perfect_finite_rank, stationary_triples, stationary_verdict, CensusMode, CensusOptions,
};
use bratteli::{BratteliDiagram, DiagramOrder};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn census_perfect_orders_meet_the_conditions(d in 2usize..=3, seed in any::<u64>()) {
        let f = common::random_primitive(d, 3, 7, seed);
        let b = BratteliDiagram::stationary(f, 3).unwrap();
        let Ok(census) = brute_force_orders(&b, &CensusOptions::new(CensusMode::Stationary, 20_000)) else {
            return Ok(());
        };
        for e in census.entries.iter().filter(|e| e.verdict.is_perfect()) {
            let n = e.necessity.as_ref().unwrap();
            prop_assert!(n.words_follow_graph, "{:?}", e.words);
            prop_assert!(n.balance_holds, "{:?}", e.words);
            prop_assert!(n.positively_strong_all, "{:?}", e.words);
            prop_assert!(n.strongly_connected, "{:?}", e.words);
        }
    }

    #[test]
    fn synthesizable_triples_give_perfect_orders(d in 2usize..=4, seed in any::<u64>()) {
        let f = common::random_primitive(d, 3, 9, seed);
        let b = BratteliDiagram::stationary(f.clone(), 3).unwrap();
        for tr in stationary_triples(&f).unwrap().into_iter().filter(|t| t.synthesizable()) {
            let skel = tr.triple.skeleton(&b).unwrap();
            let sigma = tr.triple.correspondence(3);
            let (block, _) = synthesize_stationary(&b, &skel, &sigma, WalkPolicy::Guarded).unwrap();
            let v = stationary_verdict(&b, &block);
            prop_assert!(v.is_perfect(), "{:?} gave {:?}", tr.triple, block);
            prop_assert_eq!(v.bijection.unwrap(), tr.triple.sigma.clone());
        }
    }

    #[test]
    fn verdicts_survive_telescoping(d in 2usize..=3, seed in any::<u64>(), pick in any::<u64>()) {
        let f = common::random_primitive(d, 3, 6, seed);
        let b = BratteliDiagram::stationary(f.clone(), 5).unwrap();
        for i in 0..4 {
            let block = common::random_stationary_block(&f, pick.wrapping_add(i));
            let omega = DiagramOrder::stationary(&b, &block).unwrap();
            let before = check_perfect_finite_rank(&b, &omega, 5).unwrap();
            let t = telescope(&b, &[0, 1, 3, 5]).unwrap();
            let lo = telescope_order(&b, &omega, &t).unwrap();
            let after = check_perfect_finite_rank(&t.diagram, &lo, 3).unwrap();
            prop_assert_eq!(before.status, after.status, "{:?}", block);
            prop_assert_eq!(before.bijection, after.bijection);
        }
    }
}
