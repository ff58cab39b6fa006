use detroute_core::detr::{shortest_time_featured_path, validate_path, DijkstraState, Step};
use detroute_core::fixtures::{random_eteg, RandomEtegConfig};
use detroute_core::ilp::brute_force_min_delay;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn search_matches_enumeration(seed in any::<u64>()) {
        let (g, f) = random_eteg(&RandomEtegConfig::default(), seed);
        let found = shortest_time_featured_path(&g, &f).unwrap();
        let oracle = brute_force_min_delay(&g, &f).unwrap();
        prop_assert_eq!(found.as_ref().map(|p| p.total_delay), oracle);
        if let Some(p) = found {
            prop_assert!(validate_path(&p, &g, &f).is_ok());
            prop_assert!(p.total_delay <= f.bound);
        }
    }

    #[test]
    fn popped_labels_are_monotone_and_final(seed in any::<u64>()) {
        let (g, f) = random_eteg(&RandomEtegConfig::default(), seed);
        let mut s = DijkstraState::new(&g, &f).unwrap();
        let mut last = 0;
        let mut popped = Vec::new();
        loop {
            match s.step() {
                Step::Settled(u) => {
                    let d = s.label(g.node(u)).unwrap();
                    prop_assert!(d >= last);
                    last = d;
                    popped.push((u, d));
                    for &(v, dv) in &popped {
                        prop_assert_eq!(s.label(g.node(v)), Some(dv));
                    }
                }
                Step::Reached => {
                    prop_assert!(s.label(detroute_core::EtegNode::Sink).unwrap() >= last);
                    break;
                }
                Step::Exhausted => break,
            }
        }
    }
}
