mod support;

use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_round_trip(seed in any::<u64>()) {
        let r = support::hilbert_roundtrip_case(seed);
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn descending_walk_terminates(seed in any::<u64>()) {
        let r = support::descending_walk(seed);
        prop_assert!(r.is_ok(), "{:?}", r);
    }
}
