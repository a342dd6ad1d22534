mod support;

use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn criterion_matches_multiplicity(seed in any::<u64>()) {
        let r = support::nearness_case(seed);
        prop_assert!(r.is_ok(), "{:?}", r);
    }
}
