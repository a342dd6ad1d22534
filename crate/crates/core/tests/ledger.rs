mod support;

use proptest::prelude::*;

#[test]
fn nonrational_unit_drops_beta() {
    let (b0, b1) = support::nonrational_unit().unwrap();
    assert!(b1 < b0);
}

#[test]
fn corpus_ledger() {
    support::criterion_8().unwrap();
}

#[test]
fn isolation_holds_at_every_unit_entry() {
    let (runs, _) = support::run_corpus().unwrap();
    for run in &runs {
        for u in &run.trace.units {
            let inv = u.entry_invariants_o.as_ref().unwrap();
            assert!(inv.alpha < num_traits::One::one(), "{}", run.name);
            assert!(inv.epsilon < num_traits::One::one(), "{}", run.name);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_runs_respect_ledger(seed in any::<u64>()) {
        let mut g = support::rng(seed);
        let label = support::random_label(&mut g, 2, 6, |b, a1, a2| a1 + a2 + b >= 3);
        let opts = charpoly::resolve::DriverOptions::default();
        match charpoly::resolve::resolve_driver(&label, &opts) {
            Ok(t) => {
                for e in &t.ledger {
                    prop_assert!(e.lattice_ok);
                    prop_assert!(!e.guaranteed || e.beta_non_increasing());
                }
            }
            Err(charpoly::Error::Inconclusive(_)) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}
