use ecmtt::gen::Gen;
use ecmtt::props::{self, RunEnd};
use proptest::prelude::*;

const FUEL: u64 = 100_000;

#[test]
fn preservation_and_progress_on_a_thousand_programs() {
    let mut gen = Gen::new(0x5eed);
    let mut values = 0;
    for i in 0..1000 {
        let program = gen.program();
        match props::preservation(&program.term, FUEL) {
            Ok((RunEnd::Value, _)) => values += 1,
            Ok(_) => {}
            Err(e) => panic!("program {i}: {e}"),
        }
    }
    assert!(values > 900, "only {values} programs reached a value");
}

#[test]
fn substitution_principles_on_five_hundred_instances_each() {
    let mut gen = Gen::new(42);
    for i in 0..500 {
        props::monadic(&gen.monadic_case()).unwrap_or_else(|e| panic!("monadic {i}: {e}"));
        props::continuation(&gen.cont_case(false)).unwrap_or_else(|e| panic!("continuation {i}: {e}"));
        props::continuation(&gen.cont_case(true)).unwrap_or_else(|e| panic!("continuation/handler {i}: {e}"));
        props::handling(&gen.handle_case()).unwrap_or_else(|e| panic!("handling {i}: {e}"));
        props::sequencing(&gen.seq_case()).unwrap_or_else(|e| panic!("sequencing {i}: {e}"));
        props::modal(&gen.modal_case()).unwrap_or_else(|e| panic!("modal {i}: {e}"));
        props::eval_meta(&gen.eval_case()).unwrap_or_else(|e| panic!("eval {i}: {e}"));
    }
}

#[test]
fn printing_round_trips_on_a_thousand_terms() {
    let mut gen = Gen::new(7);
    for i in 0..1000 {
        let term = gen.any_term();
        props::round_trip(&term).unwrap_or_else(|e| panic!("term {i}: {e}"));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steps_preserve_types(seed in any::<u64>()) {
        let program = Gen::new(seed).program();
        prop_assert!(props::preservation(&program.term, FUEL).is_ok(), "{}", program.term);
    }

    #[test]
    fn evaluation_is_deterministic(seed in any::<u64>()) {
        let program = Gen::new(seed).program();
        let a = ecmtt::evaluate(&program.term, FUEL, true);
        let b = ecmtt::evaluate(&program.term, FUEL, true);
        prop_assert_eq!(a.render(), b.render());
    }

    #[test]
    fn substitution_principles_hold(seed in any::<u64>()) {
        let mut gen = Gen::new(seed);
        prop_assert_eq!(props::monadic(&gen.monadic_case()), Ok(()));
        prop_assert_eq!(props::continuation(&gen.cont_case(seed % 2 == 0)), Ok(()));
        prop_assert_eq!(props::handling(&gen.handle_case()), Ok(()));
        prop_assert_eq!(props::sequencing(&gen.seq_case()), Ok(()));
        prop_assert_eq!(props::modal(&gen.modal_case()), Ok(()));
        prop_assert_eq!(props::eval_meta(&gen.eval_case()), Ok(()));
    }

    #[test]
    fn generated_terms_round_trip(seed in any::<u64>()) {
        let term = Gen::new(seed).any_term();
        prop_assert_eq!(props::round_trip(&term), Ok(()));
    }
}
