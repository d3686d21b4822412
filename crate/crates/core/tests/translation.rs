use arv_core::automaton::{translate, translate_negation, SymbolicAutomaton};
use arv_core::gen::{self, AtomGen, SreGen, StlGen};
use arv_core::monitor::satisfies;
use arv_core::spec::{Spec, Trace};
use arv_core::syntax::parse_spec;
use proptest::prelude::*;

fn trace(seed: u64, len: usize) -> Trace {
    gen::int_trace(&mut gen::rng(seed), &["x".to_string()], len, 0, 4)
}

fn atoms() -> AtomGen {
    AtomGen::new(&["x"], 0, 4, false)
}

fn check(spec: &Spec, t: &Trace) -> Result<(), TestCaseError> {
    let pos = translate(spec).unwrap();
    let neg = translate_negation(spec).unwrap();
    let want = satisfies(spec, t).unwrap();
    prop_assert_eq!(pos.accepts(&t.samples).unwrap(), want, "{}", spec);
    prop_assert_eq!(neg.accepts(&t.samples).unwrap(), !want, "negation of {}", spec);
    let back = SymbolicAutomaton::from_json(&pos.to_json()).unwrap();
    prop_assert_eq!(back.accepts(&t.samples).unwrap(), want);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn stl_translation_agrees_with_evaluator(seed in any::<u64>(), ts in any::<u64>(), len in 1usize..7) {
        let f = StlGen { atoms: atoms(), depth: 2, max_bound: 3, nnf: false }.formula(&mut gen::rng(seed));
        check(&Spec::Stl(f), &trace(ts, len))?;
    }

    #[test]
    fn sre_translation_agrees_with_evaluator(seed in any::<u64>(), ts in any::<u64>(), len in 1usize..7) {
        let e = SreGen { atoms: atoms(), depth: 3, max_bound: 3 }.expr(&mut gen::rng(seed));
        check(&Spec::Sre(e), &trace(ts, len))?;
    }
}

#[test]
fn unsatisfiable_specs_have_empty_languages() {
    for src in ["G(a >= 5 && a < 5)", "!(F(a >= -30 && a <= 30) || F(a < -30 || a > 30))", "#lang sre\n<a <= 1 && a > 1>[1,1]"] {
        assert!(translate(&parse_spec(src).unwrap()).unwrap().is_language_empty(), "{src}");
    }
    assert!(!translate(&parse_spec("F a <= 1").unwrap()).unwrap().is_language_empty());
}

#[test]
fn translated_sizes() {
    let sizes = |src: &str| {
        let a = translate(&parse_spec(src).unwrap()).unwrap();
        (a.num_locations, a.transitions.len())
    };
    assert_eq!(sizes("F(x <= 5 && G[0,1](x <= 3 && y > 6))"), (3, 4));
    assert_eq!(sizes("F x <= 3").0, 2);
    assert_eq!(sizes("#lang sre\nx <= 3"), (1, 1));
}
