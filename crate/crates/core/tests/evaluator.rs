mod common;

use common::{expected_bindings, read, run, sources};
use sml2gallina::eval::{EvalOutcome, DEFAULT_FUEL};

#[test]
fn corpus_matches_recorded_bindings() {
    let corpus = sources("corpus");
    assert_eq!(corpus.len(), 20);
    for (stem, src) in corpus {
        let expected = expected_bindings(&read("corpus", &format!("{stem}.out")));
        match run(&src, DEFAULT_FUEL) {
            EvalOutcome::Ok(got) => assert_eq!(got, expected, "{stem}"),
            other => panic!("{stem}: {other:?}"),
        }
    }
}

#[test]
fn failing_programs_are_caught() {
    for (stem, src) in sources("failing") {
        let outcome = run(&src, 10_000);
        match stem.as_str() {
            "loop" => assert_eq!(outcome, EvalOutcome::FuelExhausted),
            _ => assert!(matches!(outcome, EvalOutcome::BindFailure { .. }), "{stem}: {outcome:?}"),
        }
    }
}
