mod common;

use common::{progen, run, sources};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sml2gallina::emit::EmitConfig;
use sml2gallina::eval::EvalOutcome;
use sml2gallina::frontend::parse_source;
use sml2gallina::frontend::printer::print_program;
use sml2gallina::pipeline::{compile, Options};
use sml2gallina::surface::check_reparse;

fn random_program(seed: u64) -> String {
    progen::program(&mut ChaCha8Rng::seed_from_u64(seed), 6)
}

fn plain() -> Options {
    Options { emit: EmitConfig { header: true, ..EmitConfig::default() }, ..Options::default() }
}

/// Every program the translator is expected to accept.
fn accepted_sources() -> Vec<(String, String)> {
    let mut all = sources("corpus");
    all.extend(sources("golden"));
    all
}

#[test]
fn corpus_translation_is_deterministic() {
    for (stem, src) in accepted_sources() {
        let a = compile(&src, &plain()).unwrap_or_else(|f| panic!("{stem}: {:?}", f.render(&stem, &src)));
        let b = compile(&src, &plain()).unwrap();
        assert_eq!(a.text, b.text, "{stem}");
    }
}

#[test]
fn corpus_output_reparses() {
    for (stem, src) in accepted_sources() {
        let out = compile(&src, &plain()).unwrap();
        let problems = check_reparse(&out.sentences, &out.text);
        assert!(problems.is_empty(), "{stem}:\n{}", problems.join("\n"));
    }
}

#[test]
fn corpus_printing_round_trips() {
    for (stem, src) in accepted_sources() {
        let (prog, _) = parse_source(&src).unwrap();
        let printed = print_program(&prog);
        let (again, _) = parse_source(&printed).unwrap_or_else(|e| panic!("{stem}: {e}\n{printed}"));
        assert_eq!(prog, again, "{stem}");
    }
}

#[test]
fn skipping_the_gate_never_changes_text() {
    for (stem, src) in accepted_sources() {
        let on = compile(&src, &plain()).unwrap();
        let off = compile(&src, &Options { eval: false, ..plain() }).unwrap();
        assert_eq!(on.text, off.text, "{stem}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_programs_round_trip_through_the_printer(seed in any::<u64>()) {
        let src = random_program(seed);
        let (prog, _) = parse_source(&src).unwrap();
        let printed = print_program(&prog);
        let (again, _) = parse_source(&printed).unwrap();
        prop_assert_eq!(&prog, &again);
        prop_assert_eq!(print_program(&again), printed);
    }

    #[test]
    fn random_programs_translate_deterministically_and_reparse(seed in any::<u64>()) {
        let src = random_program(seed);
        let a = compile(&src, &plain()).map_err(|f| TestCaseError::fail(format!("{:?}\n{src}", f.render("gen", &src))))?;
        let b = compile(&src, &plain()).unwrap();
        prop_assert_eq!(&a.text, &b.text);
        let problems = check_reparse(&a.sentences, &a.text);
        prop_assert!(problems.is_empty(), "{}\n{}", problems.join("\n"), src);
        let off = compile(&src, &Options { eval: false, ..plain() }).unwrap();
        prop_assert_eq!(a.text, off.text);
    }

    #[test]
    fn more_fuel_never_changes_a_finished_result(seed in any::<u64>(), f1 in 1u64..400, extra in 0u64..4000) {
        let src = random_program(seed);
        let small = run(&src, f1);
        let large = run(&src, f1 + extra);
        match small {
            EvalOutcome::FuelExhausted => {}
            done => prop_assert_eq!(done, large),
        }
    }

    #[test]
    fn fuel_monotonicity_on_recursion(n in 0i64..20, f1 in 1u64..2000, extra in 0u64..2000) {
        let src = format!("fun fib 0 = 0\n  | fib 1 = 1\n  | fib n = fib (n - 1) + fib (n - 2)\nval r = fib {n}");
        let small = run(&src, f1);
        let large = run(&src, f1 + extra);
        if large == EvalOutcome::FuelExhausted {
            prop_assert_eq!(small, EvalOutcome::FuelExhausted);
        } else if small != EvalOutcome::FuelExhausted {
            prop_assert_eq!(small, large);
        }
    }
}
