mod common;

use common::patgen::{
    self, brute_exhaustive, brute_redundant, matches, random_case, random_pat, random_ty, row_matches,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sml2gallina::elab::elaborate;
use sml2gallina::frontend::{parse_source, DecKind};
use sml2gallina::patterns::{
    generalize, is_exhaustive, lower, naive_precondition, redundant_rows, synthesize_precondition, Ctor, PatTree,
    PatternMatrix, PreconditionFormula,
};
use sml2gallina::types::DataEnv;

fn holds(f: &PreconditionFormula, vals: &[PatTree]) -> bool {
    f.disjuncts.iter().any(|conj| conj.iter().all(|a| matches(&a.skeleton, &vals[a.arg])))
}

/// Clause matrix of the first `fun` in `src`.
fn fun_matrix(src: &str) -> (PatternMatrix, DataEnv) {
    let (prog, infix) = parse_source(src).unwrap();
    let elab = elaborate(&prog, &infix).unwrap();
    let d = &elab.decls[0];
    let DecKind::Fun { binds, .. } = &d.decl.kind else { panic!("not a fun") };
    let clauses = &binds[0].clauses;
    let rows = clauses.iter().map(|c| c.pats.iter().map(|p| lower(p, &d.ann.types)).collect()).collect();
    let tys = clauses[0].pats.iter().map(|p| d.ann.types[&p.meta.id].clone()).collect();
    (PatternMatrix::new(rows, tys), elab.data.clone())
}

fn int_list(xs: &[i64]) -> PatTree {
    xs.iter()
        .rev()
        .fold(PatTree::leaf(Ctor::Nil), |t, &x| PatTree::ctor(Ctor::Cons, vec![PatTree::leaf(Ctor::Int(x)), t]))
}

/// Lists of length <= 2 over {0, 1}: seven of them.
fn small_lists() -> Vec<PatTree> {
    let mut out = vec![int_list(&[])];
    for a in 0..2 {
        out.push(int_list(&[a]));
        for b in 0..2 {
            out.push(int_list(&[a, b]));
        }
    }
    out
}

const HD_SUM: &str = "fun hd_sum (a::l) (a'::l') init = init + a + a'\n\
                      | hd_sum (a::l) l' init = init + a\n\
                      | hd_sum l (a'::l') init = init + a'";

#[test]
fn hd_sum_precondition_is_minimized() {
    let (m, data) = fun_matrix(HD_SUM);
    let min = synthesize_precondition(&m, &data).expect("partial");
    let sizes: Vec<usize> = min.disjuncts.iter().map(Vec::len).collect();
    assert_eq!(sizes, [2, 1, 1]);
    assert!(min.disjuncts.iter().flatten().all(|a| a.arg < 2), "init never constrained");
    let naive = naive_precondition(&m);
    let sizes: Vec<usize> = naive.disjuncts.iter().map(Vec::len).collect();
    assert_eq!(sizes, [3, 3, 3]);
}

#[test]
fn hd_sum_preconditions_agree_with_row_matching() {
    let (m, data) = fun_matrix(HD_SUM);
    let min = synthesize_precondition(&m, &data).unwrap();
    let naive = naive_precondition(&m);
    let lists = small_lists();
    assert_eq!(lists.len(), 7);
    let mut checked = 0;
    for x1 in &lists {
        for x2 in &lists {
            for init in [-1, 0, 7] {
                let vals = [x1.clone(), x2.clone(), PatTree::leaf(Ctor::Int(init))];
                let covered = m.rows.iter().any(|r| row_matches(r, &vals));
                assert_eq!(holds(&min, &vals), covered, "{x1} {x2}");
                assert_eq!(holds(&naive, &vals), covered, "{x1} {x2}");
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 49 * 3);
}

#[test]
fn hd_sum_over_pairs_has_same_shape() {
    let (m, data) = fun_matrix(
        "fun hd_sum ((a,b)::l) ((a',b')::l') init = init + a + b + a' + b'\n\
         | hd_sum ((a,b)::l) l' init = init + a + b\n\
         | hd_sum l ((a',b')::l') init = init + a' + b'",
    );
    let min = synthesize_precondition(&m, &data).unwrap();
    assert_eq!(min.disjuncts.iter().map(Vec::len).collect::<Vec<_>>(), [2, 1, 1]);
    for a in min.disjuncts.iter().flatten() {
        assert_eq!(a.vars.len(), 2, "element pair collapses to one variable");
    }
}

#[test]
fn exhaustiveness_agrees_with_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let data = DataEnv::default();
    let (mut yes, mut no) = (0, 0);
    for i in 0..10_000 {
        let case = random_case(&mut rng);
        let want = brute_exhaustive(&case);
        assert_eq!(is_exhaustive(&case.matrix, &data), want, "case {i}: {case:?}");
        if want {
            yes += 1;
        } else {
            no += 1;
        }
    }
    // Both verdicts must be well represented for the check to mean much.
    assert!(yes > 500 && no > 500, "{yes} exhaustive, {no} not");
}

#[test]
fn list_values_cover_every_pattern_shape() {
    // One element past the deepest pattern is enough.
    let vals = patgen::Ty::BoolList.values();
    assert_eq!(vals.len(), 1 + 2 + 4 + 8 + 16);
}

proptest! {
    #[test]
    fn redundancy_agrees_with_enumeration(seed in any::<u64>()) {
        let case = random_case(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(redundant_rows(&case.matrix, &DataEnv::default()), brute_redundant(&case));
    }

    #[test]
    fn generalized_pattern_matches_the_same_values(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ty = random_ty(&mut rng, true);
        let p = random_pat(&mut rng, &ty);
        let (vars, skel) = generalize(&p, &DataEnv::default());
        prop_assert_eq!(skel.vars(), vars);
        for v in ty.values() {
            prop_assert_eq!(matches(&p, &v), matches(&skel, &v), "{} vs {} on {}", p, skel, v);
        }
    }

    #[test]
    fn precondition_holds_exactly_on_matched_inputs(seed in any::<u64>()) {
        let case = random_case(&mut ChaCha8Rng::seed_from_u64(seed));
        let data = DataEnv::default();
        let naive = naive_precondition(&case.matrix);
        let min = synthesize_precondition(&case.matrix, &data);
        prop_assert!(min.as_ref().is_none_or(|f| f.atom_count() <= naive.atom_count()));
        for vals in patgen::value_vectors(&case.tys) {
            let covered = case.matrix.rows.iter().any(|r| row_matches(r, &vals));
            prop_assert_eq!(holds(&naive, &vals), covered);
            match &min {
                Some(f) => prop_assert_eq!(holds(f, &vals), covered),
                None => prop_assert!(covered),
            }
        }
    }
}
