use super::*;
use crate::elab::elaborate;
use crate::emit::{emit, EmitConfig};
use crate::frontend::parse_source;

fn run(src: &str) -> Result<Translation> {
    let (prog, infix) = parse_source(src).expect("parses");
    let elab = elaborate(&prog, &infix).expect("elaborates");
    translate(&elab)
}

fn coq(src: &str) -> String {
    let t = run(src).unwrap_or_else(|e| panic!("translation failed: {e}"));
    let cfg = EmitConfig { header: false, ..EmitConfig::default() };
    emit(&t.sentences, &cfg)
}

/// Compare ignoring whitespace differences.
fn squash(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn has(out: &str, piece: &str) {
    assert!(squash(out).contains(&squash(piece)), "missing `{piece}` in:\n{out}");
}

#[test]
fn record_type_and_ellipsis() {
    let out = coq("type r = { name : string, age : int }\n\
                   fun isBob ({name = \"Bob\",...}: r) = true\n  | isBob {...} = false");
    has(&out, "Record rid_1 := { rid_1_name : string; rid_1_age : Z }.");
    has(&out, "Definition r := rid_1.");
    has(&out, "Equations isBob (x1: r): bool :=");
    has(&out, "isBob {| rid_1_age := _; rid_1_name := \"Bob\" |} := true;");
    has(&out, "isBob {| rid_1_age := _; rid_1_name := _ |} := false.");
}

#[test]
fn record_reused_across_declarations() {
    let out = coq("val a = {x = 1, y = 2}\nval b = {y = 3, x = 4}\nval c = #x a");
    assert_eq!(out.matches("Record ").count(), 1, "{out}");
    has(&out, "Definition c := (rid_1_x a).");
}

#[test]
fn polymorphic_empty_list() {
    let out = coq("val L = []");
    assert!(out.contains("Definition L {_'"), "{out}");
    assert!(out.contains(": @list _'"), "{out}");
}

#[test]
fn nonexhaustive_val_binding_uses_failure() {
    let out = coq("val x :: l = [1, 2, 3]");
    has(&out, "Local Axiom patternFailure: forall {a}, a.");
    has(&out, "Definition x := match [1; 2; 3] with (x :: l) => x | _ => patternFailure end.");
    has(&out, "Definition l := match [1; 2; 3] with (x :: l) => l | _ => patternFailure end.");
    assert_eq!(out.matches("Axiom").count(), 1);
}

#[test]
fn length_is_total() {
    let out = coq("fun length [] = 0\n  | length (_ :: l) = 1 + length l");
    assert!(out.contains("Equations length `(x1: @list _'"), "{out}");
    has(&out, "length [] := 0;");
    assert!(!out.contains("patternFailure"), "{out}");
}

#[test]
fn partial_head_gets_precondition() {
    let out = coq("fun hd (x :: _) = x");
    assert!(out.contains("exists"), "{out}");
    assert!(out.contains("x1 = "), "{out}");
    assert!(out.contains(":= _"), "{out}");
}

#[test]
fn hd_sum_precondition_has_three_disjuncts() {
    let t = run("fun hd_sum (x::_) (y::_) (z::_) = x + y + z\n\
                 | hd_sum (x::_) [] _ = x\n\
                 | hd_sum [] (y::_) _ = y")
    .unwrap();
    let Sentence::Equations(fs) = &t.sentences[0] else { panic!("{:?}", t.sentences) };
    let pre = fs[0].precondition.as_ref().expect("precondition");
    let mut disjuncts = 0;
    let mut stack = vec![pre];
    while let Some(t) = stack.pop() {
        match t {
            Term::Or(a, b) => {
                stack.push(a);
                stack.push(b);
            }
            _ => disjuncts += 1,
        }
    }
    assert_eq!(disjuncts, 3);
}

#[test]
fn contract_becomes_admitted_theorem() {
    let out = coq("(!! posAdd x y ==> z;\n REQUIRES: x > 0 andalso y > 0;\n ENSURES: z > 0; !!)\n\
                   fun posAdd x y = x + y");
    has(&out, "Theorem posAdd_THM: forall x y z, posAdd x y = z /\\ ((x > 0) && (y > 0)) = true -> (z > 0) = true.");
    has(&out, "Admitted.");
}

#[test]
fn mutual_recursion() {
    let out = coq("datatype 'a evenList = ENil | ECons of 'a * 'a oddList\n\
                   and 'a oddList = OCons of 'a * 'a evenList\n\
                   fun lengthE (ENil: 'a evenList): int = 0\n\
                     | lengthE (ECons (_, l)) = lengthO l\n\
                   and lengthO (OCons (_, l)) = lengthE l");
    has(&out, "with oddList");
    has(&out, "with lengthO");
    has(&out, "lengthE (ECons (_, l)) := (lengthO l)");
}

#[test]
fn infix_function() {
    let out = coq("infix F\nfun op F (x, y) = x*x + y\nval f = op F\nval x = 5 F 2\nval y = op F (2, 3)");
    has(&out, "Definition opF := F.");
    has(&out, "Notation \"x 'F' y\" := (F (x, y)) (left associativity, at level 29).");
    has(&out, "Definition f := opF.");
    has(&out, "Definition x := (5 F 2).");
    has(&out, "Definition y := (opF (2, 3)).");
}

#[test]
fn inline_structure_is_lifted_before_use() {
    let out = coq("signature S = sig val x : int end\n\
                   functor F (A : S) = struct val y = A.x end\n\
                   structure B = F (struct val x = 1 end)");
    let lifted = out.find("Module mid_1").expect("lifted module");
    let user = out.find("Module B").expect("application");
    assert!(lifted < user, "{out}");
    has(&out, "Module B := !F mid_1.");
    has(&out, "Module F (A : S).");
}

#[test]
fn inline_signature_is_lifted() {
    let out = coq("structure A : sig val x : int end = struct val x = 1 end");
    has(&out, "Module Type mid_1. Parameter x : Z. End mid_1.");
    has(&out, "Module A <: mid_1.");
}

#[test]
fn records_in_structures_are_qualified_outside() {
    let out = coq("structure S = struct val p = {a = 1} end\nval q = #a S.p");
    has(&out, "Module S. Record rid_1");
    has(&out, "Definition q := (S.rid_1_a S.p).");
}

#[test]
fn let_with_function_is_unsupported() {
    let err = run("val x = let fun f y = y in f 1 end").unwrap_err();
    assert!(err.is_unsupported());
}

#[test]
fn symbolic_identifier_is_unsupported() {
    let err = run("infix ++\nfun op ++ (a, b) = a + b").unwrap_err();
    assert!(err.is_unsupported());
}

#[test]
fn keywords_are_renamed() {
    let out = coq("val fix = 1");
    has(&out, "Definition fix_ := 1.");
}

#[test]
fn fresh_names_are_deterministic() {
    let src = "val a = {x = 1}\nval b = {y = []}\nstructure T : sig val z : int end = struct val z = 0 end";
    assert_eq!(coq(src), coq(src));
}
