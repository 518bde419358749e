use super::*;
use crate::diag::Error;
use crate::frontend::parse_source;

fn elab(src: &str) -> Result<Elaborated> {
    let (prog, infix) = parse_source(src).expect("parses");
    elaborate(&prog, &infix)
}

fn scheme_of(e: &Elaborated, i: usize) -> TypeScheme {
    let d = &e.decls[i];
    let id = match &d.decl.kind {
        crate::frontend::ast::DecKind::Val { binds, .. } => binds[0].meta.id,
        crate::frontend::ast::DecKind::Fun { binds, .. } => binds[0].meta.id,
        _ => panic!("not a value declaration"),
    };
    d.ann.schemes[&id].clone()
}

/// Scheme printed with variables renamed 'a, 'b, ... in order.
fn canon(s: &TypeScheme) -> String {
    let mut text = s.body.to_string();
    for (i, v) in s.vars.iter().enumerate() {
        let name = format!("'{}", (b'a' + i as u8) as char);
        text = text.replace(&v.to_string(), &name);
    }
    format!("{}{text}", if s.vars.is_empty() { "" } else { "∀ " })
}

#[test]
fn empty_list_generalizes() {
    let e = elab("val L = []").unwrap();
    let s = scheme_of(&e, 0);
    assert_eq!(s.vars.len(), 1);
    assert_eq!(canon(&s), "∀ 'a list");
}

#[test]
fn value_restriction() {
    let e = elab("fun id x = x\nval y = id []").unwrap();
    assert!(!scheme_of(&e, 1).is_polymorphic());
}

#[test]
fn ellipsis_record_resolved() {
    let e = elab("fun getAge (r: {name: string, age: int}) = case r of {age = x, ...} => x").unwrap();
    assert_eq!(scheme_of(&e, 0).body.expand().to_string(), "{age: int, name: string} -> int");
    assert!(e.decls[0].ann.exhaustive.values().all(|&b| b));
}

#[test]
fn unresolved_ellipsis_is_an_error() {
    let err = elab("fun getAge r = case r of {age = x, ...} => x").unwrap_err();
    assert!(matches!(err, Error::Type { .. }), "{err:?}");
}

#[test]
fn non_exhaustive_binding_flagged() {
    let e = elab("val x::l = [1,2,3]").unwrap();
    let d = &e.decls[0];
    assert_eq!(d.ann.exhaustive.values().copied().collect::<Vec<_>>(), [false]);
    assert!(e.warnings.iter().any(|w| w.message == "binding not exhaustive"));
    assert_eq!(scheme_of(&e, 0).body.to_string(), "int list");
}

#[test]
fn contract_types() {
    let src = "(!! posAdd(x, y) ==> b;
    REQUIRES: x > 0 andalso y > 0;
    ENSURES: b > x andalso b > y;   !!)
fun posAdd(x, y) = x + y;";
    let e = elab(src).unwrap();
    let c = e.decls[0].ann.contracts.values().next().unwrap();
    let vars: Vec<String> = c.vars.iter().map(|(x, t)| format!("{x}:{t}")).collect();
    assert_eq!(vars, ["x:int", "y:int", "b:int"]);
    assert_eq!(scheme_of(&e, 0).body.to_string(), "int * int -> int");
}

#[test]
fn contract_disjointness() {
    let src = "(!! f x ==> x; REQUIRES: true; ENSURES: true; !!) fun f x = x + 1";
    assert!(matches!(elab(src).unwrap_err(), Error::Contract { .. }));
}

#[test]
fn contract_condition_must_be_bool() {
    let src = "(!! f x ==> b; REQUIRES: true; ENSURES: b + 1; !!) fun f x = x + 1";
    let err = elab(src).unwrap_err();
    assert!(matches!(&err, Error::Contract { message, .. } if message.contains("expected bool")));
}

#[test]
fn contract_arity() {
    let src = "(!! f x y ==> b; REQUIRES: true; ENSURES: true; !!) fun f x = x + 1";
    assert!(matches!(elab(src).unwrap_err(), Error::Contract { .. }));
}

#[test]
fn contract_cannot_see_function_locals() {
    let src = "(!! f x ==> b; REQUIRES: true; ENSURES: b = z; !!) fun f x = let val z = 1 in x + z end";
    assert!(matches!(elab(src).unwrap_err(), Error::Contract { .. }));
}

#[test]
fn overloads_default_to_int() {
    let e = elab("fun add (x, y) = x + y").unwrap();
    assert_eq!(scheme_of(&e, 0).body.to_string(), "int * int -> int");
    let e = elab("fun add (x, y) = x + y + 1.0").unwrap();
    assert_eq!(scheme_of(&e, 0).body.to_string(), "real * real -> real");
}

#[test]
fn real_equality_rejected() {
    assert!(elab("val b = 1.0 = 2.0").is_err());
    assert!(elab("val b = \"a\" = \"a\" andalso 5 = 3").is_ok());
}

#[test]
fn mutual_recursion_with_explicit_tyvars() {
    let src = "datatype 'a evenList = ENil
                     | ECons of 'a * 'a oddList
and 'a oddList = OCons of 'a * 'a evenList

fun lengthE (ENil: 'a evenList): int = 0
  | lengthE (ECons (_, l)) = lengthO l
and lengthO (OCons (_, l)) = lengthE l";
    let e = elab(src).unwrap();
    let d = &e.decls[1];
    let schemes: Vec<String> = d.ann.schemes.values().map(|s| s.body.to_string()).collect();
    assert_eq!(schemes, ["'a evenList -> int", "'a oddList -> int"]);
    assert!(d.ann.exhaustive.values().all(|&b| b));
}

#[test]
fn partial_function_flags() {
    let e = elab("fun hd (x::l) = x").unwrap();
    assert_eq!(canon(&scheme_of(&e, 0)), "∀ 'a list -> 'a");
    assert_eq!(e.decls[0].ann.exhaustive.values().copied().collect::<Vec<_>>(), [false]);
}

#[test]
fn modules() {
    let src = "signature PAIR =
sig
  type t1
  type t2
  type t = t1 * t2
  val default : unit -> t
end

structure IntString : PAIR =
struct
  type t1 = int
  type t2 = string
  type t = t1 * t2
  fun default () = (0, \"\")
end

functor Example (Pair : PAIR) =
struct
  val (a, b) = Pair.default ()
end

structure S = Example (IntString)
val n = S.a + 1";
    let e = elab(src).unwrap();
    assert_eq!(e.decls.len(), 5);
    let all = e.all_annotations();
    assert!(all.types.values().any(|t| t.to_string() == "Pair.t1"));
}

#[test]
fn signature_mismatch() {
    let src = "signature S = sig val x : int end
structure A : S = struct val x = \"no\" end";
    assert!(elab(src).is_err());
    let src = "signature S = sig val x : int end
structure A : S = struct val y = 1 end";
    assert!(elab(src).is_err());
}

#[test]
fn infix_function() {
    let e = elab("infix F\nfun op F (x, y) = x*x + y\nval f = op F\nval x = 5 F 2\nval y = op F (2, 3)").unwrap();
    assert_eq!(scheme_of(&e, 2).body.to_string(), "int * int -> int");
    assert_eq!(scheme_of(&e, 3).body.to_string(), "int");
}

#[test]
fn unbound_and_unsupported() {
    assert!(matches!(elab("val x = y").unwrap_err(), Error::Unbound { .. }));
    assert!(matches!(elab("val x = print \"hi\"").unwrap_err(), Error::Unsupported { .. }));
}

#[test]
fn constructor_variables_are_resolved() {
    let e = elab("datatype t = A | B\nfun f A = 1 | f B = 2").unwrap();
    assert!(e.decls[1].ann.exhaustive.values().all(|&b| b));
    let e = elab("datatype t = A | B\nfun f A = 1").unwrap();
    assert!(e.decls[1].ann.exhaustive.values().all(|&b| !b));
}

#[test]
fn redundant_rule_warns() {
    let e = elab("fun f x = case x of _ => 1 | 0 => 2").unwrap();
    assert!(e.warnings.iter().any(|w| w.message == "redundant match rule"));
}

#[test]
fn basis_values() {
    let e = elab("val a = List.hd [1,2]\nval b = map (fn x => x + 1) [1]\nval c = size \"ab\" ^ \"\"");
    assert!(e.is_err());
    let e = elab("val a = List.hd [1,2]\nval b = map (fn x => x + 1) [1]\nval c = Int.toString (size \"ab\") ^ \"\"")
        .unwrap();
    assert_eq!(scheme_of(&e, 1).body.to_string(), "int list");
}

#[test]
fn principal_type_instances_accepted() {
    // annotating with an instance of the inferred type is accepted
    let srcs = [
        "fun id x = x val i = (id : int -> int) 3",
        "fun pair x y = (x, y) val p = (pair : int -> bool -> int * bool) 1 true",
        "fun compose (f, g) x = f (g x) val c = (compose : (int -> int) * (bool -> int) -> bool -> int)",
    ];
    for s in srcs {
        elab(s).unwrap_or_else(|e| panic!("{s}: {e}"));
    }
}

#[test]
fn deterministic_numbering() {
    let src = "fun length [] = 0 | length (x :: l) = 1 + length l\nval L = []";
    let a = elab(src).unwrap();
    let b = elab(src).unwrap();
    assert_eq!(a.decls, b.decls);
}
