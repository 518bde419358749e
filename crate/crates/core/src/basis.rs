//! The supported slice of the SML basis library: one table shared by the
//! elaborator (types), the evaluator (semantics are keyed by `sml`) and the
//! translator (Coq rendering and providing shim).

use crate::types::Overload;

/// How a basis value is rendered in Gallina.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoqForm {
    /// Infix notation when applied infix; `prefix` names the uncurried
    /// function used for `op x` and non-infix uses.
    Infix { notation: &'static str, prefix: &'static str },
    /// Infix in SML, printed as a curried prefix application in Coq;
    /// `pair` is the uncurried function used first-class.
    Binary { curried: &'static str, pair: &'static str },
    /// Ordinary function or value.
    Prefix(&'static str),
}

impl CoqForm {
    /// Name referenced when the value is used first-class.
    pub fn value_name(&self) -> &'static str {
        match self {
            CoqForm::Infix { prefix, .. } => prefix,
            CoqForm::Binary { pair, .. } => pair,
            CoqForm::Prefix(n) => n,
        }
    }
}

/// Constraint carried by the type variable `'n` (overloaded) or `'e`
/// (equality) in an entry's type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    Overloaded(Overload),
    Equality,
}

#[derive(Clone, Copy, Debug)]
pub struct BasisEntry {
    /// Possibly qualified SML name, e.g. `List.hd`.
    pub sml: &'static str,
    /// SML type; `'n` and `'e` carry `constraint`.
    pub ty: &'static str,
    pub constraint: Option<Constraint>,
    pub coq: CoqForm,
    pub shim: &'static str,
}

const NUM: Option<Constraint> = Some(Constraint::Overloaded(Overload::Num));
const ORD: Option<Constraint> = Some(Constraint::Overloaded(Overload::NumText));
const EQ: Option<Constraint> = Some(Constraint::Equality);

const fn infix(notation: &'static str, prefix: &'static str) -> CoqForm {
    CoqForm::Infix { notation, prefix }
}

const fn e(
    sml: &'static str,
    ty: &'static str,
    constraint: Option<Constraint>,
    coq: CoqForm,
    shim: &'static str,
) -> BasisEntry {
    BasisEntry { sml, ty, constraint, coq, shim }
}

use CoqForm::Prefix;

const fn binary(curried: &'static str, pair: &'static str) -> CoqForm {
    CoqForm::Binary { curried, pair }
}

pub const BASIS: &[BasisEntry] = &[
    // overloaded arithmetic and comparison
    e("+", "'n * 'n -> 'n", NUM, infix("+", "op_add"), "notationsSml"),
    e("-", "'n * 'n -> 'n", NUM, infix("-", "op_sub"), "notationsSml"),
    e("*", "'n * 'n -> 'n", NUM, infix("*", "op_mul"), "notationsSml"),
    e("~", "'n -> 'n", NUM, Prefix("neg"), "notationsSml"),
    e("abs", "'n -> 'n", NUM, Prefix("abs"), "notationsSml"),
    e("<", "'n * 'n -> bool", ORD, infix("<", "op_lt"), "notationsSml"),
    e(">", "'n * 'n -> bool", ORD, infix(">", "op_gt"), "notationsSml"),
    e("<=", "'n * 'n -> bool", ORD, infix("<=", "op_le"), "notationsSml"),
    e(">=", "'n * 'n -> bool", ORD, infix(">=", "op_ge"), "notationsSml"),
    e("=", "'e * 'e -> bool", EQ, infix("=", "op_eq"), "notationsSml"),
    e("<>", "'e * 'e -> bool", EQ, binary("neq", "op_neq"), "notationsSml"),
    e("o", "('b -> 'c) * ('a -> 'b) -> 'a -> 'c", None, binary("compose", "op_compose"), "notationsSml"),
    // int
    e("div", "int * int -> int", None, binary("Int.div", "Int.div_pair"), "intSml"),
    e("mod", "int * int -> int", None, binary("Int.modulo", "Int.modulo_pair"), "intSml"),
    e("Int.div", "int * int -> int", None, Prefix("Int.div_pair"), "intSml"),
    e("Int.mod", "int * int -> int", None, Prefix("Int.modulo_pair"), "intSml"),
    e("Int.toString", "int -> string", None, Prefix("Int.toString"), "intSml"),
    e("Int.min", "int * int -> int", None, Prefix("Int.min"), "intSml"),
    e("Int.max", "int * int -> int", None, Prefix("Int.max"), "intSml"),
    e("Int.abs", "int -> int", None, Prefix("Int.abs"), "intSml"),
    // real
    e("/", "real * real -> real", None, infix("/", "op_rdiv"), "realSml"),
    e("real", "int -> real", None, Prefix("Real.fromInt"), "realSml"),
    e("Real.fromInt", "int -> real", None, Prefix("Real.fromInt"), "realSml"),
    e("floor", "real -> int", None, Prefix("Real.floor"), "realSml"),
    e("ceil", "real -> int", None, Prefix("Real.ceil"), "realSml"),
    e("round", "real -> int", None, Prefix("Real.round"), "realSml"),
    e("trunc", "real -> int", None, Prefix("Real.trunc"), "realSml"),
    e("Real.floor", "real -> int", None, Prefix("Real.floor"), "realSml"),
    e("Real.ceil", "real -> int", None, Prefix("Real.ceil"), "realSml"),
    e("Real.round", "real -> int", None, Prefix("Real.round"), "realSml"),
    e("Real.trunc", "real -> int", None, Prefix("Real.trunc"), "realSml"),
    // bool
    e("not", "bool -> bool", None, Prefix("Bool.not"), "boolSml"),
    e("Bool.not", "bool -> bool", None, Prefix("Bool.not"), "boolSml"),
    e("Bool.toString", "bool -> string", None, Prefix("Bool.toString"), "boolSml"),
    // list
    e("@", "'a list * 'a list -> 'a list", None, infix("++", "op_append"), "listSml"),
    e("hd", "'a list -> 'a", None, Prefix("List.hd"), "listSml"),
    e("tl", "'a list -> 'a list", None, Prefix("List.tl"), "listSml"),
    e("length", "'a list -> int", None, Prefix("List.length"), "listSml"),
    e("null", "'a list -> bool", None, Prefix("List.null"), "listSml"),
    e("rev", "'a list -> 'a list", None, Prefix("List.rev"), "listSml"),
    e("map", "('a -> 'b) -> 'a list -> 'b list", None, Prefix("List.map"), "listSml"),
    e("foldl", "('a * 'b -> 'b) -> 'b -> 'a list -> 'b", None, Prefix("List.foldl"), "listSml"),
    e("foldr", "('a * 'b -> 'b) -> 'b -> 'a list -> 'b", None, Prefix("List.foldr"), "listSml"),
    e("List.hd", "'a list -> 'a", None, Prefix("List.hd"), "listSml"),
    e("List.tl", "'a list -> 'a list", None, Prefix("List.tl"), "listSml"),
    e("List.length", "'a list -> int", None, Prefix("List.length"), "listSml"),
    e("List.null", "'a list -> bool", None, Prefix("List.null"), "listSml"),
    e("List.rev", "'a list -> 'a list", None, Prefix("List.rev"), "listSml"),
    e("List.last", "'a list -> 'a", None, Prefix("List.last"), "listSml"),
    e("List.nth", "'a list * int -> 'a", None, Prefix("List.nth"), "listSml"),
    e("List.take", "'a list * int -> 'a list", None, Prefix("List.take"), "listSml"),
    e("List.drop", "'a list * int -> 'a list", None, Prefix("List.drop"), "listSml"),
    e("List.concat", "'a list list -> 'a list", None, Prefix("List.concat"), "listSml"),
    e("List.map", "('a -> 'b) -> 'a list -> 'b list", None, Prefix("List.map"), "listSml"),
    e("List.filter", "('a -> bool) -> 'a list -> 'a list", None, Prefix("List.filter"), "listSml"),
    e("List.exists", "('a -> bool) -> 'a list -> bool", None, Prefix("List.exists_"), "listSml"),
    e("List.all", "('a -> bool) -> 'a list -> bool", None, Prefix("List.all"), "listSml"),
    e("List.foldl", "('a * 'b -> 'b) -> 'b -> 'a list -> 'b", None, Prefix("List.foldl"), "listSml"),
    e("List.foldr", "('a * 'b -> 'b) -> 'b -> 'a list -> 'b", None, Prefix("List.foldr"), "listSml"),
    // option
    e("valOf", "'a option -> 'a", None, Prefix("Option.valOf"), "optionSml"),
    e("isSome", "'a option -> bool", None, Prefix("Option.isSome"), "optionSml"),
    e("getOpt", "'a option * 'a -> 'a", None, Prefix("Option.getOpt"), "optionSml"),
    e("Option.valOf", "'a option -> 'a", None, Prefix("Option.valOf"), "optionSml"),
    e("Option.isSome", "'a option -> bool", None, Prefix("Option.isSome"), "optionSml"),
    e("Option.getOpt", "'a option * 'a -> 'a", None, Prefix("Option.getOpt"), "optionSml"),
    e("Option.map", "('a -> 'b) -> 'a option -> 'b option", None, Prefix("Option.map"), "optionSml"),
    // string
    e("^", "string * string -> string", None, infix("^", "op_caret"), "stringSml"),
    e("size", "string -> int", None, Prefix("String.size"), "stringSml"),
    e("explode", "string -> char list", None, Prefix("String.explode"), "stringSml"),
    e("implode", "char list -> string", None, Prefix("String.implode"), "stringSml"),
    e("str", "char -> string", None, Prefix("String.str"), "stringSml"),
    e("concat", "string list -> string", None, Prefix("String.concat"), "stringSml"),
    e("String.size", "string -> int", None, Prefix("String.size"), "stringSml"),
    e("String.sub", "string * int -> char", None, Prefix("String.sub"), "stringSml"),
    e("String.explode", "string -> char list", None, Prefix("String.explode"), "stringSml"),
    e("String.implode", "char list -> string", None, Prefix("String.implode"), "stringSml"),
    e("String.str", "char -> string", None, Prefix("String.str"), "stringSml"),
    e("String.concat", "string list -> string", None, Prefix("String.concat"), "stringSml"),
    e("String.substring", "string * int * int -> string", None, Prefix("String.substring"), "stringSml"),
    e("String.isPrefix", "string -> string -> bool", None, Prefix("String.isPrefix"), "stringSml"),
    // char
    e("ord", "char -> int", None, Prefix("Char.ord"), "charSml"),
    e("chr", "int -> char", None, Prefix("Char.chr"), "charSml"),
    e("Char.ord", "char -> int", None, Prefix("Char.ord"), "charSml"),
    e("Char.chr", "int -> char", None, Prefix("Char.chr"), "charSml"),
    e("Char.isDigit", "char -> bool", None, Prefix("Char.isDigit"), "charSml"),
    e("Char.isAlpha", "char -> bool", None, Prefix("Char.isAlpha"), "charSml"),
    e("Char.isSpace", "char -> bool", None, Prefix("Char.isSpace"), "charSml"),
    e("Char.toUpper", "char -> char", None, Prefix("Char.toUpper"), "charSml"),
    e("Char.toLower", "char -> char", None, Prefix("Char.toLower"), "charSml"),
    // list pairs
    e("ListPair.zip", "'a list * 'b list -> ('a * 'b) list", None, Prefix("ListPair.zip"), "listPairSml"),
    e("ListPair.unzip", "('a * 'b) list -> 'a list * 'b list", None, Prefix("ListPair.unzip"), "listPairSml"),
];

/// Builtin constructors: SML name, Coq name (prefix use), providing shim.
pub const BUILTIN_CONSTRUCTORS: &[(&str, &str, &str)] = &[
    ("true", "true", "boolSml"),
    ("false", "false", "boolSml"),
    ("nil", "[]", "listSml"),
    ("::", "op_cons", "listSml"),
    ("SOME", "Some", "optionSml"),
    ("NONE", "None", "optionSml"),
];

/// Names rejected because they only make sense with side effects.
pub const IMPURE: &[&str] = &["ref", "!", ":=", "print", "before", "ignore", "exit", "use"];

pub fn lookup(sml: &str) -> Option<&'static BasisEntry> {
    BASIS.iter().find(|b| b.sml == sml)
}

/// Structures the basis provides (`List`, `Option`, ...).
pub fn structures() -> Vec<&'static str> {
    let mut out: Vec<&'static str> = Vec::new();
    for b in BASIS {
        if let Some((s, _)) = b.sml.split_once('.') {
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{lexer::tokenize, parser::parse_type};

    #[test]
    fn every_type_parses() {
        for b in BASIS {
            let toks = tokenize(b.ty).unwrap();
            parse_type(&toks).unwrap_or_else(|e| panic!("{}: {e}", b.sml));
        }
    }

    #[test]
    fn names_are_unique() {
        for (i, a) in BASIS.iter().enumerate() {
            assert!(BASIS[i + 1..].iter().all(|b| b.sml != a.sml), "{}", a.sml);
        }
    }

    #[test]
    fn basis_structures() {
        let s = structures();
        assert!(s.contains(&"List") && s.contains(&"ListPair") && s.contains(&"Option"));
    }
}
