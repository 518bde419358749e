//! Concrete Coq syntax for the Gallina tree.
//!
//! Applications, infix terms and boolean connectives are always printed
//! inside parentheses, so only types and Prop connectives need precedence.

use crate::gallina::*;
use std::collections::BTreeMap;

pub const SHIM_MODULES: [&str; 9] =
    ["intSml", "listSml", "realSml", "stringSml", "charSml", "boolSml", "optionSml", "listPairSml", "notationsSml"];

#[derive(Clone, Debug)]
pub struct EmitConfig {
    pub header: bool,
    pub indent: usize,
    /// Soft limit: long definitions break after `:=`.
    pub line_width: usize,
    /// Rename `rid_N`, `mid_N` and `_'N` by order of first appearance.
    pub normalize_names: bool,
}

impl Default for EmitConfig {
    fn default() -> Self {
        EmitConfig { header: true, indent: 2, line_width: 100, normalize_names: false }
    }
}

pub fn header() -> String {
    let mut s = String::new();
    for m in SHIM_MODULES {
        s.push_str(&format!("Require Import {m}.\n"));
    }
    s.push_str("\nFrom Equations Require Import Equations.\nGeneralizable All Variables.\n");
    s
}

pub fn emit(sentences: &[Sentence], cfg: &EmitConfig) -> String {
    let mut out = String::new();
    if cfg.header {
        out.push_str(&header());
    }
    for s in sentences {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&sentence(s, 0, cfg));
    }
    if cfg.normalize_names {
        out = normalize_names(&out);
    }
    if !out.is_empty() && !out.ends_with('\n') {
        out.push('\n');
    }
    out
}

/// One sentence (with its trailing newline) at indentation `depth`.
pub fn sentence(s: &Sentence, depth: usize, cfg: &EmitConfig) -> String {
    let pad = " ".repeat(depth * cfg.indent);
    let step = " ".repeat(cfg.indent);
    let body = match s {
        Sentence::RequireImport(m) => format!("Require Import {m}."),
        Sentence::Definition { name, binders: bs, ret, body } => {
            let head = format!("Definition {name}{}{}", binders(bs), ret_type(ret.as_ref()));
            let b = term(body, TOP);
            if pad.len() + head.len() + b.len() + 5 > cfg.line_width {
                format!("{head} :=\n{pad}{step}{step}{b}.")
            } else {
                format!("{head} := {b}.")
            }
        }
        Sentence::Equations(fs) => {
            let mut parts = Vec::new();
            for (i, f) in fs.iter().enumerate() {
                let kw = if i == 0 { "Equations" } else { "with" };
                let pre = f.precondition.as_ref().map(|p| format!(" {{H: {}}}", term(p, TOP))).unwrap_or_default();
                let mut s = format!("{kw} {}{}{pre}: {} :=", f.name, binders(&f.binders), term(&f.ret, TOP));
                let clauses: Vec<String> = f
                    .clauses
                    .iter()
                    .map(|c| {
                        let pats: String = c.pats.iter().map(|p| format!(" {}", pattern(p))).collect();
                        let body = c.body.as_ref().map_or("_".to_string(), |b| term(b, TOP));
                        format!("{pad}{step}{}{pats} := {body}", f.name)
                    })
                    .collect();
                s.push('\n');
                s.push_str(&clauses.join(";\n"));
                parts.push(s);
            }
            format!("{}.", parts.join(&format!("\n{pad}")))
        }
        Sentence::Inductive(bodies) => {
            let mut parts = Vec::new();
            for (i, b) in bodies.iter().enumerate() {
                let kw = if i == 0 { "Inductive" } else { "with" };
                let params: String = b.params.iter().map(|p| format!(" {{{p} : Type}}")).collect();
                let mut s = format!("{kw} {}{params} : Type :=", b.name);
                for (c, arg) in &b.constructors {
                    match arg {
                        None => s.push_str(&format!("\n{pad}{step}| {c}")),
                        Some(t) => s.push_str(&format!("\n{pad}{step}| {c} : {} -> {}", term(t, ARROW_LEFT), b.name)),
                    }
                }
                parts.push(s);
            }
            format!("{}.", parts.join(&format!("\n{pad}")))
        }
        Sentence::Record { name, params, fields } => {
            let params: String = params.iter().map(|p| format!(" {{{p} : Type}}")).collect();
            let fs: Vec<String> = fields.iter().map(|(f, t)| format!("{f} : {}", term(t, TOP))).collect();
            format!("Record {name}{params} := {{ {} }}.", fs.join("; "))
        }
        Sentence::Theorem { name, statement, admitted } => {
            let mut s = format!("Theorem {name}: {}.", term(statement, TOP));
            if *admitted {
                s.push_str(&format!("\n{pad}Admitted."));
            }
            s
        }
        Sentence::Axiom { name, statement, local } => {
            format!("{}Axiom {name}: {}.", if *local { "Local " } else { "" }, term(statement, TOP))
        }
        Sentence::Notation { pattern, body, assoc, level } => {
            let assoc = match assoc {
                Assoc::Left => "left",
                Assoc::Right => "right",
                Assoc::None => "no",
            };
            format!("Notation \"{pattern}\" := {} ({assoc} associativity, at level {level}).", term(body, ATOM))
        }
        Sentence::Module { name, params, ascription, body } => {
            let params: String = params.iter().map(|(p, s)| format!(" ({p} : {s})")).collect();
            let asc = ascription.as_ref().map(|a| format!(" <: {a}")).unwrap_or_default();
            match body {
                ModBody::Alias(m) => format!("Module {name}{params}{asc} := {}.", mod_expr(m)),
                ModBody::Sentences(ss) => {
                    let inner: String = ss.iter().map(|x| sentence(x, depth + 1, cfg)).collect();
                    format!("Module {name}{params}{asc}.\n{inner}{pad}End {name}.")
                }
            }
        }
        Sentence::ModuleType { name, body } => {
            let inner: String = body.iter().map(|x| sentence(x, depth + 1, cfg)).collect();
            format!("Module Type {name}.\n{inner}{pad}End {name}.")
        }
        Sentence::Parameter { name, ty } => format!("Parameter {name} : {}.", term(ty, TOP)),
        Sentence::DeclareModule { name, sig } => format!("Declare Module {name} : {sig}."),
        Sentence::Include(m) => format!("Include {m}."),
        Sentence::Comment(c) => format!("(* {} *)", c.replace("*)", "* )")),
    };
    format!("{pad}{body}\n")
}

fn mod_expr(m: &ModExpr) -> String {
    if m.args.is_empty() {
        m.head.clone()
    } else {
        format!("!{} {}", m.head, m.args.join(" "))
    }
}

fn ret_type(t: Option<&Term>) -> String {
    t.map(|t| format!(": {}", term(t, TOP))).unwrap_or_default()
}

fn binders(bs: &[Binder]) -> String {
    bs.iter().map(|b| format!(" {}", binder(b))).collect()
}

pub fn binder(b: &Binder) -> String {
    match (&b.kind, &b.ty) {
        (BinderKind::Explicit, Some(t)) => format!("({}: {})", b.name, term(t, TOP)),
        (BinderKind::Implicit, Some(t)) => format!("{{{} : {}}}", b.name, term(t, TOP)),
        (BinderKind::Generalized, Some(t)) => format!("`({}: {})", b.name, term(t, TOP)),
        (BinderKind::Implicit, None) => format!("{{{}}}", b.name),
        (_, None) => b.name.clone(),
    }
}

// precedence contexts
const ATOM: u8 = 0;
const APP: u8 = 10;
const ARROW_LEFT: u8 = 98;
const TOP: u8 = 200;

fn level(t: &Term) -> u8 {
    match t {
        Term::Int(i) if *i < 0 => 0,
        Term::ExplicitApp(_, args) if !args.is_empty() => 10,
        Term::Match { .. } => 1,
        Term::Eq { head: true, .. } => 10,
        Term::Eq { .. } => 70,
        Term::And(..) => 80,
        Term::Or(..) => 85,
        Term::Arrow(..) => 99,
        Term::Forall(..) | Term::Exists(..) => 200,
        _ => 0,
    }
}

/// Print `t` in a position accepting terms up to precedence `ctx`.
pub fn term(t: &Term, ctx: u8) -> String {
    let s = raw(t);
    if level(t) > ctx {
        format!("({s})")
    } else {
        s
    }
}

fn join(ts: &[Term], ctx: u8, sep: &str) -> String {
    ts.iter().map(|t| term(t, ctx)).collect::<Vec<_>>().join(sep)
}

fn raw(t: &Term) -> String {
    match t {
        Term::Ident(x) | Term::Sort(x) => x.clone(),
        Term::Int(i) if *i < 0 => format!("({i})"),
        Term::Int(i) => i.to_string(),
        Term::Real(r) if r.starts_with('-') => format!("({r})%float"),
        Term::Real(r) => format!("{r}%float"),
        Term::Str(s) => string_lit(s),
        Term::Char(c) => format!("{}%char", string_lit(&c.to_string())),
        Term::Unit => "tt".into(),
        Term::Hole => "_".into(),
        Term::Tuple(ts) => format!("({})", join(ts, TOP, ", ")),
        Term::List(ts) if ts.is_empty() => "[]".into(),
        Term::List(ts) => format!("[{}]", join(ts, TOP, "; ")),
        Term::App(f, args) => format!("({})", bare_app(f, args)),
        Term::ExplicitApp(f, args) if args.is_empty() => format!("@{f}"),
        Term::ExplicitApp(f, args) => format!("@{f} {}", join(args, ATOM, " ")),
        Term::Arrow(a, b) => format!("{} -> {}", term(a, ARROW_LEFT), term(b, 99)),
        Term::Product(ts) => format!("({})", join(ts, APP, " * ")),
        Term::Fun(p, b) => format!("(fun {} => {})", binder_pattern(p), term(b, TOP)),
        Term::Let(p, e, b) => format!("(let {} := {} in {})", binder_pattern(p), term(e, TOP), term(b, TOP)),
        Term::Match { scrutinees, branches, .. } => {
            let bs: Vec<String> = branches
                .iter()
                .map(|b| {
                    format!("{} => {}", b.pats.iter().map(pattern).collect::<Vec<_>>().join(", "), term(&b.body, TOP))
                })
                .collect();
            format!("match {} with {} end", join(scrutinees, TOP, ", "), bs.join(" | "))
        }
        Term::If(c, a, b) => format!("(if {} then {} else {})", term(c, TOP), term(a, TOP), term(b, TOP)),
        Term::Record(fs) => {
            let fs: Vec<String> = fs.iter().map(|(f, t)| format!("{f} := {}", term(t, TOP))).collect();
            format!("{{| {} |}}", fs.join("; "))
        }
        Term::Annot(e, ty) => format!("({} : {})", term(e, TOP), term(ty, TOP)),
        Term::Forall(bs, body) => {
            let bs: Vec<String> = bs.iter().map(binder).collect();
            format!("forall {}, {}", bs.join(" "), term(body, TOP))
        }
        Term::Exists(vs, body) => format!("exists {}, {}", vs.join(" "), term(body, TOP)),
        Term::And(a, b) => format!("{} /\\ {}", term(a, 79), term(b, 80)),
        Term::Or(a, b) => {
            let right = match &**b {
                Term::Or(..) => term(b, 85),
                _ => format!("({})", term(b, TOP)),
            };
            format!("({}) \\/ {right}", term(a, TOP))
        }
        Term::Eq { lhs, rhs, head: false } => format!("{} = {}", eq_side(lhs), eq_side(rhs)),
        Term::Eq { lhs, rhs, head: true } => format!("eq {} {}", paren_atom(lhs), paren_atom(rhs)),
        Term::BoolAnd(a, b) => format!("({} && {})", term(a, ATOM), term(b, ATOM)),
        Term::BoolOr(a, b) => format!("({} || {})", term(a, ATOM), term(b, ATOM)),
        Term::Infix(op, a, b) => format!("({} {op} {})", term(a, ATOM), term(b, ATOM)),
        Term::Scope(t, k) => format!("{}%{k}", term(t, ATOM)),
    }
}

fn bare_app(f: &Term, args: &[Term]) -> String {
    format!("{} {}", term(f, ATOM), join(args, ATOM, " "))
}

/// Sides of `=` print applications and cons cells without parentheses.
fn eq_side(t: &Term) -> String {
    match t {
        Term::App(f, args) => bare_app(f, args),
        Term::Infix(op, a, b) if op == "::" => format!("{} :: {}", term(a, ATOM), term(b, ATOM)),
        _ => term(t, 69),
    }
}

/// `(x1)` for identifiers; compound terms already carry parentheses.
fn paren_atom(t: &Term) -> String {
    match t {
        Term::App(..) | Term::Infix(..) | Term::Tuple(_) => term(t, ATOM),
        _ => format!("({})", term(t, TOP)),
    }
}

fn binder_pattern(p: &Pattern) -> String {
    match p {
        Pattern::Var(_) | Pattern::Wild => pattern(p),
        _ => format!("'{}", pattern(p)),
    }
}

pub fn string_lit(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

pub fn pattern(p: &Pattern) -> String {
    match p {
        Pattern::Wild => "_".into(),
        Pattern::Var(x) => x.clone(),
        Pattern::Con(c, args) if args.is_empty() => c.clone(),
        Pattern::Con(c, args) => format!("({c} {})", args.iter().map(pattern).collect::<Vec<_>>().join(" ")),
        Pattern::Int(i) if *i < 0 => format!("({i})"),
        Pattern::Int(i) => i.to_string(),
        Pattern::Str(s) => string_lit(s),
        Pattern::Char(c) => format!("{}%char", string_lit(&c.to_string())),
        Pattern::Unit => "tt".into(),
        Pattern::Tuple(ps) => format!("({})", ps.iter().map(pattern).collect::<Vec<_>>().join(", ")),
        Pattern::List(ps) if ps.is_empty() => "[]".into(),
        Pattern::List(ps) => format!("[{}]", ps.iter().map(pattern).collect::<Vec<_>>().join("; ")),
        Pattern::Infix(op, a, b) => format!("({} {op} {})", pattern(a), pattern(b)),
        Pattern::Record(fs) => {
            let fs: Vec<String> = fs.iter().map(|(f, p)| format!("{f} := {}", pattern(p))).collect();
            format!("{{| {} |}}", fs.join("; "))
        }
        Pattern::As(p, x) => format!("({} as {x})", pattern(p)),
    }
}

/// Rename generated names (`rid_N`, `mid_N`, `_'N`) to `rid_1`, `rid_2`,
/// ... by order of first appearance, per kind. Text inside string
/// literals is left alone.
pub fn normalize_names(text: &str) -> String {
    let mut maps: BTreeMap<&'static str, BTreeMap<String, usize>> = BTreeMap::new();
    let mut out = String::with_capacity(text.len());
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let is_ident = |c: char| c.is_alphanumeric() || c == '_' || c == '\'';
    while i < chars.len() {
        let c = chars[i];
        if c == '"' {
            let start = i;
            i += 1;
            while i < chars.len() {
                if chars[i] == '"' {
                    if chars.get(i + 1) == Some(&'"') {
                        i += 2;
                        continue;
                    }
                    break;
                }
                i += 1;
            }
            i = (i + 1).min(chars.len());
            out.extend(&chars[start..i]);
            continue;
        }
        if is_ident(c) && (i == 0 || !is_ident(chars[i - 1])) {
            let start = i;
            while i < chars.len() && is_ident(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            out.push_str(&rename(&word, &mut maps));
            continue;
        }
        out.push(c);
        i += 1;
    }
    out
}

fn rename(word: &str, maps: &mut BTreeMap<&'static str, BTreeMap<String, usize>>) -> String {
    for prefix in ["rid_", "mid_", "_'"] {
        let Some(rest) = word.strip_prefix(prefix) else { continue };
        let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
        if digits.is_empty() {
            continue;
        }
        let tail = &rest[digits.len()..];
        if !(tail.is_empty() || (prefix != "_'" && tail.starts_with('_'))) {
            continue;
        }
        let map = maps.entry(prefix).or_default();
        let next = map.len() + 1;
        let n = *map.entry(digits).or_insert(next);
        return format!("{prefix}{n}{tail}");
    }
    word.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_shape() {
        let h = header();
        assert_eq!(h.lines().next(), Some("Require Import intSml."));
        assert_eq!(h.lines().last(), Some("Generalizable All Variables."));
        let cfg = EmitConfig { header: false, ..EmitConfig::default() };
        assert_eq!(emit(&[], &cfg), "");
    }

    #[test]
    fn axiom_line() {
        let s = Sentence::Axiom {
            name: "EmptyException".into(),
            statement: Term::Forall(vec![Binder::bare("a", BinderKind::Implicit)], Box::new(Term::ident("a"))),
            local: false,
        };
        assert_eq!(sentence(&s, 0, &EmitConfig::default()), "Axiom EmptyException: forall {a}, a.\n");
    }

    #[test]
    fn normalization() {
        let t = "Record rid_7 := { rid_7_a : Z }. Definition L {_'40 : Type} := ([] : @list _'40). \"rid_9\" rid_3";
        assert_eq!(
            normalize_names(t),
            "Record rid_1 := { rid_1_a : Z }. Definition L {_'1 : Type} := ([] : @list _'1). \"rid_9\" rid_2"
        );
    }

    #[test]
    fn prop_layout() {
        let app = Term::app(Term::ident("posAdd"), vec![Term::Tuple(vec![Term::ident("x"), Term::ident("y")])]);
        let stmt = Term::Forall(
            vec![Binder::bare("x", BinderKind::Explicit), Binder::bare("b", BinderKind::Explicit)],
            Box::new(Term::arrow(
                Term::and(
                    Term::eq(app, Term::ident("b"), false),
                    Term::eq(Term::ident("true"), Term::ident("true"), false),
                ),
                Term::eq(Term::infix(">", Term::ident("b"), Term::ident("x")), Term::ident("true"), false),
            )),
        );
        assert_eq!(term(&stmt, TOP), "forall x b, posAdd (x, y) = b /\\ true = true -> (b > x) = true");
    }
}
