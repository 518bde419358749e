//! Target syntax: Gallina sentences and terms, extended with the literal,
//! tuple, list, infix and Prop forms the translation needs.

use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinderKind {
    /// `(x: T)`
    Explicit,
    /// `{x : T}`
    Implicit,
    /// `` `(x: T) ``, generalizing the free variables of `T`
    Generalized,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Binder {
    pub name: String,
    pub kind: BinderKind,
    /// `None` only in `forall`/`exists` binder lists.
    pub ty: Option<Term>,
}

impl Binder {
    pub fn explicit(name: impl Into<String>, ty: Term) -> Self {
        Binder { name: name.into(), kind: BinderKind::Explicit, ty: Some(ty) }
    }

    pub fn implicit(name: impl Into<String>, ty: Term) -> Self {
        Binder { name: name.into(), kind: BinderKind::Implicit, ty: Some(ty) }
    }

    pub fn generalized(name: impl Into<String>, ty: Term) -> Self {
        Binder { name: name.into(), kind: BinderKind::Generalized, ty: Some(ty) }
    }

    /// Untyped binder as in `forall x y,` or `forall {a},`.
    pub fn bare(name: impl Into<String>, kind: BinderKind) -> Self {
        Binder { name: name.into(), kind, ty: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub pats: Vec<Pattern>,
    pub body: Term,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    /// Possibly qualified identifier.
    Ident(String),
    Sort(String),
    Int(i64),
    /// Decimal text, `-` for negatives.
    Real(String),
    Str(String),
    Char(char),
    Unit,
    Tuple(Vec<Term>),
    List(Vec<Term>),
    App(Box<Term>, Vec<Term>),
    /// `@f a b`
    ExplicitApp(String, Vec<Term>),
    Arrow(Box<Term>, Box<Term>),
    Product(Vec<Term>),
    Fun(Pattern, Box<Term>),
    Let(Pattern, Box<Term>, Box<Term>),
    Match {
        scrutinees: Vec<Term>,
        branches: Vec<Branch>,
        exhaustive: bool,
    },
    If(Box<Term>, Box<Term>, Box<Term>),
    /// `{| f := t |}` with fields in canonical (sorted label) order.
    Record(Vec<(String, Term)>),
    Annot(Box<Term>, Box<Term>),
    Forall(Vec<Binder>, Box<Term>),
    Exists(Vec<String>, Box<Term>),
    And(Box<Term>, Box<Term>),
    Or(Box<Term>, Box<Term>),
    /// Prop equality; `head` selects the `eq (a) (b)` form.
    Eq {
        lhs: Box<Term>,
        rhs: Box<Term>,
        head: bool,
    },
    BoolAnd(Box<Term>, Box<Term>),
    BoolOr(Box<Term>, Box<Term>),
    Infix(String, Box<Term>, Box<Term>),
    /// `t%key`
    Scope(Box<Term>, String),
    /// `_`: an argument for Coq to infer or an obligation left open.
    Hole,
}

impl Term {
    pub fn ident(s: impl Into<String>) -> Term {
        Term::Ident(s.into())
    }

    pub fn app(f: Term, args: Vec<Term>) -> Term {
        if args.is_empty() {
            f
        } else {
            Term::App(Box::new(f), args)
        }
    }

    pub fn infix(op: impl Into<String>, l: Term, r: Term) -> Term {
        Term::Infix(op.into(), Box::new(l), Box::new(r))
    }

    pub fn arrow(a: Term, b: Term) -> Term {
        Term::Arrow(Box::new(a), Box::new(b))
    }

    /// A product type with its `%type` scope.
    pub fn product(ts: Vec<Term>) -> Term {
        Term::Scope(Box::new(Term::Product(ts)), "type".into())
    }

    pub fn eq(lhs: Term, rhs: Term, head: bool) -> Term {
        Term::Eq { lhs: Box::new(lhs), rhs: Box::new(rhs), head }
    }

    pub fn and(a: Term, b: Term) -> Term {
        Term::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Term, b: Term) -> Term {
        Term::Or(Box::new(a), Box::new(b))
    }

    pub fn ty() -> Term {
        Term::Sort("Type".into())
    }

    /// Visit every sub-term, pre-order.
    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Tuple(ts) | Term::List(ts) | Term::Product(ts) => ts.iter().for_each(|t| t.visit(f)),
            Term::ExplicitApp(_, ts) => ts.iter().for_each(|t| t.visit(f)),
            Term::App(h, ts) => {
                h.visit(f);
                ts.iter().for_each(|t| t.visit(f));
            }
            Term::Arrow(a, b)
            | Term::And(a, b)
            | Term::Or(a, b)
            | Term::BoolAnd(a, b)
            | Term::BoolOr(a, b)
            | Term::Infix(_, a, b)
            | Term::Annot(a, b)
            | Term::Eq { lhs: a, rhs: b, .. } => {
                a.visit(f);
                b.visit(f);
            }
            Term::Let(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Term::Fun(_, b) | Term::Exists(_, b) | Term::Scope(b, _) => b.visit(f),
            Term::Forall(bs, b) => {
                for x in bs {
                    if let Some(t) = &x.ty {
                        t.visit(f);
                    }
                }
                b.visit(f);
            }
            Term::Match { scrutinees, branches, .. } => {
                scrutinees.iter().for_each(|t| t.visit(f));
                branches.iter().for_each(|b| b.body.visit(f));
            }
            Term::If(a, b, c) => {
                a.visit(f);
                b.visit(f);
                c.visit(f);
            }
            Term::Record(fs) => fs.iter().for_each(|(_, t)| t.visit(f)),
            _ => {}
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Pattern {
    Wild,
    Var(String),
    /// Constructor, possibly applied.
    Con(String, Vec<Pattern>),
    Int(i64),
    Str(String),
    Char(char),
    Unit,
    Tuple(Vec<Pattern>),
    List(Vec<Pattern>),
    Infix(String, Box<Pattern>, Box<Pattern>),
    /// Sorted by label; every declared field present.
    Record(Vec<(String, Pattern)>),
    /// `p as x`
    As(Box<Pattern>, String),
}

impl Pattern {
    pub fn visit(&self, f: &mut impl FnMut(&Pattern)) {
        f(self);
        match self {
            Pattern::Con(_, ps) | Pattern::Tuple(ps) | Pattern::List(ps) => ps.iter().for_each(|p| p.visit(f)),
            Pattern::Infix(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Pattern::Record(fs) => fs.iter().for_each(|(_, p)| p.visit(f)),
            Pattern::As(p, _) => p.visit(f),
            _ => {}
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit(&mut |p| match p {
            Pattern::Var(x) | Pattern::As(_, x) => out.push(x.clone()),
            _ => {}
        });
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EqClause {
    pub pats: Vec<Pattern>,
    /// `None` leaves an obligation: `:= _`.
    pub body: Option<Term>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EqFun {
    pub name: String,
    pub binders: Vec<Binder>,
    /// Type of the implicit `H` binder.
    pub precondition: Option<Term>,
    pub ret: Term,
    pub clauses: Vec<EqClause>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndBody {
    pub name: String,
    /// Implicit type parameters.
    pub params: Vec<String>,
    /// Constructor name and argument type.
    pub constructors: Vec<(String, Option<Term>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Assoc {
    Left,
    Right,
    None,
}

/// Right-hand side of `Module M := ...`: `!F A` or a plain path.
#[derive(Clone, Debug, PartialEq)]
pub struct ModExpr {
    pub head: String,
    pub args: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModBody {
    Sentences(Vec<Sentence>),
    Alias(ModExpr),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sentence {
    RequireImport(String),
    Definition {
        name: String,
        binders: Vec<Binder>,
        ret: Option<Term>,
        body: Term,
    },
    /// The first function and its `with` companions.
    Equations(Vec<EqFun>),
    Inductive(Vec<IndBody>),
    Record {
        name: String,
        params: Vec<String>,
        fields: Vec<(String, Term)>,
    },
    Theorem {
        name: String,
        statement: Term,
        admitted: bool,
    },
    Axiom {
        name: String,
        statement: Term,
        local: bool,
    },
    Notation {
        pattern: String,
        body: Term,
        assoc: Assoc,
        level: u8,
    },
    Module {
        name: String,
        params: Vec<(String, String)>,
        ascription: Option<String>,
        body: ModBody,
    },
    ModuleType {
        name: String,
        body: Vec<Sentence>,
    },
    Parameter {
        name: String,
        ty: Term,
    },
    DeclareModule {
        name: String,
        sig: String,
    },
    Include(String),
    Comment(String),
}

impl Sentence {
    pub fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        let binders = |bs: &[Binder], f: &mut dyn FnMut(&Term)| {
            for b in bs {
                if let Some(t) = &b.ty {
                    t.visit(&mut |x| f(x));
                }
            }
        };
        match self {
            Sentence::Definition { binders: bs, ret, body, .. } => {
                binders(bs, f);
                if let Some(r) = ret {
                    r.visit(f);
                }
                body.visit(f);
            }
            Sentence::Equations(fs) => {
                for g in fs {
                    binders(&g.binders, f);
                    if let Some(p) = &g.precondition {
                        p.visit(f);
                    }
                    g.ret.visit(f);
                    for c in &g.clauses {
                        if let Some(b) = &c.body {
                            b.visit(f);
                        }
                    }
                }
            }
            Sentence::Inductive(bs) => {
                for b in bs {
                    for (_, t) in &b.constructors {
                        if let Some(t) = t {
                            t.visit(f);
                        }
                    }
                }
            }
            Sentence::Record { fields, .. } => fields.iter().for_each(|(_, t)| t.visit(f)),
            Sentence::Theorem { statement, .. } | Sentence::Axiom { statement, .. } => statement.visit(f),
            Sentence::Notation { body, .. } => body.visit(f),
            Sentence::Parameter { ty, .. } => ty.visit(f),
            Sentence::Module { body: ModBody::Sentences(ss), .. } | Sentence::ModuleType { body: ss, .. } => {
                ss.iter().for_each(|s| s.visit_terms(f))
            }
            _ => {}
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum NameKind {
    RecordType,
    TyVar,
    ModuleLift,
    Existential,
}

/// Issues fresh names, deterministically in request order.
#[derive(Clone, Debug)]
pub struct FreshNamer {
    counters: BTreeMap<NameKind, u32>,
}

impl FreshNamer {
    /// `tyvar_base` is the number of type variables the elaborator issued.
    pub fn new(tyvar_base: u32) -> Self {
        let mut counters = BTreeMap::new();
        counters.insert(NameKind::TyVar, tyvar_base);
        FreshNamer { counters }
    }

    pub fn fresh(&mut self, kind: NameKind) -> String {
        let n = self.counters.entry(kind).or_insert(0);
        *n += 1;
        match kind {
            NameKind::RecordType => format!("rid_{n}"),
            NameKind::ModuleLift => format!("mid_{n}"),
            NameKind::TyVar => format!("_'{n}"),
            NameKind::Existential => format!("y{n}"),
        }
    }

    /// Restart a counter (existentials restart for every atom).
    pub fn reset(&mut self, kind: NameKind) {
        self.counters.insert(kind, 0);
    }
}

/// Structural checks run on every sentence before emission.
pub fn well_formed(s: &Sentence, records: &BTreeMap<String, Vec<String>>) -> Vec<String> {
    let mut out = Vec::new();
    check_sentence(s, records, &mut out);
    out
}

/// Sorted prefixed field names of every `Record` declaration in `ss`,
/// keyed by record name.
pub fn record_fields(ss: &[Sentence]) -> BTreeMap<String, Vec<String>> {
    let mut out = BTreeMap::new();
    for s in ss {
        match s {
            Sentence::Record { name, fields, .. } => {
                let mut fs: Vec<String> = fields.iter().map(|(f, _)| f.clone()).collect();
                fs.sort();
                out.insert(name.clone(), fs);
            }
            Sentence::Module { body: ModBody::Sentences(inner), .. } | Sentence::ModuleType { body: inner, .. } => {
                out.extend(record_fields(inner));
            }
            _ => {}
        }
    }
    out
}

fn check_sentence(s: &Sentence, records: &BTreeMap<String, Vec<String>>, out: &mut Vec<String>) {
    let distinct = |names: Vec<&str>, what: &str, out: &mut Vec<String>| {
        let mut seen = BTreeSet::new();
        for n in names {
            if !seen.insert(n) {
                out.push(format!("duplicate binder {n} in {what}"));
            }
        }
    };
    match s {
        Sentence::Definition { name, binders, .. } => {
            distinct(binders.iter().map(|b| b.name.as_str()).collect(), name, out);
        }
        Sentence::Equations(fs) => {
            for f in fs {
                let mut names: Vec<&str> = f.binders.iter().map(|b| b.name.as_str()).collect();
                if f.precondition.is_some() {
                    names.push("H");
                }
                distinct(names, &f.name, out);
                if f.clauses.is_empty() {
                    out.push(format!("Equations {} has no clauses", f.name));
                }
                let arity = f.binders.iter().filter(|b| b.kind != BinderKind::Implicit).count();
                for c in &f.clauses {
                    if c.pats.len() != arity {
                        out.push(format!("clause of {} has {} patterns, expected {arity}", f.name, c.pats.len()));
                    }
                    for p in &c.pats {
                        check_pattern(p, records, out);
                    }
                }
            }
        }
        Sentence::Notation { pattern, body, .. } => {
            let mut mentions = false;
            body.visit(&mut |t| {
                if let Term::Ident(x) = t {
                    mentions |= pattern.contains(&format!("'{x}'"));
                }
            });
            if !mentions {
                out.push(format!("notation {pattern} does not reference its function"));
            }
        }
        Sentence::Module { body: ModBody::Sentences(ss), .. } | Sentence::ModuleType { body: ss, .. } => {
            for x in ss {
                check_sentence(x, records, out);
            }
        }
        _ => {}
    }
    s.visit_terms(&mut |t| check_term(t, records, out));
}

fn check_term(t: &Term, records: &BTreeMap<String, Vec<String>>, out: &mut Vec<String>) {
    match t {
        Term::Match { branches, exhaustive, scrutinees } => {
            for b in branches {
                if b.pats.len() != scrutinees.len() {
                    out.push("match branch arity differs from scrutinee count".into());
                }
                for p in &b.pats {
                    check_pattern(p, records, out);
                }
            }
            let last_wild = branches.last().is_some_and(|b| b.pats.iter().all(|p| *p == Pattern::Wild));
            if !exhaustive && !last_wild {
                out.push("non-exhaustive match without a wildcard branch".into());
            }
        }
        Term::Record(fs) => check_fields(fs.iter().map(|(f, _)| f.as_str()).collect(), records, "literal", out),
        Term::Fun(p, _) | Term::Let(p, _, _) => check_pattern(p, records, out),
        _ => {}
    }
}

fn check_pattern(p: &Pattern, records: &BTreeMap<String, Vec<String>>, out: &mut Vec<String>) {
    p.visit(&mut |q| {
        if let Pattern::Record(fs) = q {
            check_fields(fs.iter().map(|(f, _)| f.as_str()).collect(), records, "pattern", out);
        }
    });
}

fn check_fields(labels: Vec<&str>, records: &BTreeMap<String, Vec<String>>, what: &str, out: &mut Vec<String>) {
    let Some(first) = labels.first() else { return };
    let Some(declared) = records.values().find(|fs| fs.iter().any(|f| f == first)) else {
        out.push(format!("record {what} uses undeclared field {first}"));
        return;
    };
    let mut sorted = labels.clone();
    sorted.sort();
    if sorted != *declared {
        out.push(format!("incomplete record {what}"));
    }
}
