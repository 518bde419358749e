//! Annotated SML declarations to Gallina sentences.
//!
//! One [`Translator`] owns the record context, the module-lifting context,
//! the infix context and the fresh-name supply for a compilation unit.

mod expr;
mod module;
mod ty;

#[cfg(test)]
mod tests;

use crate::diag::{Error, Result, Span, Stage, Warning};
use crate::elab::{Annotations, Elaborated};
use crate::frontend::ast::*;
use crate::gallina::*;
use crate::patterns::{collect_vars, lower, synthesize_precondition, Atom, Ctor, PatTree, PatternMatrix};
use crate::types::{DataEnv, SemType};
use std::collections::BTreeSet;

pub use ty::RecordEntry;

/// Name of the inconsistent axiom used as the default branch of
/// non-exhaustive bindings.
pub const PATTERN_FAILURE: &str = "patternFailure";

#[derive(Clone, Debug, Default)]
pub struct Translation {
    pub sentences: Vec<Sentence>,
    pub warnings: Vec<Warning>,
}

/// Translate a whole elaborated compilation unit.
pub fn translate(elab: &Elaborated) -> Result<Translation> {
    let ann = elab.all_annotations();
    let mut t = Translator::new(&ann, &elab.data, elab.tyvar_counter);
    let mut out = Vec::new();
    for d in &elab.decls {
        t.top_level(&d.decl, &mut out)?;
    }
    Ok(Translation { sentences: out, warnings: t.warnings })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ScopeKind {
    Top,
    Structure,
    Signature,
    Functor,
}

/// A sentence-producing scope: the top level or a module (type) body.
#[derive(Debug)]
struct Scope {
    kind: ScopeKind,
    /// Type abbreviations declared here, printable by their bare name.
    abbrevs: BTreeSet<String>,
    /// Records created while translating the current declaration (R_l).
    records: Vec<Sentence>,
    /// Lifted inline modules and module types (Σ).
    lifted: Vec<Sentence>,
    /// Size of the global record table when the scope was entered.
    record_mark: usize,
}

pub(crate) struct Translator<'a> {
    ann: &'a Annotations,
    data: &'a DataEnv,
    names: FreshNamer,
    /// R_g: every record type declared so far that is still in scope.
    records: Vec<RecordEntry>,
    scopes: Vec<Scope>,
    /// Current module path, matching the elaborator's qualification.
    path: Vec<String>,
    /// Infix functions whose notation has been emitted.
    notations: BTreeSet<String>,
    failure_declared: bool,
    failure_used: bool,
    warnings: Vec<Warning>,
}

/// One function of an Equations group.
struct FunDef<'d> {
    name: &'d str,
    span: Span,
    /// Curried function type.
    ty: SemType,
    arity: usize,
    clauses: Vec<(Vec<&'d Pat>, &'d Exp)>,
    exhaustive: bool,
}

/// Identifiers that are keywords in Gallina but ordinary names in SML.
const COQ_KEYWORDS: &[&str] = &[
    "at",
    "by",
    "cofix",
    "exists",
    "exists2",
    "fix",
    "for",
    "forall",
    "fun",
    "IF",
    "is",
    "match",
    "Prop",
    "return",
    "Set",
    "SProp",
    "struct",
    "Type",
    "using",
    "where",
    "with",
    "Definition",
    "Theorem",
    "Axiom",
    "Module",
    "End",
    "Notation",
    "Record",
    "Inductive",
    "Equations",
];

impl<'a> Translator<'a> {
    fn new(ann: &'a Annotations, data: &'a DataEnv, tyvar_base: u32) -> Self {
        Translator {
            ann,
            data,
            names: FreshNamer::new(tyvar_base),
            records: Vec::new(),
            scopes: vec![Scope::new(ScopeKind::Top, 0)],
            path: Vec::new(),
            notations: BTreeSet::new(),
            failure_declared: false,
            failure_used: false,
            warnings: Vec::new(),
        }
    }

    fn warn(&mut self, span: Span, message: impl Into<String>) {
        self.warnings.push(Warning { span, stage: Stage::Translate, message: message.into() });
    }

    fn ty_of(&self, id: NodeId, span: Span) -> Result<SemType> {
        self.ann
            .types
            .get(&id)
            .cloned()
            .ok_or_else(|| Error::Internal { span, message: "missing type annotation".into() })
    }

    fn exhaustive(&self, id: NodeId) -> bool {
        self.ann.exhaustive.get(&id).copied().unwrap_or(true)
    }

    fn scope(&mut self) -> &mut Scope {
        self.scopes.last_mut().expect("top-level scope")
    }

    /// A value name usable in Gallina. Symbolic identifiers have no
    /// Gallina counterpart; keywords get a trailing underscore.
    fn ident(&self, name: &str, span: Span) -> Result<String> {
        let ok_start = name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_');
        if !ok_start || !name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'') {
            return Err(Error::unsupported(
                span,
                Stage::Translate,
                format!("symbolic identifier `{name}` has no Gallina counterpart"),
            ));
        }
        Ok(if COQ_KEYWORDS.contains(&name) { format!("{name}_") } else { name.to_string() })
    }

    fn long_ident(&self, id: &LongId, span: Span) -> Result<String> {
        let mut parts = id.qualifiers.clone();
        parts.push(self.ident(&id.name, span)?);
        Ok(parts.join("."))
    }

    fn failure(&mut self) -> Term {
        self.failure_used = true;
        Term::ident(PATTERN_FAILURE)
    }

    /// Translate one top-level declaration, appending its sentences.
    fn top_level(&mut self, d: &Dec, out: &mut Vec<Sentence>) -> Result<()> {
        let mut body = Vec::new();
        self.failure_used = false;
        self.dec_in_scope(d, &mut body)?;
        if self.failure_used && !self.failure_declared {
            self.failure_declared = true;
            out.push(Sentence::Axiom {
                name: PATTERN_FAILURE.into(),
                statement: Term::Forall(vec![Binder::bare("a", BinderKind::Implicit)], Box::new(Term::ident("a"))),
                local: true,
            });
        }
        out.extend(body);
        Ok(())
    }

    /// Translate `d` in the current scope, preceded by the records and
    /// modules its translation lifted.
    fn dec_in_scope(&mut self, d: &Dec, out: &mut Vec<Sentence>) -> Result<()> {
        let sentences = self.dec(d)?;
        let scope = self.scope();
        out.append(&mut scope.records);
        out.append(&mut scope.lifted);
        out.extend(sentences);
        Ok(())
    }

    fn dec(&mut self, d: &Dec) -> Result<Vec<Sentence>> {
        match &d.kind {
            DecKind::Val { rec: false, binds, .. } => {
                let mut out = Vec::new();
                for b in binds {
                    out.extend(self.val_bind(b)?);
                }
                Ok(out)
            }
            DecKind::Val { rec: true, binds, .. } => {
                let mut defs = Vec::new();
                for b in binds {
                    defs.push(self.val_rec_def(b)?);
                }
                Ok(vec![self.equations(&defs)?])
            }
            DecKind::Fun { binds, contract, .. } => {
                let defs: Vec<FunDef> = binds
                    .iter()
                    .map(|fb| {
                        Ok(FunDef {
                            name: &fb.name,
                            span: fb.meta.span,
                            ty: self.ty_of(fb.meta.id, fb.meta.span)?,
                            arity: fb.arity(),
                            clauses: fb.clauses.iter().map(|c| (c.pats.iter().collect(), &c.body)).collect(),
                            exhaustive: self.exhaustive(fb.meta.id),
                        })
                    })
                    .collect::<Result<_>>()?;
                let mut out = vec![self.equations(&defs)?];
                if let Some(c) = contract {
                    out.push(self.contract(c)?);
                }
                for fb in binds {
                    if let Some(fx) = fb.fixity {
                        out.extend(self.infix_sentences(&fb.name, fx, fb.meta.span)?);
                    }
                }
                Ok(out)
            }
            DecKind::Datatype(dbs) => Ok(vec![self.datatype(dbs)?]),
            DecKind::Type(tbs) => {
                let mut out = Vec::new();
                for tb in tbs {
                    out.push(self.type_abbrev(&tb.name, &tb.tyvars, &tb.ty, tb.meta.span)?);
                }
                Ok(out)
            }
            DecKind::Local(hidden, visible) => {
                let mut out = Vec::new();
                for x in hidden.iter().chain(visible) {
                    self.dec_in_scope(x, &mut out)?;
                }
                Ok(out)
            }
            DecKind::Infix { .. } | DecKind::Nonfix(_) => Ok(Vec::new()),
            DecKind::Structure(sbs) => {
                let mut out = Vec::new();
                for sb in sbs {
                    out.extend(self.structure(sb)?);
                }
                Ok(out)
            }
            DecKind::Signature(sbs) => {
                let mut out = Vec::new();
                for sb in sbs {
                    out.push(self.signature(&sb.name, &sb.sig)?);
                }
                Ok(out)
            }
            DecKind::Functor(fbs) => {
                let mut out = Vec::new();
                for fb in fbs {
                    out.push(self.functor(fb)?);
                }
                Ok(out)
            }
        }
    }

    /// Implicit `{v : Type}` binders for generalized type variables.
    fn tyvar_binders(&mut self, vars: &[SemType]) -> Vec<Binder> {
        vars.iter().map(|v| Binder::implicit(ty::tyvar_name(v), Term::ty())).collect()
    }

    fn val_bind(&mut self, b: &ValBind) -> Result<Vec<Sentence>> {
        let scheme = self.ann.schemes.get(&b.meta.id).cloned();
        let vars = scheme.as_ref().map(|s| s.vars.clone()).unwrap_or_default();
        let binders = self.tyvar_binders(&vars);
        if let PatKind::Var(x) = &strip_typed(&b.pat).kind {
            let name = self.ident(x, b.pat.meta.span)?;
            let mut body = self.exp(&b.exp)?;
            if let (false, Some(s)) = (vars.is_empty(), &scheme) {
                body = Term::Annot(Box::new(body), Box::new(self.sem_type(&s.body)));
            }
            return Ok(vec![Sentence::Definition { name, binders, ret: None, body }]);
        }
        let exhaustive = self.exhaustive(b.meta.id);
        let mut scrutinee = self.exp(&b.exp)?;
        if let (false, Some(s)) = (vars.is_empty(), &scheme) {
            scrutinee = Term::Annot(Box::new(scrutinee), Box::new(self.sem_type(&s.body)));
        }
        let pattern = self.pat(&b.pat)?;
        let mut out = Vec::new();
        for x in collect_vars(&b.pat) {
            let name = self.ident(&x, b.pat.meta.span)?;
            let mut branches = vec![Branch { pats: vec![pattern.clone()], body: Term::ident(name.clone()) }];
            if !exhaustive {
                branches.push(Branch { pats: vec![Pattern::Wild], body: self.failure() });
            }
            let body = Term::Match { scrutinees: vec![scrutinee.clone()], branches, exhaustive };
            out.push(Sentence::Definition { name, binders: binders.clone(), ret: None, body });
        }
        Ok(out)
    }

    /// `val rec f = fn ...` as a one-argument function.
    fn val_rec_def<'d>(&mut self, b: &'d ValBind) -> Result<FunDef<'d>> {
        let PatKind::Var(name) = &strip_typed(&b.pat).kind else {
            return Err(Error::unsupported(b.meta.span, Stage::Translate, "val rec must bind a variable"));
        };
        let mut e = &b.exp;
        while let ExpKind::Typed(inner, _) = &e.kind {
            e = inner;
        }
        let ExpKind::Fn(m) = &e.kind else {
            return Err(Error::unsupported(b.meta.span, Stage::Translate, "val rec must bind a fn expression"));
        };
        Ok(FunDef {
            name,
            span: b.meta.span,
            ty: self.ty_of(m.meta.id, m.meta.span)?,
            arity: 1,
            clauses: m.rules.iter().map(|r| (vec![&r.pat], &r.exp)).collect(),
            exhaustive: self.exhaustive(m.meta.id),
        })
    }

    /// An Equations sentence for a group of (mutually recursive) functions.
    fn equations(&mut self, defs: &[FunDef]) -> Result<Sentence> {
        let group: Vec<&str> = defs.iter().map(|d| d.name).collect();
        let mut funs = Vec::new();
        for d in defs {
            let name = self.ident(d.name, d.span)?;
            let (params, ret) = split_arrows(&d.ty, d.arity);
            let mut param_vars = Vec::new();
            for p in &params {
                for v in p.tyvars() {
                    if !param_vars.contains(&v) {
                        param_vars.push(v);
                    }
                }
            }
            let ret_only: Vec<SemType> = ret.tyvars().into_iter().filter(|v| !param_vars.contains(v)).collect();
            let mut binders = self.tyvar_binders(&ret_only);
            for (i, p) in params.iter().enumerate() {
                let t = self.sem_type(p);
                let x = format!("x{}", i + 1);
                binders.push(if p.has_tyvars() { Binder::generalized(x, t) } else { Binder::explicit(x, t) });
            }
            let ret_term = self.sem_type(&ret);
            let mut clauses = Vec::new();
            for (pats, body) in &d.clauses {
                let pats = pats.iter().map(|p| self.pat(p)).collect::<Result<Vec<_>>>()?;
                clauses.push(EqClause { pats, body: Some(self.exp(body)?) });
            }
            let precondition = if d.exhaustive { None } else { self.precondition(d)? };
            if precondition.is_some() {
                clauses.push(EqClause { pats: vec![Pattern::Wild; d.arity], body: None });
            }
            if !structurally_recursive(d, &group) {
                self.warn(
                    d.span,
                    format!(
                        "{} may not be structurally recursive; Coq may reject it without a termination argument",
                        d.name
                    ),
                );
            }
            funs.push(EqFun { name, binders, precondition, ret: ret_term, clauses });
        }
        Ok(Sentence::Equations(funs))
    }

    /// The minimized precondition of a non-exhaustive function.
    fn precondition(&mut self, d: &FunDef) -> Result<Option<Term>> {
        let rows: Vec<Vec<PatTree>> =
            d.clauses.iter().map(|(ps, _)| ps.iter().map(|p| lower(p, &self.ann.types)).collect()).collect();
        let (params, _) = split_arrows(&d.ty, d.arity);
        let matrix = PatternMatrix::new(rows, params);
        let Some(formula) = synthesize_precondition(&matrix, self.data) else {
            return Ok(None);
        };
        let head = formula.atom_count() > 1;
        let mut disjuncts = Vec::new();
        for atoms in &formula.disjuncts {
            let mut conj: Option<Term> = None;
            for atom in atoms.iter().rev() {
                let t = self.atom(atom, head);
                conj = Some(match conj {
                    None => t,
                    Some(rest) => attach(t, rest),
                });
            }
            disjuncts.extend(conj);
        }
        let mut iter = disjuncts.into_iter().rev();
        let last = iter.next();
        Ok(last.map(|l| iter.fold(l, |acc, t| Term::or(t, acc))))
    }

    fn atom(&mut self, a: &Atom, head: bool) -> Term {
        let eq = Term::eq(Term::ident(format!("x{}", a.arg + 1)), self.skeleton(&a.skeleton), head);
        if a.vars.is_empty() {
            eq
        } else {
            Term::Exists(a.vars.clone(), Box::new(eq))
        }
    }

    /// A generalized pattern as a term.
    fn skeleton(&mut self, p: &PatTree) -> Term {
        match p {
            PatTree::Wild => Term::Hole,
            PatTree::Var(x) => Term::ident(x.clone()),
            PatTree::Ctor(c, args) => {
                let mut args: Vec<Term> = args.iter().map(|a| self.skeleton(a)).collect();
                match c {
                    Ctor::Unit => Term::Unit,
                    Ctor::Tuple(_) => Term::Tuple(args),
                    Ctor::Record(labels) => {
                        let prefix = self.record_prefix_by_labels(labels);
                        Term::Record(labels.iter().map(|l| format!("{prefix}_{l}")).zip(args).collect())
                    }
                    Ctor::True => Term::ident("true"),
                    Ctor::False => Term::ident("false"),
                    Ctor::Nil => Term::List(Vec::new()),
                    Ctor::Cons => {
                        let t = args.pop().unwrap_or(Term::Hole);
                        let h = args.pop().unwrap_or(Term::Hole);
                        Term::infix("::", h, t)
                    }
                    Ctor::Some => Term::app(Term::ident("Some"), args),
                    Ctor::None => Term::ident("None"),
                    Ctor::Data { name, .. } => Term::app(Term::ident(name.clone()), args),
                    Ctor::Int(n) => Term::Int(*n),
                    Ctor::Str(s) => Term::Str(s.clone()),
                    Ctor::Char(c) => Term::Char(*c),
                }
            }
        }
    }

    fn contract(&mut self, c: &Contract) -> Result<Sentence> {
        let Some(ec) = self.ann.contracts.get(&c.meta.id) else {
            return Err(Error::Internal { span: c.meta.span, message: "contract was not elaborated".into() });
        };
        let vars = ec
            .vars
            .iter()
            .map(|(x, _)| Ok(Binder::bare(self.ident(x, c.meta.span)?, BinderKind::Explicit)))
            .collect::<Result<Vec<_>>>()?;
        let f = self.ident(&c.fname, c.meta.span)?;
        let inputs = c.inputs.iter().map(|p| Ok(pattern_term(&self.pat(p)?))).collect::<Result<Vec<_>>>()?;
        let output = pattern_term(&self.pat(&c.output)?);
        let call = Term::eq(Term::app(Term::ident(f.clone()), inputs), output, false);
        let truth = || Term::ident("true");
        let requires = Term::eq(self.exp(&c.requires)?, truth(), false);
        let ensures = Term::eq(self.exp(&c.ensures)?, truth(), false);
        let body = Term::arrow(Term::and(call, requires), ensures);
        let statement = if vars.is_empty() { body } else { Term::Forall(vars, Box::new(body)) };
        Ok(Sentence::Theorem { name: format!("{f}_THM"), statement, admitted: true })
    }

    /// `Definition opf := f.` and the notation for an infix function.
    fn infix_sentences(&mut self, name: &str, fx: Fixity, span: Span) -> Result<Vec<Sentence>> {
        let f = self.ident(name, span)?;
        self.notations.insert(name.to_string());
        let body = Term::app(Term::ident(f.clone()), vec![Term::Tuple(vec![Term::ident("x"), Term::ident("y")])]);
        Ok(vec![
            Sentence::Definition {
                name: format!("op{f}"),
                binders: Vec::new(),
                ret: None,
                body: Term::ident(f.clone()),
            },
            Sentence::Notation {
                pattern: format!("x '{f}' y"),
                body,
                assoc: match fx.assoc {
                    crate::frontend::ast::Assoc::Left => crate::gallina::Assoc::Left,
                    crate::frontend::ast::Assoc::Right => crate::gallina::Assoc::Right,
                },
                level: notation_level(fx.prec),
            },
        ])
    }

    fn datatype(&mut self, dbs: &[DatBind]) -> Result<Sentence> {
        let mut bodies = Vec::new();
        for db in dbs {
            let mut constructors = Vec::new();
            for cb in &db.cons {
                let arg = cb.arg.as_ref().map(|t| self.ty(t));
                constructors.push((self.ident(&cb.name, cb.meta.span)?, arg));
            }
            bodies.push(IndBody {
                name: self.ident(&db.name, db.meta.span)?,
                params: db.tyvars.iter().map(|a| format!("_{a}")).collect(),
                constructors,
            });
        }
        Ok(Sentence::Inductive(bodies))
    }

    fn type_abbrev(&mut self, name: &str, params: &[String], t: &Ty, span: Span) -> Result<Sentence> {
        let name = self.ident(name, span)?;
        let body = self.ty(t);
        self.scope().abbrevs.insert(name.clone());
        let binders = params.iter().map(|a| Binder::explicit(format!("_{a}"), Term::ty())).collect();
        Ok(Sentence::Definition { name, binders, ret: None, body })
    }
}

impl Scope {
    fn new(kind: ScopeKind, record_mark: usize) -> Self {
        Scope { kind, abbrevs: BTreeSet::new(), records: Vec::new(), lifted: Vec::new(), record_mark }
    }
}

/// Coq notation level for an SML infix precedence: 0 maps to 29 and
/// tighter SML binding maps to a lower (tighter) level.
pub fn notation_level(prec: u8) -> u8 {
    29 - prec.min(9)
}

fn strip_typed(p: &Pat) -> &Pat {
    match &p.kind {
        PatKind::Typed(q, _) => strip_typed(q),
        _ => p,
    }
}

/// Peel `n` curried argument types.
fn split_arrows(t: &SemType, n: usize) -> (Vec<SemType>, SemType) {
    let mut params = Vec::new();
    let mut cur = t.clone();
    for _ in 0..n {
        match cur.head().clone() {
            SemType::Arrow(a, b) => {
                params.push(*a);
                cur = *b;
            }
            other => {
                cur = other;
                break;
            }
        }
    }
    (params, cur)
}

/// Put `rest` inside the innermost existential of `t`, conjoined with its
/// equation, so later atoms stay in scope of earlier variables.
fn attach(t: Term, rest: Term) -> Term {
    match t {
        Term::Exists(vs, body) => Term::Exists(vs, Box::new(attach(*body, rest))),
        other => Term::and(other, rest),
    }
}

/// The term a (variable-binding) pattern denotes once its variables are
/// in scope.
pub(crate) fn pattern_term(p: &Pattern) -> Term {
    match p {
        Pattern::Wild => Term::Hole,
        Pattern::Var(x) => Term::ident(x.clone()),
        Pattern::Con(c, args) => Term::app(Term::ident(c.clone()), args.iter().map(pattern_term).collect()),
        Pattern::Int(n) => Term::Int(*n),
        Pattern::Str(s) => Term::Str(s.clone()),
        Pattern::Char(c) => Term::Char(*c),
        Pattern::Unit => Term::Unit,
        Pattern::Tuple(ps) => Term::Tuple(ps.iter().map(pattern_term).collect()),
        Pattern::List(ps) => Term::List(ps.iter().map(pattern_term).collect()),
        Pattern::Infix(op, a, b) => Term::infix(op.clone(), pattern_term(a), pattern_term(b)),
        Pattern::Record(fs) => Term::Record(fs.iter().map(|(f, p)| (f.clone(), pattern_term(p))).collect()),
        Pattern::As(_, x) => Term::ident(x.clone()),
    }
}

/// Heuristic: every recursive call within the group passes a variable
/// bound strictly inside a constructor pattern, either of a clause or of a
/// `case` in the clause body.
fn structurally_recursive(d: &FunDef, group: &[&str]) -> bool {
    d.clauses.iter().all(|(pats, body)| {
        let mut smaller = BTreeSet::new();
        pats.iter().for_each(|p| inner_vars(p, &mut smaller));
        case_vars(body, &mut smaller);
        let is_smaller =
            |e: &Exp| matches!(&e.kind, ExpKind::Var { name, .. } if name.is_simple() && smaller.contains(&name.name));
        let mut ok = true;
        calls(body, group, &mut |args| {
            ok &= args.iter().any(|a| match &a.kind {
                ExpKind::Tuple(es) => es.iter().any(is_smaller),
                _ => is_smaller(a),
            });
        });
        ok
    })
}

fn case_vars(e: &Exp, out: &mut BTreeSet<String>) {
    match &e.kind {
        ExpKind::Case(s, m) => {
            case_vars(s, out);
            for r in &m.rules {
                inner_vars(&r.pat, out);
                case_vars(&r.exp, out);
            }
        }
        ExpKind::Fn(m) => m.rules.iter().for_each(|r| case_vars(&r.exp, out)),
        ExpKind::App(a, b) | ExpKind::Andalso(a, b) | ExpKind::Orelse(a, b) => {
            case_vars(a, out);
            case_vars(b, out);
        }
        ExpKind::Infix { lhs, rhs, .. } => {
            case_vars(lhs, out);
            case_vars(rhs, out);
        }
        ExpKind::Tuple(es) | ExpKind::List(es) => es.iter().for_each(|x| case_vars(x, out)),
        ExpKind::Record(fs) => fs.iter().for_each(|(_, x)| case_vars(x, out)),
        ExpKind::If(a, b, c) => [a, b, c].into_iter().for_each(|x| case_vars(x, out)),
        ExpKind::Let(_, b) | ExpKind::Typed(b, _) => case_vars(b, out),
        _ => {}
    }
}

/// Variables bound below at least one constructor.
fn inner_vars(p: &Pat, out: &mut BTreeSet<String>) {
    fn go(p: &Pat, under: bool, out: &mut BTreeSet<String>) {
        match &p.kind {
            PatKind::Var(x) if under => {
                out.insert(x.clone());
            }
            PatKind::Tuple(ps) => ps.iter().for_each(|q| go(q, under, out)),
            PatKind::Record { fields, .. } => fields.iter().for_each(|(_, q)| go(q, under, out)),
            PatKind::List(ps) => ps.iter().for_each(|q| go(q, true, out)),
            PatKind::ConApp(_, q) => go(q, true, out),
            PatKind::Infix { lhs, rhs, .. } => {
                go(lhs, true, out);
                go(rhs, true, out);
            }
            PatKind::Typed(q, _) => go(q, under, out),
            PatKind::Layered { pat, .. } => go(pat, under, out),
            _ => {}
        }
    }
    go(p, false, out);
}

/// Report the argument lists of saturated-or-not calls to group members.
fn calls<'e>(e: &'e Exp, group: &[&str], f: &mut impl FnMut(Vec<&'e Exp>)) {
    match &e.kind {
        ExpKind::App(..) => {
            let mut args = Vec::new();
            let mut head = e;
            while let ExpKind::App(g, a) = &head.kind {
                args.push(&**a);
                head = g;
            }
            args.reverse();
            if let ExpKind::Var { name, .. } = &head.kind {
                if name.is_simple() && group.contains(&name.name.as_str()) {
                    f(args.clone());
                }
            } else {
                calls(head, group, f);
            }
            for a in args {
                calls(a, group, f);
            }
        }
        ExpKind::Infix { op, lhs, rhs } => {
            if op.is_simple() && group.contains(&op.name.as_str()) {
                let pair = vec![&**lhs, &**rhs];
                f(pair);
            }
            calls(lhs, group, f);
            calls(rhs, group, f);
        }
        ExpKind::Tuple(es) | ExpKind::List(es) => es.iter().for_each(|x| calls(x, group, f)),
        ExpKind::Record(fs) => fs.iter().for_each(|(_, x)| calls(x, group, f)),
        ExpKind::Fn(m) | ExpKind::Case(_, m) => {
            if let ExpKind::Case(s, _) = &e.kind {
                calls(s, group, f);
            }
            m.rules.iter().for_each(|r| calls(&r.exp, group, f));
        }
        ExpKind::If(a, b, c) => {
            calls(a, group, f);
            calls(b, group, f);
            calls(c, group, f);
        }
        ExpKind::Andalso(a, b) | ExpKind::Orelse(a, b) => {
            calls(a, group, f);
            calls(b, group, f);
        }
        ExpKind::Let(_, b) | ExpKind::Typed(b, _) => calls(b, group, f),
        _ => {}
    }
}
