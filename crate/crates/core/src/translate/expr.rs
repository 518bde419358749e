//! Expressions and patterns.

use super::{strip_typed, Translator};
use crate::basis::{lookup, CoqForm};
use crate::diag::{Error, Result, Span, Stage};
use crate::elab::env::ConRef;
use crate::elab::ValueRef;
use crate::frontend::ast::*;
use crate::gallina::{Branch, Pattern, Term};
use crate::types::SemType;

/// Parameter name of a `fn` that needs a `match`.
const FN_ARG: &str = "fn_arg";

impl Translator<'_> {
    fn value_ref(&self, id: NodeId) -> ValueRef {
        self.ann.refs.get(&id).cloned().unwrap_or(ValueRef::Local)
    }

    fn data_con(&self, name: &LongId, span: Span) -> Result<String> {
        self.long_ident(name, span)
    }

    /// A value identifier used as an ordinary (prefix) value.
    fn value(&mut self, id: NodeId, name: &LongId, op: bool, span: Span) -> Result<Term> {
        match self.value_ref(id) {
            ValueRef::Basis(sml) => {
                let entry = lookup(sml)
                    .ok_or_else(|| Error::Internal { span, message: format!("unknown basis value {sml}") })?;
                Ok(Term::ident(entry.coq.value_name()))
            }
            ValueRef::Con(ConRef::Builtin(c)) => Ok(match c {
                "nil" => Term::List(Vec::new()),
                "::" => Term::ident("op_cons"),
                "SOME" => Term::ident("Some"),
                "NONE" => Term::ident("None"),
                other => Term::ident(other),
            }),
            ValueRef::Con(ConRef::Data { .. }) => Ok(Term::ident(self.data_con(name, span)?)),
            ValueRef::Local => {
                if op && name.is_simple() && self.notations.contains(&name.name) {
                    return Ok(Term::ident(format!("op{}", self.ident(&name.name, span)?)));
                }
                Ok(Term::ident(self.long_ident(name, span)?))
            }
        }
    }

    pub(super) fn exp(&mut self, e: &Exp) -> Result<Term> {
        let span = e.meta.span;
        Ok(match &e.kind {
            ExpKind::Var { name, op } | ExpKind::Con { name, op } => self.value(e.meta.id, name, *op, span)?,
            ExpKind::SCon(c) => scon(c),
            ExpKind::Unit => Term::Unit,
            ExpKind::Tuple(es) => Term::Tuple(self.exps(es)?),
            ExpKind::List(es) => Term::List(self.exps(es)?),
            ExpKind::Record(fs) => {
                let ty = self.ty_of(e.meta.id, span)?;
                let Some((prefix, labels)) = self.record_of(&ty) else {
                    return Err(Error::Internal { span, message: "record expression without record type".into() });
                };
                let mut out = Vec::new();
                for l in labels {
                    let x = fs.iter().find(|(k, _)| *k == l).map(|(_, x)| x);
                    let Some(x) = x else {
                        return Err(Error::Internal { span, message: format!("record expression lacks {l}") });
                    };
                    out.push((format!("{prefix}_{l}"), self.exp(x)?));
                }
                Term::Record(out)
            }
            ExpKind::Selector(l) => {
                let ty = self.ty_of(e.meta.id, span)?;
                let SemType::Arrow(dom, _) = ty.expand() else {
                    return Err(Error::Internal { span, message: "selector without function type".into() });
                };
                match self.record_of(&dom) {
                    Some((prefix, _)) => Term::ident(format!("{prefix}_{l}")),
                    None => return Err(Error::Internal { span, message: "selector on a non-record".into() }),
                }
            }
            ExpKind::App(..) => {
                let mut args = Vec::new();
                let mut head = e;
                while let ExpKind::App(f, a) = &head.kind {
                    args.push(&**a);
                    head = f;
                }
                args.reverse();
                if let (ExpKind::Con { .. }, [arg]) = (&head.kind, args.as_slice()) {
                    if self.value_ref(head.meta.id) == ValueRef::Con(ConRef::Builtin("::")) {
                        if let ExpKind::Tuple(pair) = &arg.kind {
                            if let [h, t] = pair.as_slice() {
                                return Ok(Term::infix("::", self.exp(h)?, self.exp(t)?));
                            }
                        }
                    }
                }
                let f = self.exp(head)?;
                let args = args.into_iter().map(|a| self.exp(a)).collect::<Result<Vec<_>>>()?;
                match f {
                    Term::App(g, mut inner) => {
                        inner.extend(args);
                        Term::App(g, inner)
                    }
                    f => Term::app(f, args),
                }
            }
            ExpKind::Infix { op, lhs, rhs } => {
                let l = self.exp(lhs)?;
                let r = self.exp(rhs)?;
                self.infix(e.meta.id, op, l, r, span)?
            }
            ExpKind::Fn(m) => self.lambda(m)?,
            ExpKind::Case(scrut, m) => {
                let s = self.exp(scrut)?;
                let branches = self.branches(m)?;
                Term::Match { scrutinees: vec![s], branches, exhaustive: self.exhaustive(m.meta.id) }
            }
            ExpKind::If(c, a, b) => Term::If(Box::new(self.exp(c)?), Box::new(self.exp(a)?), Box::new(self.exp(b)?)),
            ExpKind::Andalso(a, b) => Term::BoolAnd(Box::new(self.exp(a)?), Box::new(self.exp(b)?)),
            ExpKind::Orelse(a, b) => Term::BoolOr(Box::new(self.exp(a)?), Box::new(self.exp(b)?)),
            ExpKind::Let(decs, body) => self.let_block(decs, body)?,
            ExpKind::Typed(x, _) => self.exp(x)?,
        })
    }

    fn exps(&mut self, es: &[Exp]) -> Result<Vec<Term>> {
        es.iter().map(|x| self.exp(x)).collect()
    }

    fn infix(&mut self, id: NodeId, op: &LongId, l: Term, r: Term, span: Span) -> Result<Term> {
        let pair = |l, r| Term::Tuple(vec![l, r]);
        Ok(match self.value_ref(id) {
            ValueRef::Basis(sml) => {
                let entry = lookup(sml)
                    .ok_or_else(|| Error::Internal { span, message: format!("unknown basis value {sml}") })?;
                match entry.coq {
                    CoqForm::Infix { notation, .. } => Term::infix(notation, l, r),
                    CoqForm::Binary { curried, .. } => Term::app(Term::ident(curried), vec![l, r]),
                    CoqForm::Prefix(f) => Term::app(Term::ident(f), vec![pair(l, r)]),
                }
            }
            ValueRef::Con(ConRef::Builtin("::")) => Term::infix("::", l, r),
            ValueRef::Con(_) => Term::app(Term::ident(self.data_con(op, span)?), vec![pair(l, r)]),
            ValueRef::Local => {
                if op.is_simple() && self.notations.contains(&op.name) {
                    Term::infix(self.ident(&op.name, span)?, l, r)
                } else {
                    Term::app(Term::ident(self.long_ident(op, span)?), vec![pair(l, r)])
                }
            }
        })
    }

    fn branches(&mut self, m: &Match) -> Result<Vec<Branch>> {
        let mut out = Vec::new();
        for r in &m.rules {
            out.push(Branch { pats: vec![self.pat(&r.pat)?], body: self.exp(&r.exp)? });
        }
        if !self.exhaustive(m.meta.id) {
            out.push(Branch { pats: vec![Pattern::Wild], body: self.failure() });
        }
        Ok(out)
    }

    fn lambda(&mut self, m: &Match) -> Result<Term> {
        if let [rule] = m.rules.as_slice() {
            if self.exhaustive(m.meta.id) {
                let p = self.pat(&rule.pat)?;
                if matches!(p, Pattern::Var(_) | Pattern::Wild | Pattern::Tuple(_) | Pattern::Unit | Pattern::Record(_))
                {
                    return Ok(Term::Fun(p, Box::new(self.exp(&rule.exp)?)));
                }
            }
        }
        let branches = self.branches(m)?;
        let body =
            Term::Match { scrutinees: vec![Term::ident(FN_ARG)], branches, exhaustive: self.exhaustive(m.meta.id) };
        Ok(Term::Fun(Pattern::Var(FN_ARG.into()), Box::new(body)))
    }

    /// `let` blocks: value declarations become nested `let`s.
    fn let_block(&mut self, decs: &[Dec], body: &Exp) -> Result<Term> {
        let Some((first, rest)) = decs.split_first() else {
            return self.exp(body);
        };
        let binds = match &first.kind {
            DecKind::Val { rec: false, binds, .. } => binds,
            DecKind::Infix { .. } | DecKind::Nonfix(_) => return self.let_block(rest, body),
            DecKind::Fun { .. } | DecKind::Val { rec: true, .. } => {
                return Err(Error::unsupported(
                    first.meta.span,
                    Stage::Translate,
                    "function declarations inside let blocks are not supported",
                ))
            }
            _ => {
                return Err(Error::unsupported(
                    first.meta.span,
                    Stage::Translate,
                    format!("{} declarations inside let blocks are not supported", first.describe()),
                ))
            }
        };
        let mut lets = Vec::new();
        for b in binds {
            let e = self.exp(&b.exp)?;
            if let PatKind::Var(x) = &strip_typed(&b.pat).kind {
                lets.push((Pattern::Var(self.ident(x, b.pat.meta.span)?), e));
                continue;
            }
            let p = self.pat(&b.pat)?;
            if self.exhaustive(b.meta.id) {
                lets.push((p, e));
                continue;
            }
            for x in crate::patterns::collect_vars(&b.pat) {
                let x = self.ident(&x, b.pat.meta.span)?;
                let branches = vec![
                    Branch { pats: vec![p.clone()], body: Term::ident(x.clone()) },
                    Branch { pats: vec![Pattern::Wild], body: self.failure() },
                ];
                let m = Term::Match { scrutinees: vec![e.clone()], branches, exhaustive: false };
                lets.push((Pattern::Var(x), m));
            }
        }
        let mut out = self.let_block(rest, body)?;
        for (p, e) in lets.into_iter().rev() {
            out = Term::Let(p, Box::new(e), Box::new(out));
        }
        Ok(out)
    }

    /// Translate a pattern; type annotations are dropped.
    pub(super) fn pat(&mut self, p: &Pat) -> Result<Pattern> {
        let span = p.meta.span;
        Ok(match &p.kind {
            PatKind::Wild => Pattern::Wild,
            PatKind::Var(x) => Pattern::Var(self.ident(x, span)?),
            PatKind::Con(c) => match self.value_ref(p.meta.id) {
                ValueRef::Con(ConRef::Builtin("nil")) => Pattern::List(Vec::new()),
                ValueRef::Con(ConRef::Builtin("NONE")) => Pattern::Con("None".into(), Vec::new()),
                ValueRef::Con(ConRef::Builtin(b)) => Pattern::Con(b.into(), Vec::new()),
                _ => Pattern::Con(self.data_con(c, span)?, Vec::new()),
            },
            PatKind::SCon(SCon::Int(n)) => Pattern::Int(*n),
            PatKind::SCon(SCon::Str(s)) => Pattern::Str(s.clone()),
            PatKind::SCon(SCon::Char(c)) => Pattern::Char(*c),
            PatKind::SCon(SCon::Real(_)) => {
                return Err(Error::unsupported(span, Stage::Translate, "real constants in patterns"))
            }
            PatKind::Unit => Pattern::Unit,
            PatKind::Tuple(ps) => Pattern::Tuple(self.pats(ps)?),
            PatKind::List(ps) => Pattern::List(self.pats(ps)?),
            PatKind::Record { fields, .. } => {
                let ty = self.ty_of(p.meta.id, span)?;
                let Some((prefix, labels)) = self.record_of(&ty) else {
                    return Err(Error::Internal { span, message: "record pattern without record type".into() });
                };
                let mut out = Vec::new();
                for l in labels {
                    let q = match fields.iter().find(|(k, _)| *k == l) {
                        Some((_, q)) => self.pat(q)?,
                        None => Pattern::Wild,
                    };
                    out.push((format!("{prefix}_{l}"), q));
                }
                Pattern::Record(out)
            }
            PatKind::ConApp(c, arg) => {
                let a = self.pat(arg)?;
                match self.value_ref(p.meta.id) {
                    ValueRef::Con(ConRef::Builtin("::")) => match a {
                        Pattern::Tuple(mut ht) if ht.len() == 2 => {
                            let t = ht.pop().expect("pair");
                            let h = ht.pop().expect("pair");
                            Pattern::Infix("::".into(), Box::new(h), Box::new(t))
                        }
                        other => Pattern::Con("op_cons".into(), vec![other]),
                    },
                    ValueRef::Con(ConRef::Builtin("SOME")) => Pattern::Con("Some".into(), vec![a]),
                    _ => Pattern::Con(self.data_con(c, span)?, vec![a]),
                }
            }
            PatKind::Infix { op, lhs, rhs } => {
                let l = self.pat(lhs)?;
                let r = self.pat(rhs)?;
                match self.value_ref(p.meta.id) {
                    ValueRef::Con(ConRef::Builtin("::")) => Pattern::Infix("::".into(), Box::new(l), Box::new(r)),
                    _ => Pattern::Con(self.ident(op, span)?, vec![Pattern::Tuple(vec![l, r])]),
                }
            }
            PatKind::Typed(q, _) => self.pat(q)?,
            PatKind::Layered { name, pat, .. } => Pattern::As(Box::new(self.pat(pat)?), self.ident(name, span)?),
        })
    }

    fn pats(&mut self, ps: &[Pat]) -> Result<Vec<Pattern>> {
        ps.iter().map(|q| self.pat(q)).collect()
    }
}

fn scon(c: &SCon) -> Term {
    match c {
        SCon::Int(n) => Term::Int(*n),
        SCon::Real(r) => Term::Real(r.replace('~', "-")),
        SCon::Str(s) => Term::Str(s.clone()),
        SCon::Char(c) => Term::Char(*c),
    }
}
