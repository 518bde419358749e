//! Types, patterns and expressions.

use super::env::{Env, TyCon, ValInfo, ValKind};
use super::{unsupported, Elab, ValueRef};
use crate::basis::IMPURE;
use crate::diag::{Error, Result, Span};
use crate::frontend::ast::*;
use crate::types::{SemType, TypeScheme};
use std::collections::BTreeMap;

impl Elab {
    pub(crate) fn ty(&mut self, env: &Env, t: &Ty) -> Result<SemType> {
        let st = match &t.kind {
            TyKind::Var(a) => {
                if !self.tyvars.contains(a) {
                    return Err(Error::Unbound { span: t.meta.span, kind: "type variable", name: format!("'{a}") });
                }
                SemType::Named(a.clone())
            }
            TyKind::Con(args, id) => {
                let args = args.iter().map(|a| self.ty(env, a)).collect::<Result<Vec<_>>>()?;
                let Some(tc) = env.tycon(id) else {
                    return Err(Error::Unbound { span: t.meta.span, kind: "type constructor", name: id.to_string() });
                };
                if tc.arity() != args.len() {
                    return Err(Error::ty(
                        t.meta.span,
                        format!("type constructor {id} expects {} argument(s), got {}", tc.arity(), args.len()),
                    ));
                }
                match tc {
                    TyCon::Prim { ty, .. } => ty(args),
                    TyCon::Abbrev { params, body } => {
                        let map: BTreeMap<String, SemType> = params.iter().cloned().zip(args.iter().cloned()).collect();
                        SemType::Abbrev { name: id.to_string(), args, expansion: Box::new(body.subst_named(&map)) }
                    }
                    TyCon::Data { stamp, name, .. } => SemType::Data { stamp: *stamp, name: name.clone(), args },
                }
            }
            TyKind::Tuple(ts) => SemType::Tuple(ts.iter().map(|a| self.ty(env, a)).collect::<Result<_>>()?),
            TyKind::Arrow(a, b) => SemType::arrow(self.ty(env, a)?, self.ty(env, b)?),
            TyKind::Record(fs) => {
                let mut map = BTreeMap::new();
                for (l, ft) in fs {
                    if map.insert(l.clone(), self.ty(env, ft)?).is_some() {
                        return Err(Error::ty(t.meta.span, format!("duplicate label {l}")));
                    }
                }
                SemType::Record(map)
            }
        };
        self.record(t.meta.id, &st);
        Ok(st)
    }

    fn con_info(&mut self, env: &Env, id: &LongId, span: Span) -> Result<(ValInfo, ValueRef)> {
        match env.value(id) {
            Some(info @ ValInfo { kind: ValKind::Con { con, .. }, .. }) => {
                let r = ValueRef::Con(con.clone());
                Ok((info.clone(), r))
            }
            Some(_) => Err(Error::ty(span, format!("{id} is not a constructor"))),
            None => Err(Error::Unbound { span, kind: "constructor", name: id.to_string() }),
        }
    }

    fn has_arg(info: &ValInfo) -> bool {
        matches!(info.kind, ValKind::Con { has_arg: true, .. })
    }

    /// Elaborate a pattern, collecting its variables into `binds`.
    pub(crate) fn pat(&mut self, env: &Env, p: &mut Pat, binds: &mut Vec<(String, SemType)>) -> Result<SemType> {
        let span = p.meta.span;
        if let PatKind::Var(x) = &p.kind {
            if env.values.get(x).is_some_and(ValInfo::is_con) {
                p.kind = PatKind::Con(LongId::simple(x.clone()));
            }
        }
        let t = match &mut p.kind {
            PatKind::Wild => self.fresh(),
            PatKind::Var(x) => {
                let t = self.fresh();
                self.bind(binds, x, &t, span)?;
                t
            }
            PatKind::Con(id) => {
                let (info, r) = self.con_info(env, id, span)?;
                if Self::has_arg(&info) {
                    return Err(Error::ty(span, format!("constructor {id} requires an argument")));
                }
                self.ann.refs.insert(p.meta.id, r);
                self.instantiate(&info.scheme)
            }
            PatKind::SCon(c) => scon_type(c),
            PatKind::Unit => SemType::Unit,
            PatKind::Tuple(ps) => {
                let mut ts = Vec::new();
                for q in ps.iter_mut() {
                    ts.push(self.pat(env, q, binds)?);
                }
                SemType::Tuple(ts)
            }
            PatKind::List(ps) => {
                let elem = self.fresh();
                for q in ps.iter_mut() {
                    let t = self.pat(env, q, binds)?;
                    self.unify_at(q.meta.span, &elem, &t, "list pattern elements differ")?;
                }
                SemType::list(elem)
            }
            PatKind::Record { fields, ellipsis } => {
                let mut map = BTreeMap::new();
                for (l, q) in fields.iter_mut() {
                    let t = self.pat(env, q, binds)?;
                    if map.insert(l.clone(), t).is_some() {
                        return Err(Error::ty(span, format!("duplicate label {l}")));
                    }
                }
                if *ellipsis {
                    self.fresh_flex(map, span)
                } else {
                    SemType::Record(map)
                }
            }
            PatKind::ConApp(id, arg) => {
                let (info, r) = self.con_info(env, id, span)?;
                if !Self::has_arg(&info) {
                    return Err(Error::ty(span, format!("constructor {id} takes no argument")));
                }
                self.ann.refs.insert(p.meta.id, r);
                let ct = self.instantiate(&info.scheme);
                let at = self.pat(env, arg, binds)?;
                let res = self.fresh();
                self.unify_at(span, &ct, &SemType::arrow(at, res.clone()), "constructor pattern")?;
                res
            }
            PatKind::Infix { op, lhs, rhs } => {
                let id = LongId::simple(op.clone());
                let (info, r) = self.con_info(env, &id, span)?;
                self.ann.refs.insert(p.meta.id, r);
                let ct = self.instantiate(&info.scheme);
                let lt = self.pat(env, lhs, binds)?;
                let rt = self.pat(env, rhs, binds)?;
                let res = self.fresh();
                let arg = SemType::Tuple(vec![lt, rt]);
                self.unify_at(span, &ct, &SemType::arrow(arg, res.clone()), "infix pattern")?;
                res
            }
            PatKind::Typed(q, ty) => {
                let t = self.pat(env, q, binds)?;
                let annotated = self.ty(env, ty)?;
                self.unify_at(span, &annotated, &t, "pattern does not match its annotation")?;
                annotated
            }
            PatKind::Layered { name, ty, pat } => {
                let name = name.clone();
                let t = self.pat(env, pat, binds)?;
                let t = match ty {
                    Some(ty) => {
                        let annotated = self.ty(env, ty)?;
                        self.unify_at(span, &annotated, &t, "layered pattern annotation")?;
                        annotated
                    }
                    None => t,
                };
                self.bind(binds, &name, &t, span)?;
                t
            }
        };
        self.record(p.meta.id, &t);
        Ok(t)
    }

    fn bind(&mut self, binds: &mut Vec<(String, SemType)>, x: &str, t: &SemType, span: Span) -> Result<()> {
        if binds.iter().any(|(y, _)| y == x) {
            return Err(Error::ty(span, format!("variable {x} bound twice in pattern")));
        }
        binds.push((x.to_string(), t.clone()));
        Ok(())
    }

    /// Look up a value identifier and instantiate its scheme.
    fn value(&mut self, env: &Env, id: &LongId, node: NodeId, span: Span) -> Result<SemType> {
        let Some(info) = env.value(id).cloned() else {
            if id.is_simple() && IMPURE.contains(&id.name.as_str()) {
                return Err(unsupported(
                    span,
                    format!("`{id}` relies on side effects and is outside the supported subset"),
                ));
            }
            return Err(Error::Unbound { span, kind: "value", name: id.to_string() });
        };
        let (r, t) = match &info.kind {
            ValKind::Var => (ValueRef::Local, self.instantiate(&info.scheme)),
            ValKind::Con { con, .. } => (ValueRef::Con(con.clone()), self.instantiate(&info.scheme)),
            ValKind::Basis(entry) => {
                let t = self.instantiate_with(&info.scheme, |v| super::env::basis_constraint(entry, v));
                (ValueRef::Basis(entry.sml), t)
            }
        };
        self.ann.refs.insert(node, r);
        Ok(t)
    }

    pub(crate) fn exp(&mut self, env: &Env, e: &mut Exp) -> Result<SemType> {
        let span = e.meta.span;
        if let ExpKind::Var { name, op } = &e.kind {
            if env.value(name).is_some_and(ValInfo::is_con) {
                e.kind = ExpKind::Con { name: name.clone(), op: *op };
            }
        }
        let t = match &mut e.kind {
            ExpKind::Var { name, .. } | ExpKind::Con { name, .. } => {
                let name = name.clone();
                self.value(env, &name, e.meta.id, span)?
            }
            ExpKind::SCon(c) => scon_type(c),
            ExpKind::Unit => SemType::Unit,
            ExpKind::Tuple(es) => {
                let mut ts = Vec::new();
                for x in es.iter_mut() {
                    ts.push(self.exp(env, x)?);
                }
                SemType::Tuple(ts)
            }
            ExpKind::List(es) => {
                let elem = self.fresh();
                for x in es.iter_mut() {
                    let t = self.exp(env, x)?;
                    self.unify_at(x.meta.span, &elem, &t, "list elements differ")?;
                }
                SemType::list(elem)
            }
            ExpKind::Record(fs) => {
                let mut map = BTreeMap::new();
                for (l, x) in fs.iter_mut() {
                    let t = self.exp(env, x)?;
                    if map.insert(l.clone(), t).is_some() {
                        return Err(Error::ty(span, format!("duplicate label {l}")));
                    }
                }
                SemType::Record(map)
            }
            ExpKind::Selector(l) => {
                let field = self.fresh();
                let r = self.fresh_flex(BTreeMap::from([(l.clone(), field.clone())]), span);
                SemType::arrow(r, field)
            }
            ExpKind::App(f, a) => {
                let tf = self.exp(env, f)?;
                let ta = self.exp(env, a)?;
                let res = self.fresh();
                self.unify_at(span, &tf, &SemType::arrow(ta, res.clone()), "operator and operand do not agree")?;
                res
            }
            ExpKind::Infix { op, lhs, rhs } => {
                let op = op.clone();
                let tf = self.value(env, &op, e.meta.id, span)?;
                let lt = self.exp(env, lhs)?;
                let rt = self.exp(env, rhs)?;
                let res = self.fresh();
                let arg = SemType::Tuple(vec![lt, rt]);
                self.unify_at(span, &tf, &SemType::arrow(arg, res.clone()), &format!("operands of {op} do not agree"))?;
                res
            }
            ExpKind::Fn(m) => {
                let arg = self.fresh();
                let res = self.fresh();
                self.rules(env, m, &arg, &res)?;
                SemType::arrow(arg, res)
            }
            ExpKind::Case(scrut, m) => {
                let ts = self.exp(env, scrut)?;
                let res = self.fresh();
                self.rules(env, m, &ts, &res)?;
                res
            }
            ExpKind::If(c, a, b) => {
                let tc = self.exp(env, c)?;
                self.unify_at(c.meta.span, &SemType::Bool, &tc, "condition must be bool")?;
                let ta = self.exp(env, a)?;
                let tb = self.exp(env, b)?;
                self.unify_at(span, &ta, &tb, "branches of if differ")?;
                ta
            }
            ExpKind::Andalso(a, b) | ExpKind::Orelse(a, b) => {
                for x in [a, b] {
                    let t = self.exp(env, x)?;
                    self.unify_at(x.meta.span, &SemType::Bool, &t, "operand must be bool")?;
                }
                SemType::Bool
            }
            ExpKind::Let(decs, body) => {
                let mut local = env.clone();
                for d in decs.iter_mut() {
                    let delta = self.dec(&local, d, "")?;
                    local.extend(&delta);
                }
                self.exp(&local, body)?
            }
            ExpKind::Typed(x, ty) => {
                let t = self.exp(env, x)?;
                let annotated = self.ty(env, ty)?;
                self.unify_at(span, &annotated, &t, "expression does not match its annotation")?;
                annotated
            }
        };
        self.record(e.meta.id, &t);
        Ok(t)
    }

    /// Elaborate the rules of `fn` or `case` at argument type `arg`.
    fn rules(&mut self, env: &Env, m: &mut Match, arg: &SemType, res: &SemType) -> Result<()> {
        for rule in m.rules.iter_mut() {
            let mut binds = Vec::new();
            let tp = self.pat(env, &mut rule.pat, &mut binds)?;
            self.unify_at(rule.pat.meta.span, arg, &tp, "pattern type mismatch")?;
            let local = with_binds(env, &binds);
            let te = self.exp(&local, &mut rule.exp)?;
            self.unify_at(rule.exp.meta.span, res, &te, "rules return different types")?;
        }
        let t = SemType::arrow(arg.clone(), res.clone());
        self.record(m.meta.id, &t);
        Ok(())
    }
}

pub(crate) fn with_binds(env: &Env, binds: &[(String, SemType)]) -> Env {
    let mut local = env.clone();
    for (x, t) in binds {
        local.values.insert(x.clone(), ValInfo::var(TypeScheme::mono(t.clone())));
    }
    local
}

fn scon_type(c: &SCon) -> SemType {
    match c {
        SCon::Int(_) => SemType::Int,
        SCon::Real(_) => SemType::Real,
        SCon::Str(_) => SemType::Str,
        SCon::Char(_) => SemType::Char,
    }
}

/// Syntactic values, which may be generalized.
pub(crate) fn is_nonexpansive(e: &Exp, env: &Env) -> bool {
    match &e.kind {
        ExpKind::Var { .. }
        | ExpKind::Con { .. }
        | ExpKind::SCon(_)
        | ExpKind::Unit
        | ExpKind::Selector(_)
        | ExpKind::Fn(_) => true,
        ExpKind::Tuple(es) | ExpKind::List(es) => es.iter().all(|x| is_nonexpansive(x, env)),
        ExpKind::Record(fs) => fs.iter().all(|(_, x)| is_nonexpansive(x, env)),
        ExpKind::Typed(x, _) => is_nonexpansive(x, env),
        ExpKind::App(f, a) => is_constructor(f, env) && is_nonexpansive(a, env),
        ExpKind::Infix { op, lhs, rhs } => {
            env.value(op).is_some_and(ValInfo::is_con) && is_nonexpansive(lhs, env) && is_nonexpansive(rhs, env)
        }
        _ => false,
    }
}

fn is_constructor(e: &Exp, env: &Env) -> bool {
    match &e.kind {
        ExpKind::Con { .. } => true,
        ExpKind::Var { name, .. } => env.value(name).is_some_and(ValInfo::is_con),
        ExpKind::Typed(x, _) => is_constructor(x, env),
        _ => false,
    }
}
