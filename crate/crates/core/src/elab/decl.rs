//! Declarations, contracts and the module language.

use super::env::{Env, FunctorInfo, SigInfo, TyCon, ValInfo, ValKind};
use super::expr::{is_nonexpansive, with_binds};
use super::{Elab, ElabContract};
use crate::diag::{Error, Result, Span};
use crate::frontend::ast::*;
use crate::patterns::collect_vars;
use crate::types::{DataInfo, SemType, TypeScheme};
use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

fn qualify(path: &str, name: &str) -> String {
    if path.is_empty() {
        name.to_string()
    } else {
        format!("{path}.{name}")
    }
}

fn contract_error(span: Span, message: impl Into<String>) -> Error {
    Error::Contract { span, message: message.into() }
}

impl Elab {
    /// Elaborate one declaration; returns the bindings it introduces.
    pub(crate) fn dec(&mut self, env: &Env, d: &mut Dec, path: &str) -> Result<Env> {
        let span = d.meta.span;
        match &mut d.kind {
            DecKind::Val { rec, tyvars, binds } => {
                let scoped = self.scope_tyvars(tyvars, |out| {
                    binds.iter().for_each(|b| {
                        pat_tyvars(&b.pat, out);
                        exp_tyvars(&b.exp, out);
                    })
                });
                let r = if *rec { self.val_rec(env, binds, &scoped) } else { self.val(env, binds, &scoped) };
                self.unscope(&scoped);
                r
            }
            DecKind::Fun { tyvars, binds, contract } => {
                let scoped = self.scope_tyvars(tyvars, |out| {
                    for b in binds.iter() {
                        for c in &b.clauses {
                            c.pats.iter().for_each(|p| pat_tyvars(p, out));
                            if let Some(t) = &c.ret {
                                ty_tyvars(t, out);
                            }
                            exp_tyvars(&c.body, out);
                        }
                    }
                });
                let r = self.fun(env, binds, contract.as_deref_mut(), &scoped, span);
                self.unscope(&scoped);
                r
            }
            DecKind::Datatype(dbs) => self.datatype(env, dbs, path),
            DecKind::Type(tbs) => {
                let mut delta = Env::default();
                for tb in tbs.iter() {
                    let tc = self.abbrev(env, &tb.tyvars, &tb.ty)?;
                    delta.types.insert(tb.name.clone(), tc);
                }
                Ok(delta)
            }
            DecKind::Local(hidden, visible) => {
                let mut local = env.clone();
                for h in hidden.iter_mut() {
                    let delta = self.dec(&local, h, path)?;
                    local.extend(&delta);
                }
                let mut out = Env::default();
                for v in visible.iter_mut() {
                    let delta = self.dec(&local, v, path)?;
                    local.extend(&delta);
                    out.extend(&delta);
                }
                Ok(out)
            }
            DecKind::Infix { .. } | DecKind::Nonfix(_) => Ok(Env::default()),
            DecKind::Structure(sbs) => {
                let mut delta = Env::default();
                for sb in sbs.iter_mut() {
                    let p = qualify(path, &sb.name);
                    let senv = self.strexp(env, &mut sb.body, &p)?;
                    if let Some(asc) = &sb.sig {
                        self.declare_inline_sig(env, &asc.sig)?;
                        self.match_sig(env, &asc.sig, &senv, sb.meta.span)?;
                    }
                    delta.structures.insert(sb.name.clone(), Rc::new(senv));
                }
                Ok(delta)
            }
            DecKind::Signature(sbs) => {
                let mut delta = Env::default();
                for sb in sbs.iter() {
                    self.sig_env(env, &sb.sig, &qualify(path, &sb.name), None)?;
                    let info = SigInfo { sig: sb.sig.clone(), env: env.clone() };
                    delta.signatures.insert(sb.name.clone(), Rc::new(info));
                }
                Ok(delta)
            }
            DecKind::Functor(fbs) => {
                let mut delta = Env::default();
                for fb in fbs.iter_mut() {
                    let original = fb.clone();
                    let param_env = self.sig_env(env, &fb.param_sig, &fb.param, None)?;
                    let mut body_env = env.clone();
                    body_env.structures.insert(fb.param.clone(), Rc::new(param_env));
                    let result = self.strexp(&body_env, &mut fb.body, &qualify(path, &fb.name))?;
                    if let Some(asc) = &fb.result_sig {
                        self.declare_inline_sig(env, &asc.sig)?;
                        self.match_sig(env, &asc.sig, &result, fb.meta.span)?;
                    }
                    let info = FunctorInfo { bind: original, env: env.clone() };
                    delta.functors.insert(fb.name.clone(), Rc::new(info));
                }
                Ok(delta)
            }
        }
    }

    /// Bring explicit and implicitly scoped type variables into scope;
    /// returns the names bound here.
    fn scope_tyvars(&mut self, explicit: &[String], collect: impl FnOnce(&mut BTreeSet<String>)) -> Vec<String> {
        let mut found = BTreeSet::new();
        collect(&mut found);
        let mut scoped: Vec<String> = explicit.to_vec();
        for v in found {
            if !self.tyvars.contains(&v) && !scoped.contains(&v) {
                scoped.push(v);
            }
        }
        scoped.retain(|v| !self.tyvars.contains(v));
        self.tyvars.extend(scoped.iter().cloned());
        scoped
    }

    fn unscope(&mut self, scoped: &[String]) {
        for v in scoped {
            self.tyvars.remove(v);
        }
    }

    fn val(&mut self, env: &Env, binds: &mut [ValBind], named: &[String]) -> Result<Env> {
        self.enter();
        let mut typed = Vec::new();
        for vb in binds.iter_mut() {
            let te = self.exp(env, &mut vb.exp)?;
            let mut vars = Vec::new();
            let tp = self.pat(env, &mut vb.pat, &mut vars)?;
            self.unify_at(vb.meta.span, &tp, &te, "pattern and expression do not agree")?;
            typed.push((tp, vars));
        }
        self.exit();
        let mut delta = Env::default();
        for (vb, (tp, vars)) in binds.iter().zip(typed) {
            let value = is_nonexpansive(&vb.exp, env);
            let scheme = self.generalize(&tp, named, value, vb.meta.span)?;
            for (x, t) in vars {
                let s = self.restrict(&scheme, &t);
                delta.values.insert(x, ValInfo::var(s));
            }
            self.ann.schemes.insert(vb.meta.id, scheme);
        }
        Ok(delta)
    }

    /// The part of `scheme` relevant to a component type `t`.
    fn restrict(&self, scheme: &TypeScheme, t: &SemType) -> TypeScheme {
        let body = self.subst.apply(t);
        let occurring = body.tyvars();
        let vars = scheme.vars.iter().filter(|v| occurring.contains(v)).cloned().collect();
        TypeScheme { vars, body }
    }

    fn val_rec(&mut self, env: &Env, binds: &mut [ValBind], named: &[String]) -> Result<Env> {
        self.enter();
        let mut all = Vec::new();
        let mut types = Vec::new();
        for vb in binds.iter_mut() {
            if !is_var_pat(&vb.pat) || !is_fn(&vb.exp) {
                return Err(Error::ty(vb.meta.span, "`val rec` must bind a variable to a `fn` expression"));
            }
            let mut vars = Vec::new();
            let tp = self.pat(env, &mut vb.pat, &mut vars)?;
            all.extend(vars);
            types.push(tp);
        }
        let rec_env = with_binds(env, &all);
        for (vb, tp) in binds.iter_mut().zip(&types) {
            let te = self.exp(&rec_env, &mut vb.exp)?;
            self.unify_at(vb.meta.span, tp, &te, "recursive binding type mismatch")?;
        }
        self.exit();
        let mut delta = Env::default();
        for ((vb, tp), (x, _)) in binds.iter().zip(&types).zip(&all) {
            let scheme = self.generalize(tp, named, true, vb.meta.span)?;
            delta.values.insert(x.clone(), ValInfo::var(scheme.clone()));
            self.ann.schemes.insert(vb.meta.id, scheme);
        }
        Ok(delta)
    }

    fn fun(
        &mut self,
        env: &Env,
        binds: &mut [FunBind],
        contract: Option<&mut Contract>,
        named: &[String],
        span: Span,
    ) -> Result<Env> {
        self.enter();
        let mut sigs = Vec::new();
        let mut rec_env = env.clone();
        for fb in binds.iter() {
            let params: Vec<SemType> = (0..fb.arity()).map(|_| self.fresh()).collect();
            let ret = self.fresh();
            let ft = params.iter().rev().fold(ret.clone(), |acc, p| SemType::arrow(p.clone(), acc));
            self.record(fb.meta.id, &ft);
            rec_env.values.insert(fb.name.clone(), ValInfo::var(TypeScheme::mono(ft.clone())));
            sigs.push((params, ret, ft));
        }
        for (fb, (params, ret, _)) in binds.iter_mut().zip(&sigs) {
            for clause in fb.clauses.iter_mut() {
                let mut vars = Vec::new();
                for (p, pt) in clause.pats.iter_mut().zip(params) {
                    let t = self.pat(&rec_env, p, &mut vars)?;
                    self.unify_at(p.meta.span, pt, &t, "clause argument types differ")?;
                }
                if let Some(rt) = &clause.ret {
                    let t = self.ty(&rec_env, rt)?;
                    self.unify_at(rt.meta.span, ret, &t, "result annotation mismatch")?;
                }
                let body_env = with_binds(&rec_env, &vars);
                let tb = self.exp(&body_env, &mut clause.body)?;
                self.unify_at(clause.body.meta.span, ret, &tb, "clause results differ")?;
            }
        }
        self.exit();
        let mut delta = Env::default();
        for (fb, (_, _, ft)) in binds.iter().zip(&sigs) {
            let scheme = self.generalize(ft, named, true, fb.meta.span)?;
            delta.values.insert(fb.name.clone(), ValInfo::var(scheme.clone()));
            self.ann.schemes.insert(fb.meta.id, scheme);
        }
        if let Some(c) = contract {
            let Some(fb) = binds.iter().find(|b| b.name == c.fname) else {
                return Err(contract_error(span, format!("contract names unknown function {}", c.fname)));
            };
            let scheme = self.ann.schemes[&fb.meta.id].clone();
            let mut cenv = env.clone();
            cenv.extend(&delta);
            self.contract(&cenv, c, &scheme, fb.arity())?;
        }
        Ok(delta)
    }

    /// Check a contract against the scheme of the function it names.
    fn contract(&mut self, env: &Env, c: &mut Contract, scheme: &TypeScheme, arity: usize) -> Result<()> {
        let span = c.meta.span;
        if c.inputs.len() != arity {
            return Err(contract_error(
                span,
                format!(
                    "contract gives {} input group(s) but {} takes {} curried argument(s)",
                    c.inputs.len(),
                    c.fname,
                    arity
                ),
            ));
        }
        let mut names = Vec::new();
        for p in c.inputs.iter().chain(std::iter::once(&c.output)) {
            for x in collect_vars(p) {
                if names.contains(&x) {
                    return Err(contract_error(p.meta.span, format!("contract variable {x} is bound more than once")));
                }
                names.push(x);
            }
        }
        let mut ft = self.instantiate(scheme);
        let mut vars = Vec::new();
        for p in c.inputs.iter_mut() {
            let t = self.pat(env, p, &mut vars)?;
            let (param, rest) = match self.subst.shallow(&ft) {
                SemType::Arrow(a, b) => (*a, *b),
                _ => unreachable!("arity checked"),
            };
            self.subst
                .unify(&param, &t)
                .map_err(|e| contract_error(p.meta.span, format!("input does not match {}: {e}", c.fname)))?;
            ft = rest;
        }
        let t = self.pat(env, &mut c.output, &mut vars)?;
        self.subst.unify(&ft, &t).map_err(|e| {
            contract_error(c.output.meta.span, format!("output does not match result of {}: {e}", c.fname))
        })?;
        let local = with_binds(env, &vars);
        for (label, cond) in [("REQUIRES", &mut c.requires), ("ENSURES", &mut c.ensures)] {
            let t = self.exp(&local, cond).map_err(|e| match e {
                Error::Unbound { span, name, .. } => contract_error(
                    span,
                    format!("{label} refers to {name}, which is neither a contract variable nor previously declared"),
                ),
                other => other,
            })?;
            self.subst.unify(&SemType::Bool, &t).map_err(|_| {
                contract_error(cond.meta.span, format!("{label} expected bool, found {}", self.subst.show(&t)))
            })?;
        }
        self.ann.contracts.insert(c.meta.id, ElabContract { fname: c.fname.clone(), vars });
        Ok(())
    }

    fn datatype(&mut self, env: &Env, dbs: &mut [DatBind], path: &str) -> Result<Env> {
        let mut delta = Env::default();
        let mut stamps = Vec::new();
        for db in dbs.iter() {
            let stamp = self.stamp();
            let name = qualify(path, &db.name);
            delta.types.insert(db.name.clone(), TyCon::Data { stamp, name: name.clone(), arity: db.tyvars.len() });
            stamps.push((stamp, name));
        }
        let mut scope = env.clone();
        scope.extend(&delta);
        for (db, (stamp, name)) in dbs.iter().zip(stamps) {
            let saved = std::mem::replace(&mut self.tyvars, db.tyvars.iter().cloned().collect());
            let params: Vec<SemType> = db.tyvars.iter().map(|a| SemType::Named(a.clone())).collect();
            let result = SemType::Data { stamp, name: name.clone(), args: params.clone() };
            let mut cons = Vec::new();
            for cb in &db.cons {
                let arg = cb.arg.as_ref().map(|t| self.ty(&scope, t)).transpose();
                let arg = match arg {
                    Ok(a) => a,
                    Err(e) => {
                        self.tyvars = saved;
                        return Err(e);
                    }
                };
                let body = match &arg {
                    Some(a) => SemType::arrow(a.clone(), result.clone()),
                    None => result.clone(),
                };
                let kind = ValKind::Con { con: super::env::ConRef::Data { stamp }, has_arg: arg.is_some() };
                let scheme = TypeScheme { vars: params.clone(), body };
                delta.values.insert(cb.name.clone(), ValInfo { scheme, kind });
                self.record(cb.meta.id, &result);
                cons.push((cb.name.clone(), arg));
            }
            self.tyvars = saved;
            self.data.insert(DataInfo { stamp, name, params: db.tyvars.clone(), cons, is_abstract: false });
        }
        Ok(delta)
    }

    fn abbrev(&mut self, env: &Env, params: &[String], ty: &Ty) -> Result<TyCon> {
        let saved = std::mem::replace(&mut self.tyvars, params.iter().cloned().collect());
        let body = self.ty(env, ty);
        self.tyvars = saved;
        Ok(TyCon::Abbrev { params: params.to_vec(), body: body? })
    }

    pub(crate) fn strexp(&mut self, env: &Env, s: &mut StrExp, path: &str) -> Result<Env> {
        let span = s.meta.span;
        match &mut s.kind {
            StrExpKind::Struct(decs) => {
                let mut local = env.clone();
                let mut out = Env::default();
                for d in decs.iter_mut() {
                    let delta = self.dec(&local, d, path)?;
                    local.extend(&delta);
                    out.extend(&delta);
                }
                Ok(out)
            }
            StrExpKind::Name(id) => {
                let mut e = env;
                for q in id.parts() {
                    e = e.structures.get(&q).ok_or_else(|| Error::Unbound {
                        span,
                        kind: "structure",
                        name: id.to_string(),
                    })?;
                }
                Ok(e.clone())
            }
            StrExpKind::App(fname, arg) => {
                let Some(info) = env.functors.get(fname).cloned() else {
                    return Err(Error::Unbound { span, kind: "functor", name: fname.clone() });
                };
                let arg_env = self.strexp(env, arg, "")?;
                self.match_sig(&info.env, &info.bind.param_sig, &arg_env, span)?;
                let mut body_env = info.env.clone();
                body_env.structures.insert(info.bind.param.clone(), Rc::new(arg_env));
                let mut body = info.bind.body.clone();
                let path = path.to_string();
                self.scratch(|el| el.strexp(&body_env, &mut body, &path))
            }
            StrExpKind::Constrained(inner, asc) => {
                let senv = self.strexp(env, inner, path)?;
                self.declare_inline_sig(env, &asc.sig)?;
                self.match_sig(env, &asc.sig, &senv, span)?;
                Ok(senv)
            }
        }
    }

    /// Annotate the specs of an inline signature expression once.
    fn declare_inline_sig(&mut self, env: &Env, sig: &SigExp) -> Result<()> {
        if let SigExpKind::Sig(_) = sig.kind {
            self.sig_env(env, sig, "", None)?;
        }
        Ok(())
    }

    /// Instantiate a signature. Abstract types take their realization from
    /// `realize` when given and are fresh abstract types otherwise.
    fn sig_env(&mut self, env: &Env, sig: &SigExp, path: &str, realize: Option<&Env>) -> Result<Env> {
        match &sig.kind {
            SigExpKind::Name(n) => {
                let Some(info) = env.signatures.get(n).cloned() else {
                    return Err(Error::Unbound { span: sig.meta.span, kind: "signature", name: n.clone() });
                };
                let path = path.to_string();
                self.scratch(|el| el.sig_env(&info.env, &info.sig, &path, realize))
            }
            SigExpKind::Sig(specs) => {
                let mut local = env.clone();
                let mut out = Env::default();
                for spec in specs {
                    let delta = self.spec(&local, spec, path, realize)?;
                    local.extend(&delta);
                    out.extend(&delta);
                }
                Ok(out)
            }
        }
    }

    fn spec(&mut self, env: &Env, spec: &Spec, path: &str, realize: Option<&Env>) -> Result<Env> {
        let mut delta = Env::default();
        match &spec.kind {
            SpecKind::Val(items) => {
                for (x, ty) in items {
                    let mut found = BTreeSet::new();
                    ty_tyvars(ty, &mut found);
                    let saved = std::mem::replace(&mut self.tyvars, found.clone());
                    let t = self.ty(env, ty);
                    self.tyvars = saved;
                    let t = t?;
                    let vars = found.into_iter().map(SemType::Named).collect();
                    delta.values.insert(x.clone(), ValInfo::var(TypeScheme { vars, body: t }));
                }
            }
            SpecKind::Type(tspecs) => {
                for ts in tspecs {
                    let tc = match (&ts.def, realize.and_then(|r| r.types.get(&ts.name))) {
                        (Some(def), _) => self.abbrev(env, &ts.tyvars, def)?,
                        (None, Some(tc)) => tc.clone(),
                        (None, None) => {
                            let stamp = self.stamp();
                            let name = qualify(path, &ts.name);
                            self.data.insert(DataInfo {
                                stamp,
                                name: name.clone(),
                                params: ts.tyvars.clone(),
                                cons: Vec::new(),
                                is_abstract: true,
                            });
                            TyCon::Data { stamp, name, arity: ts.tyvars.len() }
                        }
                    };
                    delta.types.insert(ts.name.clone(), tc);
                }
            }
            SpecKind::Datatype(dbs) => {
                let realized = realize.filter(|r| dbs.iter().all(|db| r.types.contains_key(&db.name)));
                match realized {
                    Some(r) => {
                        for db in dbs {
                            delta.types.insert(db.name.clone(), r.types[&db.name].clone());
                            for cb in &db.cons {
                                let Some(v) = r.values.get(&cb.name) else {
                                    return Err(Error::ty(
                                        spec.meta.span,
                                        format!("structure lacks constructor {}", cb.name),
                                    ));
                                };
                                delta.values.insert(cb.name.clone(), v.clone());
                            }
                        }
                    }
                    None => {
                        let mut dbs = dbs.clone();
                        delta = self.datatype(env, &mut dbs, path)?;
                    }
                }
            }
            SpecKind::Structure(items) => {
                for (n, s) in items {
                    let sub = realize.and_then(|r| r.structures.get(n)).cloned();
                    let e = self.sig_env(env, s, &qualify(path, n), sub.as_deref())?;
                    delta.structures.insert(n.clone(), Rc::new(e));
                }
            }
            SpecKind::Include(s) => delta = self.sig_env(env, s, path, realize)?,
        }
        Ok(delta)
    }

    /// Structural signature matching.
    fn match_sig(&mut self, env: &Env, sig: &SigExp, str_env: &Env, span: Span) -> Result<()> {
        let spec = self.scratch(|el| el.sig_env(env, sig, "", Some(str_env)))?;
        self.match_env(&spec, str_env, span)
    }

    fn match_env(&mut self, spec: &Env, actual: &Env, span: Span) -> Result<()> {
        for (n, tc) in &spec.types {
            let Some(have) = actual.types.get(n) else {
                return Err(Error::ty(span, format!("structure lacks type {n} required by signature")));
            };
            if have.arity() != tc.arity() {
                return Err(Error::ty(span, format!("type {n} has the wrong arity")));
            }
            if let TyCon::Abbrev { .. } = tc {
                let args: Vec<SemType> = (0..tc.arity()).map(|i| SemType::Named(format!("t{i}"))).collect();
                let want = tycon_type(tc, &args).expand();
                let got = tycon_type(have, &args).expand();
                self.subst
                    .unify(&want, &got)
                    .map_err(|e| Error::ty(span, format!("type {n} does not match its signature: {e}")))?;
            }
        }
        for (x, info) in &spec.values {
            let Some(have) = actual.values.get(x).cloned() else {
                return Err(Error::ty(span, format!("structure lacks value {x} required by signature")));
            };
            if info.is_con() && !have.is_con() {
                return Err(Error::ty(span, format!("{x} must be a constructor")));
            }
            let got = self.instantiate(&have.scheme);
            self.subst
                .unify(&info.scheme.body, &got)
                .map_err(|e| Error::ty(span, format!("value {x} does not match its signature: {e}")))?;
        }
        for (n, sub) in &spec.structures {
            let Some(have) = actual.structures.get(n).cloned() else {
                return Err(Error::ty(span, format!("structure lacks substructure {n}")));
            };
            self.match_env(sub, &have, span)?;
        }
        Ok(())
    }
}

fn tycon_type(tc: &TyCon, args: &[SemType]) -> SemType {
    match tc {
        TyCon::Prim { ty, .. } => ty(args.to_vec()),
        TyCon::Abbrev { params, body } => {
            let map: BTreeMap<String, SemType> = params.iter().cloned().zip(args.iter().cloned()).collect();
            body.subst_named(&map)
        }
        TyCon::Data { stamp, name, .. } => SemType::Data { stamp: *stamp, name: name.clone(), args: args.to_vec() },
    }
}

fn is_var_pat(p: &Pat) -> bool {
    match &p.kind {
        PatKind::Var(_) => true,
        PatKind::Typed(q, _) => is_var_pat(q),
        _ => false,
    }
}

fn is_fn(e: &Exp) -> bool {
    match &e.kind {
        ExpKind::Fn(_) => true,
        ExpKind::Typed(x, _) => is_fn(x),
        _ => false,
    }
}

fn ty_tyvars(t: &Ty, out: &mut BTreeSet<String>) {
    match &t.kind {
        TyKind::Var(a) => {
            out.insert(a.clone());
        }
        TyKind::Con(args, _) | TyKind::Tuple(args) => args.iter().for_each(|a| ty_tyvars(a, out)),
        TyKind::Arrow(a, b) => {
            ty_tyvars(a, out);
            ty_tyvars(b, out);
        }
        TyKind::Record(fs) => fs.iter().for_each(|(_, a)| ty_tyvars(a, out)),
    }
}

fn pat_tyvars(p: &Pat, out: &mut BTreeSet<String>) {
    match &p.kind {
        PatKind::Tuple(ps) | PatKind::List(ps) => ps.iter().for_each(|q| pat_tyvars(q, out)),
        PatKind::Record { fields, .. } => fields.iter().for_each(|(_, q)| pat_tyvars(q, out)),
        PatKind::ConApp(_, q) => pat_tyvars(q, out),
        PatKind::Infix { lhs, rhs, .. } => {
            pat_tyvars(lhs, out);
            pat_tyvars(rhs, out);
        }
        PatKind::Typed(q, t) => {
            pat_tyvars(q, out);
            ty_tyvars(t, out);
        }
        PatKind::Layered { ty, pat, .. } => {
            if let Some(t) = ty {
                ty_tyvars(t, out);
            }
            pat_tyvars(pat, out);
        }
        _ => {}
    }
}

fn exp_tyvars(e: &Exp, out: &mut BTreeSet<String>) {
    let rules = |m: &Match, out: &mut BTreeSet<String>| {
        for r in &m.rules {
            pat_tyvars(&r.pat, out);
            exp_tyvars(&r.exp, out);
        }
    };
    match &e.kind {
        ExpKind::Tuple(es) | ExpKind::List(es) => es.iter().for_each(|x| exp_tyvars(x, out)),
        ExpKind::Record(fs) => fs.iter().for_each(|(_, x)| exp_tyvars(x, out)),
        ExpKind::App(a, b) | ExpKind::Andalso(a, b) | ExpKind::Orelse(a, b) => {
            exp_tyvars(a, out);
            exp_tyvars(b, out);
        }
        ExpKind::Infix { lhs, rhs, .. } => {
            exp_tyvars(lhs, out);
            exp_tyvars(rhs, out);
        }
        ExpKind::Fn(m) => rules(m, out),
        ExpKind::Case(x, m) => {
            exp_tyvars(x, out);
            rules(m, out);
        }
        ExpKind::If(a, b, c) => {
            exp_tyvars(a, out);
            exp_tyvars(b, out);
            exp_tyvars(c, out);
        }
        ExpKind::Let(decs, body) => {
            for d in decs {
                match &d.kind {
                    DecKind::Val { binds, .. } => binds.iter().for_each(|b| {
                        pat_tyvars(&b.pat, out);
                        exp_tyvars(&b.exp, out);
                    }),
                    DecKind::Fun { binds, .. } => {
                        for c in binds.iter().flat_map(|b| &b.clauses) {
                            c.pats.iter().for_each(|p| pat_tyvars(p, out));
                            if let Some(t) = &c.ret {
                                ty_tyvars(t, out);
                            }
                            exp_tyvars(&c.body, out);
                        }
                    }
                    _ => {}
                }
            }
            exp_tyvars(body, out);
        }
        ExpKind::Typed(x, t) => {
            exp_tyvars(x, out);
            ty_tyvars(t, out);
        }
        _ => {}
    }
}
