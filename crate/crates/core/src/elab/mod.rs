//! Elaboration: Hindley-Milner inference over the source tree, contract
//! checking and exhaustiveness flags.

mod decl;
pub mod env;
mod exhaust;
mod expr;

use crate::diag::{Error, Result, Span, Stage, Warning};
use crate::frontend::ast::{Dec, NodeId, Program};
use crate::frontend::InfixEnv;
use crate::types::{DataEnv, SemType, Subst, TyVarId, TypeScheme, UnifyError, VarState};
use env::{ConRef, Env};
use std::collections::{BTreeMap, BTreeSet};

/// What a value identifier occurrence refers to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueRef {
    /// A variable bound by the program.
    Local,
    /// A basis library value, by its SML name.
    Basis(&'static str),
    Con(ConRef),
}

/// A contract after type checking.
#[derive(Clone, Debug, PartialEq)]
pub struct ElabContract {
    pub fname: String,
    /// Contract variables in binding order (inputs, then output).
    pub vars: Vec<(String, SemType)>,
}

/// Per-node results of elaboration, keyed by node id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Annotations {
    /// Every expression, pattern and type node; a `FunBind` maps to the
    /// function's type and a `Clause` to nothing.
    pub types: BTreeMap<NodeId, SemType>,
    /// Schemes of `FunBind`s and `ValBind`s (the latter for the whole
    /// pattern).
    pub schemes: BTreeMap<NodeId, TypeScheme>,
    /// Verdicts for `Match`, `ValBind` and `FunBind` nodes.
    pub exhaustive: BTreeMap<NodeId, bool>,
    /// Expression and pattern identifiers (including infix operators).
    pub refs: BTreeMap<NodeId, ValueRef>,
    /// Keyed by the contract node.
    pub contracts: BTreeMap<NodeId, ElabContract>,
}

impl Annotations {
    pub fn ty(&self, id: NodeId) -> Option<&SemType> {
        self.types.get(&id)
    }

    fn merge(&mut self, other: Annotations) {
        self.types.extend(other.types);
        self.schemes.extend(other.schemes);
        self.exhaustive.extend(other.exhaustive);
        self.refs.extend(other.refs);
        self.contracts.extend(other.contracts);
    }
}

/// A top-level declaration with its resolved tree (variables naming
/// constructors rewritten to constructors) and annotations.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnotatedDecl {
    pub decl: Dec,
    pub ann: Annotations,
}

#[derive(Clone, Debug)]
pub struct Elaborated {
    pub decls: Vec<AnnotatedDecl>,
    pub data: DataEnv,
    pub warnings: Vec<Warning>,
    pub infix: InfixEnv,
    /// Number of inference variables issued.
    pub tyvar_counter: u32,
}

impl Elaborated {
    /// All annotations of the unit in one table (node ids are unique).
    pub fn all_annotations(&self) -> Annotations {
        let mut out = Annotations::default();
        for d in &self.decls {
            out.merge(d.ann.clone());
        }
        out
    }
}

/// Elaborate a whole compilation unit.
pub fn elaborate(program: &Program, infix: &InfixEnv) -> Result<Elaborated> {
    let mut el = Elab::new();
    let mut env = Env::initial();
    let mut decls = Vec::new();
    for dec in program {
        let mut d = dec.clone();
        el.ann = Annotations::default();
        let delta = el.dec(&env, &mut d, "")?;
        env.extend(&delta);
        el.finish_top_level()?;
        let mut ann = std::mem::take(&mut el.ann);
        exhaust::check_dec(&d, &mut ann, &el.data, &mut el.warnings);
        decls.push(AnnotatedDecl { decl: d, ann });
    }
    Ok(Elaborated {
        decls,
        data: el.data,
        warnings: el.warnings,
        infix: infix.clone(),
        tyvar_counter: el.subst.counter(),
    })
}

pub(crate) struct Elab {
    pub(crate) subst: Subst,
    level: u32,
    pub(crate) data: DataEnv,
    next_stamp: u32,
    /// Current annotation sink.
    pub(crate) ann: Annotations,
    pub(crate) warnings: Vec<Warning>,
    /// Explicit type variables in scope.
    tyvars: BTreeSet<String>,
    /// Overloaded operator instances awaiting defaulting.
    overload_sites: Vec<TyVarId>,
    /// Flexible records awaiting resolution.
    flex_sites: Vec<(TyVarId, Span)>,
}

impl Elab {
    fn new() -> Self {
        Elab {
            subst: Subst::new(),
            level: 0,
            data: DataEnv::default(),
            next_stamp: 1,
            ann: Annotations::default(),
            warnings: Vec::new(),
            tyvars: BTreeSet::new(),
            overload_sites: Vec::new(),
            flex_sites: Vec::new(),
        }
    }

    fn stamp(&mut self) -> u32 {
        let s = self.next_stamp;
        self.next_stamp += 1;
        s
    }

    fn fresh(&mut self) -> SemType {
        self.subst.fresh(self.level)
    }

    fn enter(&mut self) {
        self.level += 1;
    }

    fn exit(&mut self) {
        self.level -= 1;
    }

    fn record(&mut self, id: NodeId, t: &SemType) {
        self.ann.types.insert(id, t.clone());
    }

    fn unify_at(&mut self, span: Span, a: &SemType, b: &SemType, what: &str) -> Result<()> {
        self.subst.unify(a, b).map_err(|e| self.type_error(span, e, what))
    }

    fn type_error(&self, span: Span, e: UnifyError, what: &str) -> Error {
        Error::ty(span, format!("{what}: {e}"))
    }

    /// Run `f` with a throwaway annotation sink.
    fn scratch<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let saved = std::mem::take(&mut self.ann);
        let saved_warnings = self.warnings.len();
        let r = f(self);
        self.ann = saved;
        self.warnings.truncate(saved_warnings);
        r
    }

    fn instantiate(&mut self, s: &TypeScheme) -> SemType {
        self.instantiate_with(s, |_| None)
    }

    /// Instantiate with fresh variables; `constraint` supplies constraints
    /// for named variables.
    fn instantiate_with(
        &mut self,
        s: &TypeScheme,
        constraint: impl Fn(&str) -> Option<crate::basis::Constraint>,
    ) -> SemType {
        let body = self.subst.apply(&s.body);
        let mut map: BTreeMap<SemType, SemType> = BTreeMap::new();
        for v in &s.vars {
            let mut st = VarState { level: self.level, ..VarState::default() };
            match v {
                SemType::Var(id) => st.eq = self.subst.state(*id).eq,
                SemType::Named(n) => match constraint(n) {
                    Some(crate::basis::Constraint::Equality) => st.eq = true,
                    Some(crate::basis::Constraint::Overloaded(o)) => st.overload = Some(o),
                    None => {}
                },
                _ => {}
            }
            let has_overload = st.overload.is_some();
            let fresh = self.subst.fresh_with(st);
            if has_overload {
                if let SemType::Var(id) = fresh {
                    self.overload_sites.push(id);
                }
            }
            map.insert(v.clone(), fresh);
        }
        body.map(&mut |t| map.get(t).cloned())
    }

    /// Unbound variables of `t` (after substitution) created at a deeper
    /// level than the current one.
    fn local_vars(&self, t: &SemType) -> Vec<TyVarId> {
        let t = self.subst.apply(t);
        let mut out = Vec::new();
        t.visit(&mut |x| {
            if let SemType::Var(v) = x {
                if self.subst.state(*v).level > self.level && !out.contains(v) {
                    out.push(*v);
                }
            }
        });
        out
    }

    /// Default overloaded variables and reject unresolved flexible records
    /// whose level is deeper than the current one.
    fn settle(&mut self, all: bool) -> Result<()> {
        let level = self.level;
        let deep = |s: &Subst, v: TyVarId| all || s.state(v).level > level;
        let sites = std::mem::take(&mut self.overload_sites);
        let mut keep = Vec::new();
        for v in sites {
            if let SemType::Var(u) = self.subst.shallow(&SemType::Var(v)) {
                if deep(&self.subst, u) {
                    self.subst.default_overload(u);
                } else {
                    keep.push(v);
                }
            }
        }
        self.overload_sites = keep;
        let sites = std::mem::take(&mut self.flex_sites);
        let mut keep = Vec::new();
        for (v, span) in sites {
            if let SemType::Var(u) = self.subst.shallow(&SemType::Var(v)) {
                if self.subst.state(u).flex.is_some() {
                    if deep(&self.subst, u) {
                        return Err(Error::ty(
                            span,
                            "unresolved flexible record type: the full record type must be inferable",
                        ));
                    }
                    keep.push((v, span));
                }
            }
        }
        self.flex_sites = keep;
        Ok(())
    }

    /// Generalize `t` at the current level. `named` lists explicit type
    /// variables bound by the enclosing declaration; `value` is the value
    /// restriction verdict.
    fn generalize(&mut self, t: &SemType, named: &[String], value: bool, span: Span) -> Result<TypeScheme> {
        self.settle(false)?;
        let body = self.subst.apply(t);
        let locals = self.local_vars(&body);
        if !value {
            for v in &locals {
                self.subst.set_level(*v, self.level);
            }
            if body.tyvars().iter().any(|v| matches!(v, SemType::Named(n) if named.contains(n))) {
                return Err(Error::ty(span, "explicit type variable cannot be generalized (value restriction)"));
            }
            return Ok(TypeScheme::mono(body));
        }
        let vars = body
            .tyvars()
            .into_iter()
            .filter(|v| match v {
                SemType::Var(id) => locals.contains(id),
                SemType::Named(n) => named.contains(n),
                _ => false,
            })
            .collect();
        Ok(TypeScheme { vars, body })
    }

    /// Default remaining overloads, check flexible records and apply the
    /// substitution to the current sink.
    fn finish_top_level(&mut self) -> Result<()> {
        self.settle(true)?;
        let s = &self.subst;
        for t in self.ann.types.values_mut() {
            *t = s.apply(t);
        }
        for sc in self.ann.schemes.values_mut() {
            sc.body = s.apply(&sc.body);
            sc.vars = sc.vars.iter().map(|v| s.apply(v)).collect();
        }
        for c in self.ann.contracts.values_mut() {
            for (_, t) in c.vars.iter_mut() {
                *t = s.apply(t);
            }
        }
        Ok(())
    }

    fn fresh_flex(&mut self, fields: BTreeMap<String, SemType>, span: Span) -> SemType {
        let t = self.fresh();
        if let SemType::Var(v) = t {
            self.subst.set_flex(v, fields);
            self.flex_sites.push((v, span));
        }
        t
    }
}

pub(crate) fn unsupported(span: Span, message: impl Into<String>) -> Error {
    Error::unsupported(span, Stage::Elaborate, message)
}

#[cfg(test)]
mod tests;
