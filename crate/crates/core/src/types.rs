//! Semantic types, type schemes and the unifier.

use std::collections::BTreeMap;
use std::fmt;

/// Inference variable identifier; printed as `_'N`.
pub type TyVarId = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemType {
    /// Unification variable.
    Var(TyVarId),
    /// Explicit source type variable `'a` (rigid while in scope).
    Named(String),
    Int,
    Real,
    Str,
    Char,
    Bool,
    Unit,
    /// Arity >= 2.
    Tuple(Vec<SemType>),
    Arrow(Box<SemType>, Box<SemType>),
    List(Box<SemType>),
    Option(Box<SemType>),
    /// Labels kept in sorted order by the map.
    Record(BTreeMap<String, SemType>),
    /// User datatype or abstract type. `stamp` identifies the declaration;
    /// `name` is the path used to refer to it.
    Data {
        stamp: u32,
        name: String,
        args: Vec<SemType>,
    },
    /// A type abbreviation kept for printing; `expansion` is authoritative.
    Abbrev {
        name: String,
        args: Vec<SemType>,
        expansion: Box<SemType>,
    },
}

impl SemType {
    pub fn arrow(a: SemType, b: SemType) -> SemType {
        SemType::Arrow(Box::new(a), Box::new(b))
    }

    pub fn list(t: SemType) -> SemType {
        SemType::List(Box::new(t))
    }

    pub fn option(t: SemType) -> SemType {
        SemType::Option(Box::new(t))
    }

    /// Tuple of arity >= 2, unit for 0 and the element itself for 1.
    pub fn tuple(mut items: Vec<SemType>) -> SemType {
        match items.len() {
            0 => SemType::Unit,
            1 => items.pop().expect("one item"),
            _ => SemType::Tuple(items),
        }
    }

    /// Strip abbreviations at the head.
    pub fn head(&self) -> &SemType {
        match self {
            SemType::Abbrev { expansion, .. } => expansion.head(),
            t => t,
        }
    }

    /// Strip abbreviations everywhere.
    pub fn expand(&self) -> SemType {
        self.map(&mut |t| match t {
            SemType::Abbrev { expansion, .. } => Some(expansion.expand()),
            _ => None,
        })
    }

    /// Bottom-up rewriting helper: `f` may replace a node outright.
    pub fn map(&self, f: &mut impl FnMut(&SemType) -> Option<SemType>) -> SemType {
        if let Some(t) = f(self) {
            return t;
        }
        match self {
            SemType::Tuple(ts) => SemType::Tuple(ts.iter().map(|t| t.map(f)).collect()),
            SemType::Arrow(a, b) => SemType::arrow(a.map(f), b.map(f)),
            SemType::List(t) => SemType::list(t.map(f)),
            SemType::Option(t) => SemType::option(t.map(f)),
            SemType::Record(fs) => SemType::Record(fs.iter().map(|(k, v)| (k.clone(), v.map(f))).collect()),
            SemType::Data { stamp, name, args } => {
                SemType::Data { stamp: *stamp, name: name.clone(), args: args.iter().map(|t| t.map(f)).collect() }
            }
            SemType::Abbrev { name, args, expansion } => SemType::Abbrev {
                name: name.clone(),
                args: args.iter().map(|t| t.map(f)).collect(),
                expansion: Box::new(expansion.map(f)),
            },
            t => t.clone(),
        }
    }

    pub fn visit(&self, f: &mut impl FnMut(&SemType)) {
        f(self);
        match self {
            SemType::Tuple(ts) => ts.iter().for_each(|t| t.visit(f)),
            SemType::Arrow(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            SemType::List(t) | SemType::Option(t) => t.visit(f),
            SemType::Record(fs) => fs.values().for_each(|t| t.visit(f)),
            SemType::Data { args, .. } => args.iter().for_each(|t| t.visit(f)),
            SemType::Abbrev { args, expansion, .. } => {
                args.iter().for_each(|t| t.visit(f));
                expansion.visit(f);
            }
            _ => {}
        }
    }

    /// Free variables and named type variables in first-occurrence order.
    /// Abbreviations contribute through their arguments only.
    pub fn tyvars(&self) -> Vec<SemType> {
        let mut out = Vec::new();
        self.collect_tyvars(&mut out);
        out
    }

    fn collect_tyvars(&self, out: &mut Vec<SemType>) {
        match self {
            SemType::Var(_) | SemType::Named(_) => {
                if !out.contains(self) {
                    out.push(self.clone());
                }
            }
            SemType::Tuple(ts) => ts.iter().for_each(|t| t.collect_tyvars(out)),
            SemType::Arrow(a, b) => {
                a.collect_tyvars(out);
                b.collect_tyvars(out);
            }
            SemType::List(t) | SemType::Option(t) => t.collect_tyvars(out),
            SemType::Record(fs) => fs.values().for_each(|t| t.collect_tyvars(out)),
            SemType::Data { args, .. } => args.iter().for_each(|t| t.collect_tyvars(out)),
            SemType::Abbrev { args, expansion, .. } => {
                args.iter().for_each(|t| t.collect_tyvars(out));
                // an abbreviation may drop variables that its expansion keeps
                // only if the abbreviation is non-parametric in them
                expansion.collect_tyvars(out);
            }
            _ => {}
        }
    }

    pub fn has_tyvars(&self) -> bool {
        !self.tyvars().is_empty()
    }

    /// Substitute named type variables.
    pub fn subst_named(&self, map: &BTreeMap<String, SemType>) -> SemType {
        self.map(&mut |t| match t {
            SemType::Named(n) => map.get(n).cloned(),
            _ => None,
        })
    }

    /// Whether values of this type admit SML equality.
    pub fn admits_equality(&self) -> bool {
        match self.head() {
            SemType::Real | SemType::Arrow(..) => false,
            SemType::Tuple(ts) => ts.iter().all(SemType::admits_equality),
            SemType::List(t) | SemType::Option(t) => t.admits_equality(),
            SemType::Record(fs) => fs.values().all(SemType::admits_equality),
            _ => true,
        }
    }
}

fn needs_parens_as_arg(t: &SemType) -> bool {
    matches!(t, SemType::Tuple(_) | SemType::Arrow(..))
}

impl fmt::Display for SemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemType::Var(n) => write!(f, "_'{n}"),
            SemType::Named(n) => write!(f, "'{n}"),
            SemType::Int => f.write_str("int"),
            SemType::Real => f.write_str("real"),
            SemType::Str => f.write_str("string"),
            SemType::Char => f.write_str("char"),
            SemType::Bool => f.write_str("bool"),
            SemType::Unit => f.write_str("unit"),
            SemType::Tuple(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    if needs_parens_as_arg(t) {
                        write!(f, "({t})")?;
                    } else {
                        write!(f, "{t}")?;
                    }
                }
                Ok(())
            }
            SemType::Arrow(a, b) => {
                if matches!(**a, SemType::Arrow(..)) {
                    write!(f, "({a}) -> {b}")
                } else {
                    write!(f, "{a} -> {b}")
                }
            }
            SemType::List(t) => fmt_app(f, std::slice::from_ref(&**t), "list"),
            SemType::Option(t) => fmt_app(f, std::slice::from_ref(&**t), "option"),
            SemType::Record(fs) => {
                f.write_str("{")?;
                for (i, (k, v)) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k}: {v}")?;
                }
                f.write_str("}")
            }
            SemType::Data { name, args, .. } | SemType::Abbrev { name, args, .. } => fmt_app(f, args, name),
        }
    }
}

fn fmt_app(f: &mut fmt::Formatter<'_>, args: &[SemType], name: &str) -> fmt::Result {
    match args {
        [] => f.write_str(name),
        [a] if needs_parens_as_arg(a) => write!(f, "({a}) {name}"),
        [a] => write!(f, "{a} {name}"),
        _ => {
            f.write_str("(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ") {name}")
        }
    }
}

/// Quantified type: `vars` are `Var` or `Named` entries of `body`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeScheme {
    pub vars: Vec<SemType>,
    pub body: SemType,
}

impl TypeScheme {
    pub fn mono(body: SemType) -> Self {
        TypeScheme { vars: Vec::new(), body }
    }

    pub fn is_polymorphic(&self) -> bool {
        !self.vars.is_empty()
    }
}

impl fmt::Display for TypeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.vars.is_empty() {
            f.write_str("forall")?;
            for v in &self.vars {
                write!(f, " {v}")?;
            }
            f.write_str(". ")?;
        }
        write!(f, "{}", self.body)
    }
}

/// A declared datatype (or an abstract type, which has no constructors).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataInfo {
    pub stamp: u32,
    /// Full path from the top level, e.g. `S.t`.
    pub name: String,
    pub params: Vec<String>,
    /// Constructor names with payload types over `Named(param)`.
    pub cons: Vec<(String, Option<SemType>)>,
    pub is_abstract: bool,
}

/// All datatypes of a compilation unit, by stamp.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DataEnv {
    pub types: BTreeMap<u32, DataInfo>,
}

impl DataEnv {
    pub fn get(&self, stamp: u32) -> Option<&DataInfo> {
        self.types.get(&stamp)
    }

    pub fn insert(&mut self, info: DataInfo) {
        self.types.insert(info.stamp, info);
    }

    /// Payload type of constructor `con` at the given type arguments.
    pub fn payload(&self, stamp: u32, con: &str, args: &[SemType]) -> Option<Option<SemType>> {
        let info = self.get(stamp)?;
        let (_, payload) = info.cons.iter().find(|(c, _)| c == con)?;
        let map: BTreeMap<String, SemType> = info.params.iter().cloned().zip(args.iter().cloned()).collect();
        Some(payload.as_ref().map(|t| t.subst_named(&map)))
    }
}

/// Operator overloading classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Overload {
    /// int, real
    Num,
    /// int, real, string, char
    NumText,
}

impl Overload {
    fn admits(self, t: &SemType) -> bool {
        match self {
            Overload::Num => matches!(t, SemType::Int | SemType::Real),
            Overload::NumText => {
                matches!(t, SemType::Int | SemType::Real | SemType::Str | SemType::Char)
            }
        }
    }

    fn meet(self, other: Overload) -> Overload {
        if self == Overload::Num || other == Overload::Num {
            Overload::Num
        } else {
            Overload::NumText
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VarState {
    pub binding: Option<SemType>,
    pub level: u32,
    /// Known fields of a flexible record (`{lab = p, ...}`).
    pub flex: Option<BTreeMap<String, SemType>>,
    pub overload: Option<Overload>,
    /// Must be instantiated with an equality type.
    pub eq: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum UnifyError {
    #[error("circular type: {0} occurs in {1}")]
    Occurs(String, String),
    #[error("type mismatch: {0} vs {1}")]
    Clash(String, String),
    #[error("record label mismatch: {0} vs {1}")]
    Labels(String, String),
    #[error("{0} is not an equality type")]
    NotEquality(String),
    #[error("overloaded operator used at type {0}")]
    Overload(String),
}

/// Substitution over inference variables plus per-variable constraints.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Subst {
    vars: Vec<VarState>,
}

impl Subst {
    pub fn new() -> Self {
        Subst::default()
    }

    pub fn fresh(&mut self, level: u32) -> SemType {
        self.fresh_with(VarState { level, ..VarState::default() })
    }

    pub fn fresh_with(&mut self, st: VarState) -> SemType {
        self.vars.push(st);
        SemType::Var(self.vars.len() as TyVarId)
    }

    /// Number of variables issued so far.
    pub fn counter(&self) -> u32 {
        self.vars.len() as u32
    }

    fn st(&self, v: TyVarId) -> &VarState {
        &self.vars[v as usize - 1]
    }

    fn st_mut(&mut self, v: TyVarId) -> &mut VarState {
        &mut self.vars[v as usize - 1]
    }

    pub fn state(&self, v: TyVarId) -> &VarState {
        self.st(v)
    }

    pub fn binding(&self, v: TyVarId) -> Option<&SemType> {
        self.st(v).binding.as_ref()
    }

    pub fn set_level(&mut self, v: TyVarId, level: u32) {
        self.st_mut(v).level = level;
    }

    /// Follow variable bindings at the head.
    pub fn shallow(&self, t: &SemType) -> SemType {
        let mut t = t.clone();
        while let SemType::Var(v) = t {
            match self.binding(v) {
                Some(b) => t = b.clone(),
                None => break,
            }
        }
        t
    }

    /// Apply the substitution everywhere.
    pub fn apply(&self, t: &SemType) -> SemType {
        t.map(&mut |t| match t {
            SemType::Var(v) => self.binding(*v).map(|b| self.apply(b)),
            _ => None,
        })
    }

    fn occurs(&self, v: TyVarId, t: &SemType) -> bool {
        let t = self.apply(t);
        let mut found = false;
        t.visit(&mut |x| {
            if *x == SemType::Var(v) {
                found = true;
            }
        });
        found
    }

    /// Lower the level of every variable in `t` to at most `level`.
    fn adjust_levels(&mut self, t: &SemType, level: u32) {
        let t = self.apply(t);
        let mut vs = Vec::new();
        t.visit(&mut |x| {
            if let SemType::Var(v) = x {
                vs.push(*v);
            }
        });
        for v in vs {
            let st = self.st_mut(v);
            if st.level > level {
                st.level = level;
            }
            if let Some(flex) = st.flex.clone() {
                for ft in flex.values() {
                    self.adjust_levels(ft, level);
                }
            }
        }
    }

    pub fn unify(&mut self, a: &SemType, b: &SemType) -> Result<(), UnifyError> {
        let a = self.shallow(a);
        let b = self.shallow(b);
        match (&a, &b) {
            (SemType::Var(x), SemType::Var(y)) if x == y => Ok(()),
            (SemType::Var(x), SemType::Var(y)) => self.merge_vars(*x, *y),
            (SemType::Var(x), t) | (t, SemType::Var(x)) => self.bind(*x, t),
            (SemType::Abbrev { expansion, .. }, other) | (other, SemType::Abbrev { expansion, .. }) => {
                let e = (**expansion).clone();
                let o = other.clone();
                self.unify(&e, &o)
            }
            (SemType::Named(x), SemType::Named(y)) if x == y => Ok(()),
            (SemType::Int, SemType::Int)
            | (SemType::Real, SemType::Real)
            | (SemType::Str, SemType::Str)
            | (SemType::Char, SemType::Char)
            | (SemType::Bool, SemType::Bool)
            | (SemType::Unit, SemType::Unit) => Ok(()),
            (SemType::Tuple(xs), SemType::Tuple(ys)) if xs.len() == ys.len() => {
                for (x, y) in xs.iter().zip(ys) {
                    self.unify(x, y)?;
                }
                Ok(())
            }
            (SemType::Arrow(a1, r1), SemType::Arrow(a2, r2)) => {
                self.unify(a1, a2)?;
                self.unify(r1, r2)
            }
            (SemType::List(x), SemType::List(y)) | (SemType::Option(x), SemType::Option(y)) => self.unify(x, y),
            (SemType::Record(xs), SemType::Record(ys)) => {
                if !xs.keys().eq(ys.keys()) {
                    return Err(UnifyError::Labels(self.show(&a), self.show(&b)));
                }
                for (x, y) in xs.values().zip(ys.values()) {
                    self.unify(x, y)?;
                }
                Ok(())
            }
            (SemType::Data { stamp: s1, args: a1, .. }, SemType::Data { stamp: s2, args: a2, .. })
                if s1 == s2 && a1.len() == a2.len() =>
            {
                for (x, y) in a1.iter().zip(a2) {
                    self.unify(x, y)?;
                }
                Ok(())
            }
            _ => Err(UnifyError::Clash(self.show(&a), self.show(&b))),
        }
    }

    fn merge_vars(&mut self, x: TyVarId, y: TyVarId) -> Result<(), UnifyError> {
        let sx = self.st(x).clone();
        let sy = self.st(y).clone();
        let level = sx.level.min(sy.level);
        let overload = match (sx.overload, sy.overload) {
            (Some(a), Some(b)) => Some(a.meet(b)),
            (a, b) => a.or(b),
        };
        let flex = match (sx.flex, sy.flex) {
            (Some(fx), Some(fy)) => {
                let mut merged = fx.clone();
                for (k, ty) in fy {
                    match fx.get(&k) {
                        Some(tx) => self.unify(tx, &ty)?,
                        None => {
                            merged.insert(k, ty);
                        }
                    }
                }
                Some(merged)
            }
            (a, b) => a.or(b),
        };
        if flex.is_some() && overload.is_some() {
            return Err(UnifyError::Overload("a record".into()));
        }
        let eq = sx.eq || sy.eq;
        let st = self.st_mut(y);
        st.level = level;
        st.overload = overload;
        st.flex = flex;
        st.eq = eq;
        self.st_mut(x).binding = Some(SemType::Var(y));
        Ok(())
    }

    fn bind(&mut self, v: TyVarId, t: &SemType) -> Result<(), UnifyError> {
        if self.occurs(v, t) {
            return Err(UnifyError::Occurs(format!("_'{v}"), self.show(t)));
        }
        let st = self.st(v).clone();
        let head = t.head().clone();
        if let Some(class) = st.overload {
            let h = self.shallow(&head);
            if let SemType::Var(_) = h {
            } else if !class.admits(&h) {
                return Err(UnifyError::Overload(self.show(t)));
            }
        }
        if st.eq && !self.apply(t).admits_equality() {
            return Err(UnifyError::NotEquality(self.show(t)));
        }
        if let Some(flex) = &st.flex {
            match self.shallow(&head) {
                SemType::Record(fields) => {
                    for (k, ft) in flex {
                        match fields.get(k) {
                            Some(rt) => self.unify(ft, rt)?,
                            None => {
                                return Err(UnifyError::Labels(self.show(&SemType::Record(flex.clone())), self.show(t)))
                            }
                        }
                    }
                }
                other => {
                    return Err(UnifyError::Clash(
                        format!("{{{} ...}}", flex.keys().cloned().collect::<Vec<_>>().join(", ")),
                        self.show(&other),
                    ))
                }
            }
        }
        if st.eq {
            self.mark_eq(t);
        }
        self.adjust_levels(t, st.level);
        self.st_mut(v).binding = Some(t.clone());
        Ok(())
    }

    /// Propagate an equality requirement onto the variables of `t`.
    fn mark_eq(&mut self, t: &SemType) {
        let t = self.apply(t);
        let mut vs = Vec::new();
        t.visit(&mut |x| {
            if let SemType::Var(v) = x {
                vs.push(*v);
            }
        });
        for v in vs {
            self.st_mut(v).eq = true;
        }
    }

    /// Set the overload class of an unbound variable.
    pub fn constrain_overload(&mut self, v: TyVarId, class: Overload) {
        self.st_mut(v).overload = Some(class);
    }

    pub fn constrain_eq(&mut self, v: TyVarId) {
        self.st_mut(v).eq = true;
    }

    pub fn set_flex(&mut self, v: TyVarId, fields: BTreeMap<String, SemType>) {
        self.st_mut(v).flex = Some(fields);
    }

    /// Bind an overloaded variable to its default type (int).
    pub fn default_overload(&mut self, v: TyVarId) -> bool {
        if self.st(v).binding.is_none() && self.st(v).overload.is_some() {
            self.st_mut(v).binding = Some(SemType::Int);
            true
        } else {
            false
        }
    }

    pub fn show(&self, t: &SemType) -> String {
        self.apply(t).to_string()
    }
}

/// Most general unifier of `a` and `b` extending `subst`.
pub fn unify(a: &SemType, b: &SemType, subst: &Subst) -> Result<Subst, UnifyError> {
    let mut s = subst.clone();
    s.unify(a, b)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(fields: &[(&str, SemType)]) -> SemType {
        SemType::Record(fields.iter().map(|(k, v)| (k.to_string(), v.clone())).collect())
    }

    #[test]
    fn list_var_binds_to_int() {
        let mut s = Subst::new();
        let a = s.fresh(0);
        let s2 = unify(&SemType::list(a.clone()), &SemType::list(SemType::Int), &s).unwrap();
        assert_eq!(s2.apply(&a), SemType::Int);
    }

    #[test]
    fn clash() {
        let s = Subst::new();
        assert!(matches!(unify(&SemType::Int, &SemType::Str, &s), Err(UnifyError::Clash(..))));
    }

    #[test]
    fn records_unify_by_sorted_labels() {
        let mut s = Subst::new();
        let a = s.fresh(0);
        let b = s.fresh(0);
        let l = rec(&[("name", a.clone()), ("age", SemType::Int)]);
        let r = rec(&[("age", b.clone()), ("name", SemType::Str)]);
        let s2 = unify(&l, &r, &s).unwrap();
        // oracle: the substitution makes both sides identical
        assert_eq!(s2.apply(&l), s2.apply(&r));
        assert_eq!(s2.apply(&a), SemType::Str);
        assert_eq!(s2.apply(&b), SemType::Int);
    }

    #[test]
    fn occurs_check() {
        let mut s = Subst::new();
        let a = s.fresh(0);
        assert!(matches!(unify(&a, &SemType::list(a.clone()), &s), Err(UnifyError::Occurs(..))));
    }

    #[test]
    fn label_mismatch() {
        let s = Subst::new();
        let l = rec(&[("a", SemType::Int)]);
        let r = rec(&[("b", SemType::Int)]);
        assert!(matches!(unify(&l, &r, &s), Err(UnifyError::Labels(..))));
    }

    #[test]
    fn flex_record_resolves_against_full_record() {
        let mut s = Subst::new();
        let x = s.fresh(0);
        let v = s.fresh(0);
        let SemType::Var(id) = v else { unreachable!() };
        s.set_flex(id, [("age".to_string(), x.clone())].into_iter().collect());
        let full = rec(&[("age", SemType::Int), ("name", SemType::Str)]);
        s.unify(&v, &full).unwrap();
        assert_eq!(s.apply(&x), SemType::Int);
        assert_eq!(s.apply(&v), full);
    }

    #[test]
    fn overload_rejects_bool() {
        let mut s = Subst::new();
        let v = s.fresh(0);
        let SemType::Var(id) = v else { unreachable!() };
        s.constrain_overload(id, Overload::Num);
        assert!(s.clone().unify(&v, &SemType::Bool).is_err());
        assert!(s.unify(&v, &SemType::Real).is_ok());
    }

    #[test]
    fn real_is_not_an_equality_type() {
        let mut s = Subst::new();
        let v = s.fresh(0);
        let SemType::Var(id) = v else { unreachable!() };
        s.constrain_eq(id);
        assert!(matches!(s.unify(&v, &SemType::Real), Err(UnifyError::NotEquality(_))));
    }

    #[test]
    fn abbreviation_is_transparent() {
        let mut s = Subst::new();
        let r = rec(&[("a", SemType::Int)]);
        let ab = SemType::Abbrev { name: "r".into(), args: vec![], expansion: Box::new(r.clone()) };
        let v = s.fresh(0);
        s.unify(&v, &ab).unwrap();
        s.unify(&v, &r).unwrap();
        assert_eq!(s.apply(&v), ab);
    }

    #[test]
    fn display() {
        let t = SemType::arrow(
            SemType::Tuple(vec![SemType::Int, SemType::list(SemType::Named("a".into()))]),
            SemType::option(SemType::Bool),
        );
        assert_eq!(t.to_string(), "int * 'a list -> bool option");
    }
}
