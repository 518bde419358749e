//! Static environments.

use crate::basis::{self, BasisEntry, Constraint};
use crate::frontend::ast::{FunctorBind, LongId, SigExp, Ty, TyKind};
use crate::frontend::{parser::parse_type, tokenize};
use crate::types::{SemType, TypeScheme};
use std::collections::BTreeMap;
use std::rc::Rc;

/// Which constructor a value identifier denotes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConRef {
    /// `true`, `false`, `nil`, `::`, `SOME`, `NONE`
    Builtin(&'static str),
    Data {
        stamp: u32,
    },
}

#[derive(Clone, Debug)]
pub enum ValKind {
    Var,
    Con { con: ConRef, has_arg: bool },
    Basis(&'static BasisEntry),
}

#[derive(Clone, Debug)]
pub struct ValInfo {
    pub scheme: TypeScheme,
    pub kind: ValKind,
}

impl ValInfo {
    pub fn var(scheme: TypeScheme) -> Self {
        ValInfo { scheme, kind: ValKind::Var }
    }

    pub fn is_con(&self) -> bool {
        matches!(self.kind, ValKind::Con { .. })
    }
}

#[derive(Clone, Debug)]
pub enum TyCon {
    Prim { ty: fn(Vec<SemType>) -> SemType, arity: usize },
    Abbrev { params: Vec<String>, body: SemType },
    Data { stamp: u32, name: String, arity: usize },
}

impl TyCon {
    pub fn arity(&self) -> usize {
        match self {
            TyCon::Prim { arity, .. } | TyCon::Data { arity, .. } => *arity,
            TyCon::Abbrev { params, .. } => params.len(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SigInfo {
    pub sig: SigExp,
    pub env: Env,
}

#[derive(Clone, Debug)]
pub struct FunctorInfo {
    pub bind: FunctorBind,
    pub env: Env,
}

#[derive(Clone, Debug, Default)]
pub struct Env {
    pub values: BTreeMap<String, ValInfo>,
    pub types: BTreeMap<String, TyCon>,
    pub structures: BTreeMap<String, Rc<Env>>,
    pub signatures: BTreeMap<String, Rc<SigInfo>>,
    pub functors: BTreeMap<String, Rc<FunctorInfo>>,
}

impl Env {
    /// Later bindings shadow earlier ones.
    pub fn extend(&mut self, other: &Env) {
        self.values.extend(other.values.iter().map(|(k, v)| (k.clone(), v.clone())));
        self.types.extend(other.types.iter().map(|(k, v)| (k.clone(), v.clone())));
        self.structures.extend(other.structures.iter().map(|(k, v)| (k.clone(), v.clone())));
        self.signatures.extend(other.signatures.iter().map(|(k, v)| (k.clone(), v.clone())));
        self.functors.extend(other.functors.iter().map(|(k, v)| (k.clone(), v.clone())));
    }

    /// Environment reached by following the qualifiers of `id`.
    pub fn qualified(&self, id: &LongId) -> Option<&Env> {
        let mut env = self;
        for q in &id.qualifiers {
            env = env.structures.get(q)?;
        }
        Some(env)
    }

    pub fn value(&self, id: &LongId) -> Option<&ValInfo> {
        self.qualified(id)?.values.get(&id.name)
    }

    pub fn tycon(&self, id: &LongId) -> Option<&TyCon> {
        self.qualified(id)?.types.get(&id.name)
    }

    /// The initial basis: primitive types, built-in constructors and the
    /// supported library values.
    pub fn initial() -> Env {
        let mut env = Env::default();
        type Prim = (&'static str, usize, fn(Vec<SemType>) -> SemType);
        let prims: [Prim; 8] = [
            ("int", 0, |_| SemType::Int),
            ("real", 0, |_| SemType::Real),
            ("string", 0, |_| SemType::Str),
            ("char", 0, |_| SemType::Char),
            ("bool", 0, |_| SemType::Bool),
            ("unit", 0, |_| SemType::Unit),
            ("list", 1, |mut a| SemType::list(a.remove(0))),
            ("option", 1, |mut a| SemType::option(a.remove(0))),
        ];
        for (name, arity, ty) in prims {
            env.types.insert(name.into(), TyCon::Prim { ty, arity });
        }

        let a = || SemType::Named("a".into());
        let poly = |body| TypeScheme { vars: vec![a()], body };
        let cons: [(&'static str, TypeScheme, bool); 6] = [
            ("true", TypeScheme::mono(SemType::Bool), false),
            ("false", TypeScheme::mono(SemType::Bool), false),
            ("nil", poly(SemType::list(a())), false),
            ("::", poly(SemType::arrow(SemType::Tuple(vec![a(), SemType::list(a())]), SemType::list(a()))), true),
            ("SOME", poly(SemType::arrow(a(), SemType::option(a()))), true),
            ("NONE", poly(SemType::option(a())), false),
        ];
        for (name, scheme, has_arg) in cons {
            let kind = ValKind::Con { con: ConRef::Builtin(name), has_arg };
            env.values.insert(name.into(), ValInfo { scheme, kind });
        }

        let mut structures: BTreeMap<&str, Env> = BTreeMap::new();
        for entry in basis::BASIS {
            let info = ValInfo { scheme: basis_scheme(entry), kind: ValKind::Basis(entry) };
            match entry.sml.split_once('.') {
                Some((s, x)) => {
                    structures.entry(s).or_default().values.insert(x.into(), info);
                }
                None => {
                    env.values.insert(entry.sml.into(), info);
                }
            }
        }
        for (name, s) in structures {
            env.structures.insert(name.into(), Rc::new(s));
        }
        env
    }
}

/// Scheme of a basis entry; every type variable is quantified and `'n`/`'e`
/// carry the entry's constraint at instantiation.
pub fn basis_scheme(entry: &BasisEntry) -> TypeScheme {
    let toks = tokenize(entry.ty).expect("basis type lexes");
    let ty = parse_type(&toks).expect("basis type parses");
    let body = syntactic_type(&ty);
    let vars = body.tyvars();
    TypeScheme { vars, body }
}

/// Constraint attached to the named type variable `v` of `entry`.
pub fn basis_constraint(entry: &BasisEntry, v: &str) -> Option<Constraint> {
    match v {
        "n" | "e" => entry.constraint,
        _ => None,
    }
}

/// Conversion of basis type syntax, which only uses primitive types.
fn syntactic_type(t: &Ty) -> SemType {
    match &t.kind {
        TyKind::Var(a) => SemType::Named(a.clone()),
        TyKind::Con(args, id) => {
            let mut args: Vec<SemType> = args.iter().map(syntactic_type).collect();
            match id.name.as_str() {
                "int" => SemType::Int,
                "real" => SemType::Real,
                "string" => SemType::Str,
                "char" => SemType::Char,
                "bool" => SemType::Bool,
                "unit" => SemType::Unit,
                "list" => SemType::list(args.remove(0)),
                "option" => SemType::option(args.remove(0)),
                other => panic!("basis type uses unknown constructor {other}"),
            }
        }
        TyKind::Tuple(ts) => SemType::Tuple(ts.iter().map(syntactic_type).collect()),
        TyKind::Arrow(a, b) => SemType::arrow(syntactic_type(a), syntactic_type(b)),
        TyKind::Record(fs) => SemType::Record(fs.iter().map(|(l, t)| (l.clone(), syntactic_type(t))).collect()),
    }
}
