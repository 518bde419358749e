//! Types and the record context.

use super::Translator;
use crate::frontend::ast::{Ty, TyKind};
use crate::gallina::{NameKind, Sentence, Term};
use crate::types::SemType;
use std::collections::BTreeMap;

/// A declared record type. Field types are stored expanded, over the
/// entry's own type parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct RecordEntry {
    pub name: String,
    /// Module path of the declaration.
    pub path: Vec<String>,
    /// Sorted labels.
    pub labels: Vec<String>,
    /// Field types in label order.
    pub fields: Vec<SemType>,
    pub params: Vec<SemType>,
}

/// Gallina name of a type variable: `_'N` for inference variables and
/// `_a` for the source variable `'a`.
pub(crate) fn tyvar_name(v: &SemType) -> String {
    match v {
        SemType::Var(n) => format!("_'{n}"),
        SemType::Named(a) => format!("_{a}"),
        other => other.to_string(),
    }
}

fn applied(name: String, args: Vec<Term>) -> Term {
    if args.is_empty() {
        Term::Ident(name)
    } else {
        Term::ExplicitApp(name, args)
    }
}

fn prim_name(t: &SemType) -> Option<&'static str> {
    Some(match t {
        SemType::Int => "Z",
        SemType::Real => "real",
        SemType::Str => "string",
        SemType::Char => "char",
        SemType::Bool => "bool",
        SemType::Unit => "unit",
        SemType::List(_) => "list",
        SemType::Option(_) => "option",
        _ => return None,
    })
}

/// One-way matching: instantiate only the variables in `params`.
fn match_type(pat: &SemType, t: &SemType, params: &[SemType], sub: &mut BTreeMap<SemType, SemType>) -> bool {
    if params.contains(pat) {
        if let Some(bound) = sub.get(pat) {
            return bound == t;
        }
        sub.insert(pat.clone(), t.clone());
        return true;
    }
    let all = |a: &[SemType], b: &[SemType], sub: &mut BTreeMap<SemType, SemType>| {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| match_type(x, y, params, sub))
    };
    match (pat, t) {
        (SemType::Tuple(a), SemType::Tuple(b)) => all(a, b, sub),
        (SemType::Arrow(a1, b1), SemType::Arrow(a2, b2)) => {
            match_type(a1, a2, params, sub) && match_type(b1, b2, params, sub)
        }
        (SemType::List(a), SemType::List(b)) | (SemType::Option(a), SemType::Option(b)) => {
            match_type(a, b, params, sub)
        }
        (SemType::Record(a), SemType::Record(b)) => {
            a.keys().eq(b.keys()) && a.values().zip(b.values()).all(|(x, y)| match_type(x, y, params, sub))
        }
        (SemType::Data { stamp: s1, args: a1, .. }, SemType::Data { stamp: s2, args: a2, .. }) => {
            s1 == s2 && all(a1, a2, sub)
        }
        _ => pat == t,
    }
}

impl Translator<'_> {
    /// Name of something declared at module path `at`, as seen from the
    /// current path.
    pub(super) fn relative(&self, at: &[String], name: &str) -> String {
        let common = at.iter().zip(&self.path).take_while(|(a, b)| a == b).count();
        let mut parts: Vec<&str> = at[common..].iter().map(String::as_str).collect();
        parts.push(name);
        parts.join(".")
    }

    fn abbrev_visible(&self, name: &str) -> bool {
        name.contains('.') || self.scopes.iter().any(|s| s.abbrevs.contains(name))
    }

    /// Translate an inferred type.
    pub(super) fn sem_type(&mut self, t: &SemType) -> Term {
        match t {
            SemType::Var(_) | SemType::Named(_) => Term::Ident(tyvar_name(t)),
            SemType::Tuple(ts) => Term::product(ts.iter().map(|x| self.sem_type(x)).collect()),
            SemType::Arrow(a, b) => Term::arrow(self.sem_type(a), self.sem_type(b)),
            SemType::List(x) | SemType::Option(x) => {
                let name = prim_name(t).expect("list or option");
                Term::ExplicitApp(name.into(), vec![self.sem_type(x)])
            }
            SemType::Record(fs) => self.record_type(fs, None).1,
            SemType::Data { name, args, .. } => {
                let mut parts: Vec<String> = name.split('.').map(String::from).collect();
                let last = parts.pop().unwrap_or_default();
                let name = self.relative(&parts, &last);
                let args = args.iter().map(|a| self.sem_type(a)).collect();
                applied(name, args)
            }
            SemType::Abbrev { name, args, expansion } => {
                if self.abbrev_visible(name) {
                    let args = args.iter().map(|a| self.sem_type(a)).collect();
                    applied(name.clone(), args)
                } else {
                    self.sem_type(expansion)
                }
            }
            prim => Term::ident(prim_name(prim).expect("primitive type")),
        }
    }

    /// Translate a written type, keeping the names it uses.
    pub(super) fn ty(&mut self, t: &Ty) -> Term {
        let sem = self.ann.types.get(&t.meta.id).cloned();
        match &t.kind {
            TyKind::Var(a) => Term::Ident(format!("_{a}")),
            TyKind::Con(args, id) => {
                let args = args.iter().map(|a| self.ty(a)).collect();
                let name = match &sem {
                    Some(SemType::Data { .. } | SemType::Abbrev { .. }) | None => id.to_string(),
                    Some(s) => prim_name(s).map_or_else(|| id.to_string(), String::from),
                };
                applied(name, args)
            }
            TyKind::Tuple(ts) => Term::product(ts.iter().map(|x| self.ty(x)).collect()),
            TyKind::Arrow(a, b) => Term::arrow(self.ty(a), self.ty(b)),
            TyKind::Record(fs) => match sem.map(|s| s.expand()) {
                Some(SemType::Record(map)) => {
                    let order: Vec<String> = fs.iter().map(|(l, _)| l.clone()).collect();
                    self.record_type(&map, Some(&order)).1
                }
                _ => Term::Hole,
            },
        }
    }

    /// Find or declare the record type with these fields. Returns the
    /// (relative) record name, which prefixes every field, and the type.
    pub(super) fn record_type(
        &mut self,
        fields: &BTreeMap<String, SemType>,
        order: Option<&[String]>,
    ) -> (String, Term) {
        let labels: Vec<String> = fields.keys().cloned().collect();
        let query: Vec<SemType> = fields.values().map(SemType::expand).collect();
        let found = self.records.iter().find_map(|e| {
            if e.labels != labels {
                return None;
            }
            let mut sub = BTreeMap::new();
            let ok = e.fields.iter().zip(&query).all(|(p, q)| match_type(p, q, &e.params, &mut sub));
            ok.then(|| {
                let args: Vec<SemType> =
                    e.params.iter().map(|p| sub.get(p).cloned().unwrap_or_else(|| p.clone())).collect();
                (self.relative(&e.path, &e.name), args)
            })
        });
        if let Some((name, args)) = found {
            let args = args.iter().map(|a| self.sem_type(a)).collect();
            return (name.clone(), applied(name, args));
        }
        let name = self.names.fresh(NameKind::RecordType);
        let params = SemType::tuple(query.clone()).tyvars();
        let expanded: BTreeMap<&String, &SemType> = labels.iter().zip(&query).collect();
        let order: Vec<String> = order.map_or_else(|| labels.clone(), <[String]>::to_vec);
        let mut decl = Vec::new();
        for l in &order {
            let t = self.sem_type(expanded[l]);
            decl.push((format!("{name}_{l}"), t));
        }
        self.scope().records.push(Sentence::Record {
            name: name.clone(),
            params: params.iter().map(tyvar_name).collect(),
            fields: decl,
        });
        self.records.push(RecordEntry {
            name: name.clone(),
            path: self.path.clone(),
            labels,
            fields: query,
            params: params.clone(),
        });
        let args = params.iter().map(|p| self.sem_type(p)).collect();
        (name.clone(), applied(name, args))
    }

    /// Record name for the (expanded) record type `t`.
    pub(super) fn record_of(&mut self, t: &SemType) -> Option<(String, Vec<String>)> {
        match t.expand() {
            SemType::Record(fs) => {
                let labels = fs.keys().cloned().collect();
                Some((self.record_type(&fs, None).0, labels))
            }
            _ => None,
        }
    }

    /// Record name for a label set, used where only the labels are known.
    pub(super) fn record_prefix_by_labels(&self, labels: &[String]) -> String {
        self.records
            .iter()
            .find(|e| e.labels == labels)
            .map_or_else(|| "rid".to_string(), |e| self.relative(&e.path, &e.name))
    }
}
