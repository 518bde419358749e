//! Pattern-matrix analysis: usefulness, exhaustiveness, generic patterns and
//! precondition synthesis for partial functions.
//!
//! Source patterns are first lowered to [`PatTree`], which only knows about
//! constructors, variables and wildcards. Type information needed for the
//! lowering (record labels behind `...`, datatype stamps) comes from the
//! elaborator's annotations.

use crate::frontend::ast::{NodeId, Pat, PatKind, SCon};
use crate::types::{DataEnv, SemType};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ctor {
    Unit,
    Tuple(usize),
    /// Sorted labels of the full record type.
    Record(Vec<String>),
    True,
    False,
    Nil,
    Cons,
    Some,
    None,
    Data {
        stamp: u32,
        name: String,
    },
    Int(i64),
    Str(String),
    Char(char),
}

impl Ctor {
    fn is_literal(&self) -> bool {
        matches!(self, Ctor::Int(_) | Ctor::Str(_) | Ctor::Char(_))
    }
}

/// A pattern reduced to what matters for matching.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PatTree {
    Wild,
    Var(String),
    Ctor(Ctor, Vec<PatTree>),
}

impl PatTree {
    pub fn ctor(c: Ctor, args: Vec<PatTree>) -> PatTree {
        PatTree::Ctor(c, args)
    }

    pub fn leaf(c: Ctor) -> PatTree {
        PatTree::Ctor(c, Vec::new())
    }

    fn is_wild(&self) -> bool {
        matches!(self, PatTree::Wild | PatTree::Var(_))
    }

    /// Bound variables, left to right.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<String>) {
        match self {
            PatTree::Wild => {}
            PatTree::Var(x) => out.push(x.clone()),
            PatTree::Ctor(_, args) => args.iter().for_each(|a| a.collect(out)),
        }
    }
}

impl fmt::Display for PatTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatTree::Wild => f.write_str("_"),
            PatTree::Var(x) => f.write_str(x),
            PatTree::Ctor(c, args) => match (c, args.as_slice()) {
                (Ctor::Unit, _) => f.write_str("()"),
                (Ctor::Tuple(_), _) => {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")
                }
                (Ctor::Record(labels), _) => {
                    f.write_str("{")?;
                    for (i, (l, a)) in labels.iter().zip(args).enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{l} = {a}")?;
                    }
                    f.write_str("}")
                }
                (Ctor::True, _) => f.write_str("true"),
                (Ctor::False, _) => f.write_str("false"),
                (Ctor::Nil, _) => f.write_str("nil"),
                (Ctor::Cons, [h, t]) => write!(f, "({h} :: {t})"),
                (Ctor::Some, [p]) => write!(f, "(SOME {p})"),
                (Ctor::None, _) => f.write_str("NONE"),
                (Ctor::Data { name, .. }, []) => f.write_str(name),
                (Ctor::Data { name, .. }, [p]) => write!(f, "({name} {p})"),
                (Ctor::Int(n), _) => write!(f, "{n}"),
                (Ctor::Str(s), _) => write!(f, "{s:?}"),
                (Ctor::Char(c), _) => write!(f, "#{:?}", c.to_string()),
                (c, args) => write!(f, "{c:?}{args:?}"),
            },
        }
    }
}

/// Clause patterns of a function, match or binding.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternMatrix {
    pub rows: Vec<Vec<PatTree>>,
    pub column_types: Vec<SemType>,
}

impl PatternMatrix {
    pub fn new(rows: Vec<Vec<PatTree>>, column_types: Vec<SemType>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == column_types.len()));
        PatternMatrix { rows, column_types }
    }

    pub fn width(&self) -> usize {
        self.column_types.len()
    }
}

/// Number of sub-patterns a constructor takes.
fn arity(c: &Ctor, data: &DataEnv) -> usize {
    match c {
        Ctor::Tuple(n) => *n,
        Ctor::Record(ls) => ls.len(),
        Ctor::Cons => 2,
        Ctor::Some => 1,
        Ctor::Data { stamp, name } => data
            .get(*stamp)
            .and_then(|d| d.cons.iter().find(|(n, _)| n == name))
            .map_or(0, |(_, p)| usize::from(p.is_some())),
        _ => 0,
    }
}

/// Every constructor of the type `c` belongs to, or `None` when that set is
/// infinite or unknown (literals, abstract types).
fn signature(c: &Ctor, data: &DataEnv) -> Option<Vec<Ctor>> {
    Some(match c {
        Ctor::Unit | Ctor::Tuple(_) | Ctor::Record(_) => vec![c.clone()],
        Ctor::True | Ctor::False => vec![Ctor::True, Ctor::False],
        Ctor::Nil | Ctor::Cons => vec![Ctor::Nil, Ctor::Cons],
        Ctor::Some | Ctor::None => vec![Ctor::None, Ctor::Some],
        Ctor::Data { stamp, .. } => {
            let info = data.get(*stamp)?;
            if info.is_abstract {
                return None;
            }
            info.cons.iter().map(|(n, _)| Ctor::Data { stamp: *stamp, name: n.clone() }).collect()
        }
        Ctor::Int(_) | Ctor::Str(_) | Ctor::Char(_) => return None,
    })
}

fn specialize(rows: &[Vec<PatTree>], c: &Ctor, a: usize) -> Vec<Vec<PatTree>> {
    rows.iter()
        .filter_map(|row| {
            let (head, rest) = row.split_first()?;
            let mut out = match head {
                PatTree::Ctor(c2, args) if c2 == c => args.clone(),
                PatTree::Ctor(..) => return None,
                _ => vec![PatTree::Wild; a],
            };
            out.extend_from_slice(rest);
            Some(out)
        })
        .collect()
}

fn default_rows(rows: &[Vec<PatTree>]) -> Vec<Vec<PatTree>> {
    rows.iter().filter(|row| row.first().is_some_and(PatTree::is_wild)).map(|row| row[1..].to_vec()).collect()
}

fn useful(rows: &[Vec<PatTree>], q: &[PatTree], data: &DataEnv) -> bool {
    let Some((head, rest)) = q.split_first() else {
        return rows.is_empty();
    };
    match head {
        PatTree::Ctor(c, args) => {
            let mut q2 = args.clone();
            q2.extend_from_slice(rest);
            useful(&specialize(rows, c, args.len()), &q2, data)
        }
        _ => {
            let present: Vec<&Ctor> = rows
                .iter()
                .filter_map(|r| match r.first() {
                    Some(PatTree::Ctor(c, _)) => Some(c),
                    _ => None,
                })
                .collect();
            let complete =
                present.first().and_then(|c| signature(c, data)).filter(|sig| sig.iter().all(|s| present.contains(&s)));
            match complete {
                Some(sig) => sig.iter().any(|c| {
                    let a = arity(c, data);
                    let mut q2 = vec![PatTree::Wild; a];
                    q2.extend_from_slice(rest);
                    useful(&specialize(rows, c, a), &q2, data)
                }),
                None => useful(&default_rows(rows), rest, data),
            }
        }
    }
}

/// Whether some value vector matches `row` and no row of `matrix`.
pub fn is_useful(matrix: &PatternMatrix, row: &[PatTree], data: &DataEnv) -> bool {
    useful(&matrix.rows, row, data)
}

/// Whether every value vector of the column types matches some row.
pub fn is_exhaustive(matrix: &PatternMatrix, data: &DataEnv) -> bool {
    !useful(&matrix.rows, &vec![PatTree::Wild; matrix.width()], data)
}

/// Indices of rows that no value reaches.
pub fn redundant_rows(matrix: &PatternMatrix, data: &DataEnv) -> Vec<usize> {
    (0..matrix.rows.len()).filter(|&i| !useful(&matrix.rows[..i], &matrix.rows[i], data)).collect()
}

/// Whether `p` matches every value of its type.
pub fn is_generic(p: &PatTree, data: &DataEnv) -> bool {
    match p {
        PatTree::Wild | PatTree::Var(_) => true,
        PatTree::Ctor(c, args) => {
            !c.is_literal()
                && signature(c, data).is_some_and(|s| s.len() == 1)
                && args.iter().all(|a| is_generic(a, data))
        }
    }
}

/// Replace each maximal generic sub-pattern with a fresh `y_k`.
pub fn generalize(p: &PatTree, data: &DataEnv) -> (Vec<String>, PatTree) {
    fn go(p: &PatTree, data: &DataEnv, vars: &mut Vec<String>) -> PatTree {
        if is_generic(p, data) {
            let y = format!("y{}", vars.len() + 1);
            vars.push(y.clone());
            return PatTree::Var(y);
        }
        match p {
            PatTree::Ctor(c, args) => PatTree::Ctor(c.clone(), args.iter().map(|a| go(a, data, vars)).collect()),
            other => other.clone(),
        }
    }
    let mut vars = Vec::new();
    let skel = go(p, data, &mut vars);
    (vars, skel)
}

/// `exists vars, x<arg+1> = skeleton`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    /// Zero-based argument index.
    pub arg: usize,
    pub vars: Vec<String>,
    pub skeleton: PatTree,
}

/// Disjunction of conjunctions of atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreconditionFormula {
    pub disjuncts: Vec<Vec<Atom>>,
}

impl PreconditionFormula {
    pub fn atom_count(&self) -> usize {
        self.disjuncts.iter().map(Vec::len).sum()
    }
}

/// Minimized precondition for a function with clause matrix `matrix`, or
/// `None` when the function is total.
pub fn synthesize_precondition(matrix: &PatternMatrix, data: &DataEnv) -> Option<PreconditionFormula> {
    if is_exhaustive(matrix, data) {
        return None;
    }
    let mut disjuncts = Vec::new();
    for row in &matrix.rows {
        let atoms: Vec<Atom> = row
            .iter()
            .enumerate()
            .filter(|(_, p)| !is_generic(p, data))
            .map(|(arg, p)| {
                let (vars, skeleton) = generalize(p, data);
                Atom { arg, vars, skeleton }
            })
            .collect();
        if atoms.is_empty() {
            return None;
        }
        disjuncts.push(atoms);
    }
    Some(PreconditionFormula { disjuncts })
}

/// The unminimized precondition: every clause contributes one atom per
/// argument, quantifying the clause's own variables.
pub fn naive_precondition(matrix: &PatternMatrix) -> PreconditionFormula {
    fn name_wilds(p: &PatTree, k: &mut usize) -> PatTree {
        match p {
            PatTree::Wild => {
                *k += 1;
                PatTree::Var(format!("w{k}"))
            }
            PatTree::Var(x) => PatTree::Var(x.clone()),
            PatTree::Ctor(c, args) => PatTree::Ctor(c.clone(), args.iter().map(|a| name_wilds(a, k)).collect()),
        }
    }
    let disjuncts = matrix
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(arg, p)| {
                    let skeleton = name_wilds(p, &mut 0);
                    Atom { arg, vars: skeleton.vars(), skeleton }
                })
                .collect()
        })
        .collect();
    PreconditionFormula { disjuncts }
}

/// Variables bound by a source pattern, left to right, depth first.
pub fn collect_vars(p: &Pat) -> Vec<String> {
    fn go(p: &Pat, out: &mut Vec<String>) {
        match &p.kind {
            PatKind::Var(x) => out.push(x.clone()),
            PatKind::Wild | PatKind::Con(_) | PatKind::SCon(_) | PatKind::Unit => {}
            PatKind::Tuple(ps) | PatKind::List(ps) => ps.iter().for_each(|q| go(q, out)),
            PatKind::Record { fields, .. } => fields.iter().for_each(|(_, q)| go(q, out)),
            PatKind::ConApp(_, q) | PatKind::Typed(q, _) => go(q, out),
            PatKind::Infix { lhs, rhs, .. } => {
                go(lhs, out);
                go(rhs, out);
            }
            PatKind::Layered { name, pat, .. } => {
                out.push(name.clone());
                go(pat, out);
            }
        }
    }
    let mut out = Vec::new();
    go(p, &mut out);
    out
}

/// Lower an elaborated source pattern. `types` maps pattern node ids to
/// their (fully applied) types.
pub fn lower(p: &Pat, types: &BTreeMap<NodeId, SemType>) -> PatTree {
    let ty = || types.get(&p.meta.id).map(SemType::expand);
    match &p.kind {
        PatKind::Wild => PatTree::Wild,
        PatKind::Var(x) => PatTree::Var(x.clone()),
        PatKind::Con(c) => match named_ctor(&c.name, ty()) {
            Some(c) => PatTree::leaf(c),
            None => PatTree::Wild,
        },
        PatKind::SCon(SCon::Int(n)) => PatTree::leaf(Ctor::Int(*n)),
        PatKind::SCon(SCon::Str(s)) => PatTree::leaf(Ctor::Str(s.clone())),
        PatKind::SCon(SCon::Char(c)) => PatTree::leaf(Ctor::Char(*c)),
        PatKind::SCon(SCon::Real(_)) => PatTree::Wild,
        PatKind::Unit => PatTree::leaf(Ctor::Unit),
        PatKind::Tuple(ps) => PatTree::ctor(Ctor::Tuple(ps.len()), ps.iter().map(|q| lower(q, types)).collect()),
        PatKind::List(ps) => ps
            .iter()
            .rev()
            .fold(PatTree::leaf(Ctor::Nil), |tail, q| PatTree::ctor(Ctor::Cons, vec![lower(q, types), tail])),
        PatKind::Record { fields, .. } => {
            let labels: Vec<String> = match ty() {
                Some(SemType::Record(fs)) => fs.keys().cloned().collect(),
                _ => {
                    let mut ls: Vec<String> = fields.iter().map(|(l, _)| l.clone()).collect();
                    ls.sort();
                    ls
                }
            };
            let args = labels
                .iter()
                .map(|l| fields.iter().find(|(k, _)| k == l).map_or(PatTree::Wild, |(_, q)| lower(q, types)))
                .collect();
            PatTree::ctor(Ctor::Record(labels), args)
        }
        PatKind::ConApp(c, arg) => con_app(&c.name, ty(), lower(arg, types)),
        PatKind::Infix { op, lhs, rhs } => {
            let pair = PatTree::ctor(Ctor::Tuple(2), vec![lower(lhs, types), lower(rhs, types)]);
            con_app(op, ty(), pair)
        }
        PatKind::Typed(q, _) | PatKind::Layered { pat: q, .. } => lower(q, types),
    }
}

fn named_ctor(name: &str, ty: Option<SemType>) -> Option<Ctor> {
    Some(match (ty?, name) {
        (SemType::Bool, "true") => Ctor::True,
        (SemType::Bool, "false") => Ctor::False,
        (SemType::List(_), "nil") => Ctor::Nil,
        (SemType::Option(_), "NONE") => Ctor::None,
        (SemType::Data { stamp, .. }, n) => Ctor::Data { stamp, name: n.to_string() },
        _ => return None,
    })
}

fn con_app(name: &str, ty: Option<SemType>, arg: PatTree) -> PatTree {
    match (ty, name) {
        (Some(SemType::List(_)), "::") => match arg {
            PatTree::Ctor(Ctor::Tuple(2), args) => PatTree::ctor(Ctor::Cons, args),
            _ => PatTree::ctor(Ctor::Cons, vec![PatTree::Wild, PatTree::Wild]),
        },
        (Some(SemType::Option(_)), "SOME") => PatTree::ctor(Ctor::Some, vec![arg]),
        (Some(SemType::Data { stamp, .. }), n) => PatTree::ctor(Ctor::Data { stamp, name: n.to_string() }, vec![arg]),
        _ => PatTree::Wild,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::DataInfo;

    fn var(x: &str) -> PatTree {
        PatTree::Var(x.into())
    }
    fn cons(h: PatTree, t: PatTree) -> PatTree {
        PatTree::ctor(Ctor::Cons, vec![h, t])
    }
    fn nil() -> PatTree {
        PatTree::leaf(Ctor::Nil)
    }
    fn pair(a: PatTree, b: PatTree) -> PatTree {
        PatTree::ctor(Ctor::Tuple(2), vec![a, b])
    }
    fn m(rows: Vec<Vec<PatTree>>, n: usize) -> PatternMatrix {
        PatternMatrix::new(rows, vec![SemType::list(SemType::Int); n])
    }

    #[test]
    fn usefulness_examples() {
        let d = DataEnv::default();
        assert!(is_useful(&m(vec![vec![nil()]], 1), &[cons(var("x"), var("l"))], &d));
        let ints = PatternMatrix::new(vec![vec![var("x")]], vec![SemType::Int]);
        assert!(!is_useful(&ints, &[PatTree::leaf(Ctor::Int(0))], &d));
        let bools = PatternMatrix::new(
            vec![vec![PatTree::leaf(Ctor::True)], vec![PatTree::leaf(Ctor::False)]],
            vec![SemType::Bool],
        );
        assert!(!is_useful(&bools, &[PatTree::Wild], &d));
    }

    #[test]
    fn exhaustiveness_examples() {
        let d = DataEnv::default();
        assert!(is_exhaustive(&m(vec![vec![nil()], vec![cons(var("x"), var("l"))]], 1), &d));
        assert!(!is_exhaustive(&m(vec![vec![cons(var("x"), var("l"))]], 1), &d));
        let t = PatternMatrix::new(
            vec![vec![pair(var("a"), var("b"))]],
            vec![SemType::Tuple(vec![SemType::Int, SemType::Int])],
        );
        assert!(is_exhaustive(&t, &d));
        let lits = PatternMatrix::new(
            vec![vec![PatTree::leaf(Ctor::Int(0))], vec![PatTree::leaf(Ctor::Int(1))]],
            vec![SemType::Int],
        );
        assert!(!is_exhaustive(&lits, &d));
    }

    #[test]
    fn generic_patterns() {
        let mut d = DataEnv::default();
        d.insert(DataInfo {
            stamp: 1,
            name: "t".into(),
            params: vec![],
            cons: vec![("Wrap".into(), Some(SemType::Int))],
            is_abstract: false,
        });
        assert!(is_generic(&pair(var("a"), var("b")), &d));
        assert!(!is_generic(&cons(var("x"), var("l")), &d));
        let wrap = PatTree::ctor(Ctor::Data { stamp: 1, name: "Wrap".into() }, vec![var("x")]);
        assert!(is_generic(&wrap, &d));
        assert!(!is_generic(&PatTree::leaf(Ctor::Int(3)), &d));
    }

    #[test]
    fn generalize_examples() {
        let d = DataEnv::default();
        let (vs, sk) = generalize(&cons(pair(var("a"), var("b")), var("l")), &d);
        assert_eq!(vs, ["y1", "y2"]);
        assert_eq!(sk, cons(var("y1"), var("y2")));
        let (vs, sk) = generalize(&cons(PatTree::leaf(Ctor::Int(0)), var("l")), &d);
        assert_eq!(vs, ["y1"]);
        assert_eq!(sk, cons(PatTree::leaf(Ctor::Int(0)), var("y1")));
        let (vs, sk) = generalize(&cons(var("x"), nil()), &d);
        assert_eq!(vs, ["y1"]);
        assert_eq!(sk, cons(var("y1"), nil()));
    }

    #[test]
    fn hd_precondition() {
        let d = DataEnv::default();
        let f = synthesize_precondition(&m(vec![vec![cons(var("x"), var("l"))]], 1), &d).unwrap();
        assert_eq!(f.disjuncts.len(), 1);
        assert_eq!(f.disjuncts[0][0].vars, ["y1", "y2"]);
        assert!(synthesize_precondition(&m(vec![vec![nil()], vec![cons(var("x"), var("l"))]], 1), &d).is_none());
    }

    #[test]
    fn all_generic_clause_means_no_precondition() {
        let d = DataEnv::default();
        let rows = vec![vec![cons(var("x"), var("l")), nil()], vec![var("a"), var("b")]];
        assert!(synthesize_precondition(&m(rows, 2), &d).is_none());
    }
}
