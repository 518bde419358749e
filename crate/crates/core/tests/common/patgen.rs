//! Random pattern matrices over small finite-ish types, plus a brute-force
//! matcher over enumerated values to check the matrix analysis against.

use rand::Rng;
use sml2gallina::patterns::{Ctor, PatTree, PatternMatrix};
use sml2gallina::types::SemType;

/// Longest cons chain a generated pattern may contain.
pub const LIST_DEPTH: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub enum Ty {
    Bool,
    BoolOption,
    BoolList,
    Pair(Box<Ty>, Box<Ty>),
}

impl Ty {
    pub fn sem(&self) -> SemType {
        match self {
            Ty::Bool => SemType::Bool,
            Ty::BoolOption => SemType::option(SemType::Bool),
            Ty::BoolList => SemType::list(SemType::Bool),
            Ty::Pair(a, b) => SemType::Tuple(vec![a.sem(), b.sem()]),
        }
    }

    /// Every value, with lists up to one element longer than any pattern
    /// can inspect. Longer lists match exactly the same patterns.
    pub fn values(&self) -> Vec<PatTree> {
        match self {
            Ty::Bool => vec![PatTree::leaf(Ctor::True), PatTree::leaf(Ctor::False)],
            Ty::BoolOption => {
                let mut out = vec![PatTree::leaf(Ctor::None)];
                out.extend(Ty::Bool.values().into_iter().map(|b| PatTree::ctor(Ctor::Some, vec![b])));
                out
            }
            Ty::BoolList => {
                let mut out = vec![PatTree::leaf(Ctor::Nil)];
                let mut layer = vec![PatTree::leaf(Ctor::Nil)];
                for _ in 0..=LIST_DEPTH {
                    let mut next = Vec::new();
                    for tail in &layer {
                        for b in Ty::Bool.values() {
                            next.push(PatTree::ctor(Ctor::Cons, vec![b, tail.clone()]));
                        }
                    }
                    out.extend(next.iter().cloned());
                    layer = next;
                }
                out
            }
            Ty::Pair(a, b) => {
                let bs = b.values();
                a.values()
                    .into_iter()
                    .flat_map(|x| bs.iter().map(move |y| PatTree::ctor(Ctor::Tuple(2), vec![x.clone(), y.clone()])))
                    .collect()
            }
        }
    }
}

pub fn random_ty(rng: &mut impl Rng, allow_pair: bool) -> Ty {
    match rng.gen_range(0..if allow_pair { 4 } else { 3 }) {
        0 => Ty::Bool,
        1 => Ty::BoolOption,
        2 => Ty::BoolList,
        _ => Ty::Pair(Box::new(random_ty(rng, false)), Box::new(random_ty(rng, false))),
    }
}

pub fn random_pat(rng: &mut impl Rng, ty: &Ty) -> PatTree {
    random_pat_depth(rng, ty, LIST_DEPTH)
}

fn random_pat_depth(rng: &mut impl Rng, ty: &Ty, depth: usize) -> PatTree {
    if rng.gen_bool(0.25) {
        return if rng.gen_bool(0.5) { PatTree::Wild } else { PatTree::Var("v".into()) };
    }
    match ty {
        Ty::Bool => PatTree::leaf(if rng.gen_bool(0.5) { Ctor::True } else { Ctor::False }),
        Ty::BoolOption => {
            if rng.gen_bool(0.4) {
                PatTree::leaf(Ctor::None)
            } else {
                PatTree::ctor(Ctor::Some, vec![random_pat_depth(rng, &Ty::Bool, depth)])
            }
        }
        Ty::BoolList => {
            if depth == 0 || rng.gen_bool(0.35) {
                PatTree::leaf(Ctor::Nil)
            } else {
                let head = random_pat_depth(rng, &Ty::Bool, depth);
                let tail = random_pat_depth(rng, ty, depth - 1);
                PatTree::ctor(Ctor::Cons, vec![head, tail])
            }
        }
        Ty::Pair(a, b) => {
            PatTree::ctor(Ctor::Tuple(2), vec![random_pat_depth(rng, a, depth), random_pat_depth(rng, b, depth)])
        }
    }
}

#[derive(Clone, Debug)]
pub struct Case {
    pub tys: Vec<Ty>,
    pub matrix: PatternMatrix,
}

/// Column types are redrawn until the value space stays enumerable.
pub const MAX_VECTORS: usize = 1024;

/// Up to three rows over one or two columns.
pub fn random_case(rng: &mut impl Rng) -> Case {
    let tys: Vec<Ty> = loop {
        let width = rng.gen_range(1..=2);
        let tys: Vec<Ty> = (0..width).map(|_| random_ty(rng, true)).collect();
        if tys.iter().map(|t| t.values().len()).product::<usize>() <= MAX_VECTORS {
            break tys;
        }
    };
    let rows = (0..rng.gen_range(0..=3)).map(|_| tys.iter().map(|t| random_pat(rng, t)).collect()).collect();
    let matrix = PatternMatrix::new(rows, tys.iter().map(Ty::sem).collect());
    Case { tys, matrix }
}

pub fn matches(p: &PatTree, v: &PatTree) -> bool {
    match (p, v) {
        (PatTree::Wild | PatTree::Var(_), _) => true,
        (PatTree::Ctor(c, ps), PatTree::Ctor(d, vs)) => c == d && ps.iter().zip(vs).all(|(p, v)| matches(p, v)),
        _ => false,
    }
}

pub fn row_matches(row: &[PatTree], vals: &[PatTree]) -> bool {
    row.iter().zip(vals).all(|(p, v)| matches(p, v))
}

/// Cartesian product of the column value sets.
pub fn value_vectors(tys: &[Ty]) -> Vec<Vec<PatTree>> {
    tys.iter().fold(vec![Vec::new()], |acc, t| {
        let vs = t.values();
        acc.into_iter()
            .flat_map(|prefix| {
                vs.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect()
    })
}

pub fn brute_exhaustive(case: &Case) -> bool {
    value_vectors(&case.tys).iter().all(|vals| case.matrix.rows.iter().any(|r| row_matches(r, vals)))
}

/// Rows that no value reaches first.
pub fn brute_redundant(case: &Case) -> Vec<usize> {
    let vectors = value_vectors(&case.tys);
    (0..case.matrix.rows.len())
        .filter(|&i| {
            !vectors.iter().any(|vals| {
                row_matches(&case.matrix.rows[i], vals) && !case.matrix.rows[..i].iter().any(|r| row_matches(r, vals))
            })
        })
        .collect()
}
