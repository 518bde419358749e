//! Exhaustiveness and redundancy verdicts, computed once types are final.

use super::Annotations;
use crate::diag::{Span, Stage, Warning};
use crate::frontend::ast::*;
use crate::patterns::{is_exhaustive, lower, redundant_rows, PatternMatrix};
use crate::types::{DataEnv, SemType};

struct Checker<'a> {
    ann: &'a mut Annotations,
    data: &'a DataEnv,
    warnings: &'a mut Vec<Warning>,
}

pub(crate) fn check_dec(d: &Dec, ann: &mut Annotations, data: &DataEnv, warnings: &mut Vec<Warning>) {
    Checker { ann, data, warnings }.dec(d);
}

impl Checker<'_> {
    fn warn(&mut self, span: Span, message: &str) {
        self.warnings.push(Warning { span, stage: Stage::Elaborate, message: message.into() });
    }

    fn ty(&self, id: NodeId) -> SemType {
        self.ann.types.get(&id).cloned().unwrap_or(SemType::Unit)
    }

    /// Record the verdict for `rows` under `node` and report problems.
    fn verdict(&mut self, node: NodeId, span: Span, rows: &[Vec<&Pat>], what: &str) -> bool {
        let width = rows.first().map_or(0, Vec::len);
        let column_types = match rows.first() {
            Some(r) => r.iter().map(|p| self.ty(p.meta.id)).collect(),
            None => Vec::new(),
        };
        let lowered = rows.iter().map(|r| r.iter().map(|p| lower(p, &self.ann.types)).collect()).collect();
        let m = PatternMatrix::new(lowered, column_types);
        debug_assert_eq!(m.width(), width);
        let ok = is_exhaustive(&m, self.data);
        self.ann.exhaustive.insert(node, ok);
        for i in redundant_rows(&m, self.data) {
            let s = rows[i].first().map_or(span, |p| p.meta.span);
            self.warn(s, "redundant match rule");
        }
        if !ok {
            self.warn(span, what);
        }
        ok
    }

    fn dec(&mut self, d: &Dec) {
        match &d.kind {
            DecKind::Val { binds, .. } => {
                for vb in binds {
                    self.verdict(vb.meta.id, vb.meta.span, &[vec![&vb.pat]], "binding not exhaustive");
                    self.exp(&vb.exp);
                }
            }
            DecKind::Fun { binds, contract, .. } => {
                for fb in binds {
                    let rows: Vec<Vec<&Pat>> = fb.clauses.iter().map(|c| c.pats.iter().collect()).collect();
                    self.verdict(fb.meta.id, fb.meta.span, &rows, "match not exhaustive");
                    for c in &fb.clauses {
                        self.exp(&c.body);
                    }
                }
                if let Some(c) = contract {
                    self.exp(&c.requires);
                    self.exp(&c.ensures);
                }
            }
            DecKind::Local(a, b) => a.iter().chain(b).for_each(|x| self.dec(x)),
            DecKind::Structure(sbs) => sbs.iter().for_each(|sb| self.strexp(&sb.body)),
            DecKind::Functor(fbs) => fbs.iter().for_each(|fb| self.strexp(&fb.body)),
            _ => {}
        }
    }

    fn strexp(&mut self, s: &StrExp) {
        match &s.kind {
            StrExpKind::Struct(decs) => decs.iter().for_each(|d| self.dec(d)),
            StrExpKind::Name(_) => {}
            StrExpKind::App(_, arg) => self.strexp(arg),
            StrExpKind::Constrained(inner, _) => self.strexp(inner),
        }
    }

    fn rules(&mut self, m: &Match) {
        let rows: Vec<Vec<&Pat>> = m.rules.iter().map(|r| vec![&r.pat]).collect();
        self.verdict(m.meta.id, m.meta.span, &rows, "match not exhaustive");
        for r in &m.rules {
            self.exp(&r.exp);
        }
    }

    fn exp(&mut self, e: &Exp) {
        match &e.kind {
            ExpKind::Tuple(es) | ExpKind::List(es) => es.iter().for_each(|x| self.exp(x)),
            ExpKind::Record(fs) => fs.iter().for_each(|(_, x)| self.exp(x)),
            ExpKind::App(a, b) | ExpKind::Andalso(a, b) | ExpKind::Orelse(a, b) => {
                self.exp(a);
                self.exp(b);
            }
            ExpKind::Infix { lhs, rhs, .. } => {
                self.exp(lhs);
                self.exp(rhs);
            }
            ExpKind::Fn(m) => self.rules(m),
            ExpKind::Case(x, m) => {
                self.exp(x);
                self.rules(m);
            }
            ExpKind::If(a, b, c) => {
                self.exp(a);
                self.exp(b);
                self.exp(c);
            }
            ExpKind::Let(decs, body) => {
                decs.iter().for_each(|d| self.dec(d));
                self.exp(body);
            }
            ExpKind::Typed(x, _) => self.exp(x),
            _ => {}
        }
    }
}
