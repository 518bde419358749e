//! SML pretty-printer. Output is fully parenthesized so that re-parsing it
//! under the same infix environment gives back the same tree.

use super::ast::*;
use super::infix::InfixEnv;
use std::fmt::Write;

pub fn print_program(prog: &[Dec]) -> String {
    let mut p = Printer { out: String::new(), infix: InfixEnv::basis() };
    for d in prog {
        p.dec(d, 0);
        p.out.push('\n');
    }
    p.out
}

pub fn print_exp(e: &Exp) -> String {
    let mut p = Printer { out: String::new(), infix: InfixEnv::basis() };
    p.exp(e);
    p.out
}

pub fn print_pat(pat: &Pat) -> String {
    let mut p = Printer { out: String::new(), infix: InfixEnv::basis() };
    p.pat(pat);
    p.out
}

pub fn print_ty(t: &Ty) -> String {
    let mut p = Printer { out: String::new(), infix: InfixEnv::basis() };
    p.ty(t);
    p.out
}

pub fn sml_string_literal(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 32 || c as u32 == 127 => {
                let _ = write!(out, "\\{:03}", c as u32);
            }
            c if (c as u32) > 126 && (c as u32) < 256 => {
                let _ = write!(out, "\\{:03}", c as u32);
            }
            c if (c as u32) >= 256 => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn scon(s: &SCon) -> String {
    match s {
        SCon::Int(i) if *i < 0 => format!("~{}", i.unsigned_abs()),
        SCon::Int(i) => i.to_string(),
        SCon::Real(r) => r.clone(),
        SCon::Str(s) => sml_string_literal(s),
        SCon::Char(c) => format!("#{}", sml_string_literal(&c.to_string())),
    }
}

struct Printer {
    out: String,
    infix: InfixEnv,
}

impl Printer {
    fn s(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn indent(&mut self, n: usize) {
        for _ in 0..n {
            self.out.push_str("  ");
        }
    }

    fn id(&mut self, name: &LongId, op: bool) {
        if op || (name.is_simple() && self.infix.is_infix(&name.name)) {
            self.s("op ");
        }
        let _ = write!(self.out, "{name}");
    }

    fn tyvars(&mut self, vs: &[String]) {
        match vs.len() {
            0 => {}
            1 => {
                let _ = write!(self.out, "'{} ", vs[0]);
            }
            _ => {
                let list: Vec<String> = vs.iter().map(|v| format!("'{v}")).collect();
                let _ = write!(self.out, "({}) ", list.join(", "));
            }
        }
    }

    fn ty(&mut self, t: &Ty) {
        match &t.kind {
            TyKind::Var(v) => {
                let _ = write!(self.out, "'{v}");
            }
            TyKind::Con(args, con) => {
                match args.len() {
                    0 => {}
                    1 => {
                        self.ty(&args[0]);
                        self.s(" ");
                    }
                    _ => {
                        self.s("(");
                        for (i, a) in args.iter().enumerate() {
                            if i > 0 {
                                self.s(", ");
                            }
                            self.ty(a);
                        }
                        self.s(") ");
                    }
                }
                let _ = write!(self.out, "{con}");
            }
            TyKind::Tuple(parts) => {
                self.s("(");
                for (i, a) in parts.iter().enumerate() {
                    if i > 0 {
                        self.s(" * ");
                    }
                    self.ty(a);
                }
                self.s(")");
            }
            TyKind::Arrow(a, b) => {
                self.s("(");
                self.ty(a);
                self.s(" -> ");
                self.ty(b);
                self.s(")");
            }
            TyKind::Record(fields) => {
                self.s("{");
                for (i, (l, ft)) in fields.iter().enumerate() {
                    if i > 0 {
                        self.s(", ");
                    }
                    let _ = write!(self.out, "{l} : ");
                    self.ty(ft);
                }
                self.s("}");
            }
        }
    }

    fn pat(&mut self, p: &Pat) {
        match &p.kind {
            PatKind::Wild => self.s("_"),
            PatKind::Var(v) => self.id(&LongId::simple(v.clone()), false),
            PatKind::Con(c) => self.id(c, false),
            PatKind::SCon(c) => {
                let t = scon(c);
                self.s(&t)
            }
            PatKind::Unit => self.s("()"),
            PatKind::Tuple(items) => {
                self.s("(");
                for (i, q) in items.iter().enumerate() {
                    if i > 0 {
                        self.s(", ");
                    }
                    self.pat(q);
                }
                self.s(")");
            }
            PatKind::List(items) => {
                self.s("[");
                for (i, q) in items.iter().enumerate() {
                    if i > 0 {
                        self.s(", ");
                    }
                    self.pat(q);
                }
                self.s("]");
            }
            PatKind::Record { fields, ellipsis } => {
                self.s("{");
                for (i, (l, q)) in fields.iter().enumerate() {
                    if i > 0 {
                        self.s(", ");
                    }
                    let _ = write!(self.out, "{l} = ");
                    self.pat(q);
                }
                if *ellipsis {
                    if !fields.is_empty() {
                        self.s(", ");
                    }
                    self.s("...");
                }
                self.s("}");
            }
            PatKind::ConApp(c, arg) => {
                self.s("(");
                self.id(c, false);
                self.s(" ");
                self.pat(arg);
                self.s(")");
            }
            PatKind::Infix { op, lhs, rhs } => {
                self.s("(");
                self.pat(lhs);
                let _ = write!(self.out, " {op} ");
                self.pat(rhs);
                self.s(")");
            }
            PatKind::Typed(inner, t) => {
                self.s("(");
                self.pat(inner);
                self.s(" : ");
                self.ty(t);
                self.s(")");
            }
            PatKind::Layered { name, ty, pat } => {
                self.s("(");
                self.s(name);
                if let Some(t) = ty {
                    self.s(" : ");
                    self.ty(t);
                }
                self.s(" as ");
                self.pat(pat);
                self.s(")");
            }
        }
    }

    fn exp(&mut self, e: &Exp) {
        match &e.kind {
            ExpKind::Var { name, op } | ExpKind::Con { name, op } => self.id(name, *op),
            ExpKind::SCon(c) => {
                let t = scon(c);
                self.s(&t)
            }
            ExpKind::Unit => self.s("()"),
            ExpKind::Tuple(items) => self.exp_seq("(", items, ")"),
            ExpKind::List(items) => self.exp_seq("[", items, "]"),
            ExpKind::Record(fields) => {
                self.s("{");
                for (i, (l, x)) in fields.iter().enumerate() {
                    if i > 0 {
                        self.s(", ");
                    }
                    let _ = write!(self.out, "{l} = ");
                    self.exp(x);
                }
                self.s("}");
            }
            ExpKind::Selector(l) => {
                let _ = write!(self.out, "#{l}");
            }
            ExpKind::App(f, a) => {
                self.s("(");
                self.exp(f);
                self.s(" ");
                self.exp(a);
                self.s(")");
            }
            ExpKind::Infix { op, lhs, rhs } => {
                self.s("(");
                self.exp(lhs);
                let _ = write!(self.out, " {op} ");
                self.exp(rhs);
                self.s(")");
            }
            ExpKind::Fn(m) => {
                self.s("(fn ");
                self.match_(m);
                self.s(")");
            }
            ExpKind::Case(scrut, m) => {
                self.s("(case ");
                self.exp(scrut);
                self.s(" of ");
                self.match_(m);
                self.s(")");
            }
            ExpKind::If(c, t, f) => {
                self.s("(if ");
                self.exp(c);
                self.s(" then ");
                self.exp(t);
                self.s(" else ");
                self.exp(f);
                self.s(")");
            }
            ExpKind::Andalso(a, b) => {
                self.s("(");
                self.exp(a);
                self.s(" andalso ");
                self.exp(b);
                self.s(")");
            }
            ExpKind::Orelse(a, b) => {
                self.s("(");
                self.exp(a);
                self.s(" orelse ");
                self.exp(b);
                self.s(")");
            }
            ExpKind::Let(decs, body) => {
                let saved = self.infix.clone();
                self.s("let ");
                for d in decs {
                    self.dec(d, 0);
                    self.s(" ");
                }
                self.s("in ");
                self.exp(body);
                self.s(" end");
                self.infix = saved;
            }
            ExpKind::Typed(inner, t) => {
                self.s("(");
                self.exp(inner);
                self.s(" : ");
                self.ty(t);
                self.s(")");
            }
        }
    }

    fn exp_seq(&mut self, open: &str, items: &[Exp], close: &str) {
        self.s(open);
        for (i, x) in items.iter().enumerate() {
            if i > 0 {
                self.s(", ");
            }
            self.exp(x);
        }
        self.s(close);
    }

    fn match_(&mut self, m: &Match) {
        for (i, r) in m.rules.iter().enumerate() {
            if i > 0 {
                self.s(" | ");
            }
            self.pat(&r.pat);
            self.s(" => ");
            self.exp(&r.exp);
        }
    }

    fn dec(&mut self, d: &Dec, depth: usize) {
        self.indent(depth);
        match &d.kind {
            DecKind::Val { rec, tyvars, binds } => {
                self.s("val ");
                self.tyvars(tyvars);
                if *rec {
                    self.s("rec ");
                }
                for (i, b) in binds.iter().enumerate() {
                    if i > 0 {
                        self.s(" and ");
                    }
                    self.pat(&b.pat);
                    self.s(" = ");
                    self.exp(&b.exp);
                }
            }
            DecKind::Fun { tyvars, binds, contract } => {
                if let Some(c) = contract {
                    self.contract(c);
                    self.s("\n");
                    self.indent(depth);
                }
                self.s("fun ");
                self.tyvars(tyvars);
                for (i, b) in binds.iter().enumerate() {
                    if i > 0 {
                        self.s("\n");
                        self.indent(depth);
                        self.s("and ");
                    }
                    self.funbind(b, depth);
                }
            }
            DecKind::Datatype(binds) => {
                self.s("datatype ");
                self.datbinds(binds);
            }
            DecKind::Type(binds) => {
                self.s("type ");
                for (i, b) in binds.iter().enumerate() {
                    if i > 0 {
                        self.s(" and ");
                    }
                    self.tyvars(&b.tyvars);
                    let _ = write!(self.out, "{} = ", b.name);
                    self.ty(&b.ty);
                }
            }
            DecKind::Local(a, b) => {
                let saved = self.infix.clone();
                self.s("local\n");
                for x in a {
                    self.dec(x, depth + 1);
                    self.s("\n");
                }
                let inner = self.infix.clone();
                self.indent(depth);
                self.s("in\n");
                for x in b {
                    self.dec(x, depth + 1);
                    self.s("\n");
                }
                self.indent(depth);
                self.s("end");
                let mut env = saved;
                for (id, fx) in self.infix.iter() {
                    if inner.get(id) != Some(fx) {
                        env.declare(id, fx);
                    }
                }
                self.infix = env;
            }
            DecKind::Infix { assoc, prec, ids } => {
                self.s(match assoc {
                    Assoc::Left => "infix",
                    Assoc::Right => "infixr",
                });
                if let Some(p) = prec {
                    let _ = write!(self.out, " {p}");
                }
                for id in ids {
                    let _ = write!(self.out, " {id}");
                    self.infix.declare(id, Fixity { assoc: *assoc, prec: prec.unwrap_or(0) });
                }
            }
            DecKind::Nonfix(ids) => {
                self.s("nonfix");
                for id in ids {
                    let _ = write!(self.out, " {id}");
                    self.infix.remove(id);
                }
            }
            DecKind::Structure(binds) => {
                self.s("structure ");
                for (i, b) in binds.iter().enumerate() {
                    if i > 0 {
                        self.s(" and ");
                    }
                    self.s(&b.name);
                    if let Some(a) = &b.sig {
                        self.ascription(a, depth);
                    }
                    self.s(" = ");
                    self.strexp(&b.body, depth);
                }
            }
            DecKind::Signature(binds) => {
                self.s("signature ");
                for (i, b) in binds.iter().enumerate() {
                    if i > 0 {
                        self.s(" and ");
                    }
                    let _ = write!(self.out, "{} = ", b.name);
                    self.sigexp(&b.sig, depth);
                }
            }
            DecKind::Functor(binds) => {
                self.s("functor ");
                for (i, b) in binds.iter().enumerate() {
                    if i > 0 {
                        self.s(" and ");
                    }
                    let _ = write!(self.out, "{} ({} : ", b.name, b.param);
                    self.sigexp(&b.param_sig, depth);
                    self.s(")");
                    if let Some(a) = &b.result_sig {
                        self.ascription(a, depth);
                    }
                    self.s(" = ");
                    self.strexp(&b.body, depth);
                }
            }
        }
    }

    fn funbind(&mut self, b: &FunBind, depth: usize) {
        let infix_form = !b.op && self.infix.is_infix(&b.name);
        for (i, c) in b.clauses.iter().enumerate() {
            if i > 0 {
                self.s("\n");
                self.indent(depth);
                self.s("  | ");
            }
            match (&c.pats[..], infix_form) {
                ([Pat { kind: PatKind::Tuple(lr), .. }], true) if lr.len() == 2 => {
                    self.pat(&lr[0]);
                    let _ = write!(self.out, " {} ", b.name);
                    self.pat(&lr[1]);
                }
                _ => {
                    if b.op {
                        self.s("op ");
                    }
                    self.s(&b.name);
                    for p in &c.pats {
                        self.s(" ");
                        self.pat(p);
                    }
                }
            }
            if let Some(t) = &c.ret {
                self.s(" : ");
                self.ty(t);
            }
            self.s(" = ");
            self.exp(&c.body);
        }
    }

    fn contract(&mut self, c: &Contract) {
        self.s("(!! ");
        if self.infix.is_infix(&c.fname) {
            self.s("op ");
        }
        self.s(&c.fname);
        for p in &c.inputs {
            self.s(" ");
            self.pat(p);
        }
        self.s(" ==> ");
        self.pat(&c.output);
        self.s("; REQUIRES: ");
        self.exp(&c.requires);
        self.s("; ENSURES: ");
        self.exp(&c.ensures);
        self.s("; !!)");
    }

    fn datbinds(&mut self, binds: &[DatBind]) {
        for (i, b) in binds.iter().enumerate() {
            if i > 0 {
                self.s(" and ");
            }
            self.tyvars(&b.tyvars);
            let _ = write!(self.out, "{} = ", b.name);
            for (j, c) in b.cons.iter().enumerate() {
                if j > 0 {
                    self.s(" | ");
                }
                self.id(&LongId::simple(c.name.clone()), false);
                if let Some(t) = &c.arg {
                    self.s(" of ");
                    self.ty(t);
                }
            }
        }
    }

    fn ascription(&mut self, a: &Ascription, depth: usize) {
        self.s(if a.opaque { " :> " } else { " : " });
        self.sigexp(&a.sig, depth);
    }

    fn strexp(&mut self, e: &StrExp, depth: usize) {
        match &e.kind {
            StrExpKind::Struct(decs) => {
                let saved = self.infix.clone();
                self.s("struct\n");
                for d in decs {
                    self.dec(d, depth + 1);
                    self.s("\n");
                }
                self.indent(depth);
                self.s("end");
                self.infix = saved;
            }
            StrExpKind::Name(n) => {
                let _ = write!(self.out, "{n}");
            }
            StrExpKind::App(f, arg) => {
                let _ = write!(self.out, "{f} (");
                self.strexp(arg, depth);
                self.s(")");
            }
            StrExpKind::Constrained(inner, a) => {
                self.strexp(inner, depth);
                self.ascription(a, depth);
            }
        }
    }

    fn sigexp(&mut self, s: &SigExp, depth: usize) {
        match &s.kind {
            SigExpKind::Name(n) => self.s(n),
            SigExpKind::Sig(specs) => {
                self.s("sig\n");
                for sp in specs {
                    self.spec(sp, depth + 1);
                    self.s("\n");
                }
                self.indent(depth);
                self.s("end");
            }
        }
    }

    fn spec(&mut self, sp: &Spec, depth: usize) {
        self.indent(depth);
        match &sp.kind {
            SpecKind::Val(vals) => {
                self.s("val ");
                for (i, (n, t)) in vals.iter().enumerate() {
                    if i > 0 {
                        self.s(" and ");
                    }
                    self.id(&LongId::simple(n.clone()), false);
                    self.s(" : ");
                    self.ty(t);
                }
            }
            SpecKind::Type(ts) => {
                self.s("type ");
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        self.s(" and ");
                    }
                    self.tyvars(&t.tyvars);
                    self.s(&t.name);
                    if let Some(d) = &t.def {
                        self.s(" = ");
                        self.ty(d);
                    }
                }
            }
            SpecKind::Datatype(binds) => {
                self.s("datatype ");
                self.datbinds(binds);
            }
            SpecKind::Structure(strs) => {
                self.s("structure ");
                for (i, (n, s)) in strs.iter().enumerate() {
                    if i > 0 {
                        self.s(" and ");
                    }
                    let _ = write!(self.out, "{n} : ");
                    self.sigexp(s, depth);
                }
            }
            SpecKind::Include(s) => {
                self.s("include ");
                self.sigexp(s, depth);
            }
        }
    }
}
