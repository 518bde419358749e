//! Fuel-bounded big-step interpreter for the pure subset. Used as a gate
//! before translation: a program is translated only if every binding
//! matches and evaluation finishes within the fuel budget.
//!
//! Fuel is spent on each saturated application of a closure, a `fun`
//! function or a basis primitive. Constructor and selector applications
//! are free.

use crate::basis;
use crate::diag::Span;
use crate::elab::env::basis_scheme;
use crate::elab::Elaborated;
use crate::frontend::ast::*;
use crate::types::SemType;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;
use std::sync::OnceLock;

pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Nesting limit for non-tail evaluation. Running past it is reported as
/// fuel exhaustion.
const MAX_DEPTH: usize = 100_000;
const STACK_BYTES: usize = 1 << 30;

/// Printed top-level bindings in declaration order; structure members
/// appear as `S.x`.
pub type Bindings = Vec<(String, String)>;

#[derive(Clone, Debug, PartialEq)]
pub enum EvalOutcome {
    Ok(Bindings),
    /// A `Bind`/`Match` failure or an exception raised by the basis.
    BindFailure {
        span: Span,
        message: String,
    },
    FuelExhausted,
    /// Evaluation reached a state the type system should rule out.
    Stuck {
        span: Span,
        message: String,
    },
}

impl EvalOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, EvalOutcome::Ok(_))
    }
}

/// Evaluate a whole unit. Runs on a dedicated thread with a large stack.
pub fn evaluate(program: &Elaborated, fuel: u64) -> EvalOutcome {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .name("sml-eval".into())
            .stack_size(STACK_BYTES)
            .spawn_scoped(s, || run(program, fuel))
            .expect("spawn evaluator thread")
            .join()
            .unwrap_or_else(|_| EvalOutcome::Stuck { span: Span::default(), message: "evaluator panicked".into() })
    })
}

fn run(program: &Elaborated, fuel: u64) -> EvalOutcome {
    let mut it = Interp { fuel, depth: 0 };
    let mut env = Env::default();
    let mut out: Bindings = Vec::new();
    for d in &program.decls {
        let delta = match it.dec(&d.decl, &env) {
            Ok(delta) => delta,
            Err(f) => return f.into(),
        };
        for (name, v) in &delta.vals {
            if delta.cons.contains(name) {
                out.retain(|(k, _)| k != name);
            } else {
                rebind(&mut out, name.to_string(), show(v));
            }
        }
        for (name, m) in &delta.mods {
            out.retain(|(k, _)| !k.starts_with(&format!("{name}.")));
            flatten(name, m, &mut out);
        }
        env = env.extend(delta);
    }
    EvalOutcome::Ok(out)
}

fn rebind(out: &mut Bindings, name: String, value: String) {
    out.retain(|(k, _)| *k != name);
    out.push((name, value));
}

fn flatten(prefix: &str, m: &Module, out: &mut Bindings) {
    for name in &m.order {
        out.push((format!("{prefix}.{name}"), show(&m.vals[name])));
    }
    for (name, sub) in &m.mods {
        flatten(&format!("{prefix}.{name}"), sub, out);
    }
}

/// A runtime value. Closures borrow the syntax tree they were built from.
#[derive(Clone)]
pub enum Value<'a> {
    Int(i64),
    Real(f64),
    Str(Rc<str>),
    Char(char),
    Bool(bool),
    Unit,
    Tuple(Rc<Vec<Value<'a>>>),
    List(List<'a>),
    Record(Rc<BTreeMap<&'a str, Value<'a>>>),
    /// Constructor with its payload, including `SOME` and `NONE`.
    Con(&'a str, Option<Rc<Value<'a>>>),
    /// A constructor awaiting its argument (`SOME`, `::`, user constructors).
    ConFn(&'a str),
    Selector(&'a str),
    Closure(Rc<Closure<'a>>),
    /// Member `index` of a recursive group, with the curried arguments
    /// received so far.
    Fun(Rc<Group<'a>>, usize, Rc<Vec<Value<'a>>>),
    Prim(&'static str, Rc<Vec<Value<'a>>>),
}

impl<'a> Value<'a> {
    pub fn list(items: impl IntoIterator<Item = Value<'a>, IntoIter: DoubleEndedIterator>) -> Self {
        Value::List(List::from_iter_rev(items.into_iter().rev()))
    }

    pub fn tuple(items: Vec<Value<'a>>) -> Self {
        Value::Tuple(Rc::new(items))
    }

    pub fn string(s: &str) -> Self {
        Value::Str(s.into())
    }

    pub fn some(v: Value<'a>) -> Self {
        Value::Con("SOME", Some(Rc::new(v)))
    }

    pub fn none() -> Self {
        Value::Con("NONE", None)
    }
}

impl PartialEq for Value<'_> {
    fn eq(&self, other: &Self) -> bool {
        equal(self, other)
    }
}

impl fmt::Debug for Value<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&show(self))
    }
}

impl fmt::Display for Value<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&show(self))
    }
}

type Seq<'a> = List<'a>;

/// Persistent singly linked list.
#[derive(Clone, Default)]
pub struct List<'a>(Option<Rc<(Value<'a>, List<'a>)>>);

impl<'a> List<'a> {
    pub fn nil() -> Self {
        List(None)
    }

    pub fn cons(h: Value<'a>, t: List<'a>) -> Self {
        List(Some(Rc::new((h, t))))
    }

    pub fn uncons(&self) -> Option<(&Value<'a>, &List<'a>)> {
        self.0.as_ref().map(|c| (&c.0, &c.1))
    }

    pub fn iter(&self) -> ListIter<'_, 'a> {
        ListIter(self)
    }

    pub fn to_vec(&self) -> Vec<Value<'a>> {
        self.iter().cloned().collect()
    }

    /// Build from elements given last-first.
    fn from_iter_rev(items: impl Iterator<Item = Value<'a>>) -> Self {
        items.fold(List::nil(), |t, h| List::cons(h, t))
    }

    fn from_vec(items: Vec<Value<'a>>) -> Self {
        List::from_iter_rev(items.into_iter().rev())
    }
}

impl Drop for List<'_> {
    // iterative so long lists do not exhaust the stack
    fn drop(&mut self) {
        let mut next = self.0.take();
        while let Some(rc) = next {
            match Rc::try_unwrap(rc) {
                Ok((_, mut tail)) => next = tail.0.take(),
                Err(_) => break,
            }
        }
    }
}

pub struct ListIter<'l, 'a>(&'l List<'a>);

impl<'l, 'a> Iterator for ListIter<'l, 'a> {
    type Item = &'l Value<'a>;
    fn next(&mut self) -> Option<Self::Item> {
        let (h, t) = self.0.uncons()?;
        self.0 = t;
        Some(h)
    }
}

pub struct Closure<'a> {
    m: &'a Match,
    env: Env<'a>,
}

pub struct Group<'a> {
    members: Vec<(&'a str, Member<'a>)>,
    /// Environment the group was declared in, without the group itself.
    env: Env<'a>,
}

enum Member<'a> {
    Clauses(&'a FunBind),
    /// `val rec f = fn ...`
    Fn(&'a Match),
}

impl Member<'_> {
    fn arity(&self) -> usize {
        match self {
            Member::Clauses(fb) => fb.arity(),
            Member::Fn(_) => 1,
        }
    }
}

struct Frame<'a> {
    name: &'a str,
    value: Value<'a>,
    next: Option<Rc<Frame<'a>>>,
}

#[derive(Default)]
struct Module<'a> {
    vals: BTreeMap<&'a str, Value<'a>>,
    /// Value names in declaration order, for printing.
    order: Vec<&'a str>,
    mods: BTreeMap<&'a str, Rc<Module<'a>>>,
}

struct FunctorVal<'a> {
    bind: &'a FunctorBind,
    env: Env<'a>,
}

#[derive(Clone, Default)]
struct Env<'a> {
    vals: Option<Rc<Frame<'a>>>,
    mods: Rc<BTreeMap<&'a str, Rc<Module<'a>>>>,
    functors: Rc<BTreeMap<&'a str, Rc<FunctorVal<'a>>>>,
}

#[derive(Default)]
struct Delta<'a> {
    vals: Vec<(&'a str, Value<'a>)>,
    mods: Vec<(&'a str, Rc<Module<'a>>)>,
    functors: Vec<(&'a str, Rc<FunctorVal<'a>>)>,
    /// Names in `vals` that are datatype constructors; not printed.
    cons: Vec<&'a str>,
}

impl<'a> Env<'a> {
    fn bind(&self, name: &'a str, value: Value<'a>) -> Env<'a> {
        Env {
            vals: Some(Rc::new(Frame { name, value, next: self.vals.clone() })),
            mods: self.mods.clone(),
            functors: self.functors.clone(),
        }
    }

    fn bind_all(&self, binds: Vec<(&'a str, Value<'a>)>) -> Env<'a> {
        binds.into_iter().fold(self.clone(), |env, (n, v)| env.bind(n, v))
    }

    fn extend(&self, delta: Delta<'a>) -> Env<'a> {
        let mut env = self.bind_all(delta.vals);
        if !delta.mods.is_empty() {
            let mut mods = (*env.mods).clone();
            mods.extend(delta.mods);
            env.mods = Rc::new(mods);
        }
        if !delta.functors.is_empty() {
            let mut fs = (*env.functors).clone();
            fs.extend(delta.functors);
            env.functors = Rc::new(fs);
        }
        env
    }

    fn local(&self, name: &str) -> Option<&Value<'a>> {
        let mut f = self.vals.as_deref();
        while let Some(frame) = f {
            if frame.name == name {
                return Some(&frame.value);
            }
            f = frame.next.as_deref();
        }
        None
    }

    fn module(&self, path: &[String]) -> Option<&Rc<Module<'a>>> {
        let (first, rest) = path.split_first()?;
        let mut m = self.mods.get(first.as_str())?;
        for q in rest {
            m = m.mods.get(q.as_str())?;
        }
        Some(m)
    }

    fn value(&self, id: &LongId) -> Option<Value<'a>> {
        if id.qualifiers.is_empty() {
            self.local(&id.name).cloned()
        } else {
            self.module(&id.qualifiers)?.vals.get(id.name.as_str()).cloned()
        }
    }
}

enum Fail {
    Bind { span: Span, message: String },
    Fuel,
    Stuck { span: Span, message: String },
}

impl From<Fail> for EvalOutcome {
    fn from(f: Fail) -> Self {
        match f {
            Fail::Bind { span, message } => EvalOutcome::BindFailure { span, message },
            Fail::Fuel => EvalOutcome::FuelExhausted,
            Fail::Stuck { span, message } => EvalOutcome::Stuck { span, message },
        }
    }
}

fn raise(span: Span, exn: &str) -> Fail {
    Fail::Bind { span, message: format!("uncaught exception {exn}") }
}

fn stuck(span: Span, message: impl Into<String>) -> Fail {
    Fail::Stuck { span, message: message.into() }
}

type R<T> = std::result::Result<T, Fail>;

enum Call<'a> {
    Done(Value<'a>),
    Tail(&'a Exp, Env<'a>),
}

struct Interp {
    fuel: u64,
    depth: usize,
}

impl Interp {
    fn spend(&mut self) -> R<()> {
        if self.fuel == 0 {
            return Err(Fail::Fuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn dec<'a>(&mut self, d: &'a Dec, env: &Env<'a>) -> R<Delta<'a>> {
        let mut delta = Delta::default();
        match &d.kind {
            DecKind::Val { rec: false, binds, .. } => {
                for vb in binds {
                    let v = self.eval(&vb.exp, env.clone())?;
                    let mut out = Vec::new();
                    if !matches(&vb.pat, &v, &mut out) {
                        return Err(Fail::Bind { span: vb.meta.span, message: "uncaught exception Bind".into() });
                    }
                    delta.vals.extend(out);
                }
            }
            DecKind::Val { rec: true, binds, .. } => {
                let mut members = Vec::new();
                for vb in binds {
                    let name =
                        pat_name(&vb.pat).ok_or_else(|| stuck(vb.meta.span, "val rec needs a variable pattern"))?;
                    let m = fn_match(&vb.exp).ok_or_else(|| stuck(vb.meta.span, "val rec needs a fn expression"))?;
                    members.push((name, Member::Fn(m)));
                }
                delta.vals = group_values(members, env);
            }
            DecKind::Fun { binds, .. } => {
                let members = binds.iter().map(|fb| (fb.name.as_str(), Member::Clauses(fb))).collect();
                delta.vals = group_values(members, env);
            }
            DecKind::Datatype(dbs) => {
                for db in dbs {
                    for cb in &db.cons {
                        let v = match cb.arg {
                            Some(_) => Value::ConFn(&cb.name),
                            None => Value::Con(&cb.name, None),
                        };
                        delta.vals.push((&cb.name, v));
                        delta.cons.push(&cb.name);
                    }
                }
            }
            DecKind::Local(a, b) => {
                let mut inner = env.clone();
                for x in a {
                    let dl = self.dec(x, &inner)?;
                    inner = inner.extend(dl);
                }
                for x in b {
                    let dl = self.dec(x, &inner)?;
                    inner = inner.extend(clone_delta(&dl));
                    merge(&mut delta, dl);
                }
            }
            DecKind::Structure(sbs) => {
                for sb in sbs {
                    let m = self.strexp(&sb.body, env)?;
                    delta.mods.push((&sb.name, m));
                }
            }
            DecKind::Functor(fbs) => {
                for fb in fbs {
                    delta.functors.push((&fb.name, Rc::new(FunctorVal { bind: fb, env: env.clone() })));
                }
            }
            DecKind::Type(_) | DecKind::Infix { .. } | DecKind::Nonfix(_) | DecKind::Signature(_) => {}
        }
        Ok(delta)
    }

    fn strexp<'a>(&mut self, s: &'a StrExp, env: &Env<'a>) -> R<Rc<Module<'a>>> {
        match &s.kind {
            StrExpKind::Struct(decs) => {
                let mut inner = env.clone();
                let mut m = Module::default();
                for d in decs {
                    let dl = self.dec(d, &inner)?;
                    for (n, v) in &dl.vals {
                        m.order.retain(|k| k != n);
                        if !dl.cons.contains(n) {
                            m.order.push(n);
                        }
                        m.vals.insert(n, v.clone());
                    }
                    for (n, sub) in &dl.mods {
                        m.mods.insert(n, sub.clone());
                    }
                    inner = inner.extend(dl);
                }
                Ok(Rc::new(m))
            }
            StrExpKind::Name(id) => {
                let mut path = id.qualifiers.clone();
                path.push(id.name.clone());
                env.module(&path).cloned().ok_or_else(|| stuck(s.meta.span, format!("unbound structure {id}")))
            }
            StrExpKind::App(f, arg) => {
                let arg = self.strexp(arg, env)?;
                let fv = env
                    .functors
                    .get(f.as_str())
                    .cloned()
                    .ok_or_else(|| stuck(s.meta.span, format!("unbound functor {f}")))?;
                let mut delta = Delta::default();
                delta.mods.push((&fv.bind.param, arg));
                let body_env = fv.env.extend(delta);
                self.strexp(&fv.bind.body, &body_env)
            }
            StrExpKind::Constrained(inner, _) => self.strexp(inner, env),
        }
    }

    fn eval<'a>(&mut self, e: &'a Exp, env: Env<'a>) -> R<Value<'a>> {
        self.depth += 1;
        let r = if self.depth > MAX_DEPTH { Err(Fail::Fuel) } else { self.eval_loop(e, env) };
        self.depth -= 1;
        r
    }

    fn eval_loop<'a>(&mut self, mut e: &'a Exp, mut env: Env<'a>) -> R<Value<'a>> {
        loop {
            match &e.kind {
                ExpKind::If(c, a, b) => {
                    e = if self.eval_bool(c, &env)? { a } else { b };
                }
                ExpKind::Andalso(a, b) => {
                    if !self.eval_bool(a, &env)? {
                        return Ok(Value::Bool(false));
                    }
                    e = b;
                }
                ExpKind::Orelse(a, b) => {
                    if self.eval_bool(a, &env)? {
                        return Ok(Value::Bool(true));
                    }
                    e = b;
                }
                ExpKind::Typed(x, _) => e = x,
                ExpKind::Case(scrut, m) => {
                    let v = self.eval(scrut, env.clone())?;
                    let (body, env2) = select(m, &v, &env)?;
                    e = body;
                    env = env2;
                }
                ExpKind::Let(decs, body) => {
                    for d in decs {
                        let delta = self.dec(d, &env)?;
                        env = env.extend(delta);
                    }
                    e = body;
                }
                ExpKind::App(f, a) => {
                    let fv = self.eval(f, env.clone())?;
                    let av = self.eval(a, env.clone())?;
                    match self.call(fv, av, e.meta.span)? {
                        Call::Done(v) => return Ok(v),
                        Call::Tail(body, env2) => {
                            e = body;
                            env = env2;
                        }
                    }
                }
                ExpKind::Infix { op, lhs, rhs } => {
                    let fv = self.ident(op, &env, e.meta.span)?;
                    let l = self.eval(lhs, env.clone())?;
                    let r = self.eval(rhs, env.clone())?;
                    match self.call(fv, Value::tuple(vec![l, r]), e.meta.span)? {
                        Call::Done(v) => return Ok(v),
                        Call::Tail(body, env2) => {
                            e = body;
                            env = env2;
                        }
                    }
                }
                _ => return self.simple(e, &env),
            }
        }
    }

    fn eval_bool<'a>(&mut self, e: &'a Exp, env: &Env<'a>) -> R<bool> {
        match self.eval(e, env.clone())? {
            Value::Bool(b) => Ok(b),
            v => Err(stuck(e.meta.span, format!("expected a boolean, found {}", show(&v)))),
        }
    }

    fn simple<'a>(&mut self, e: &'a Exp, env: &Env<'a>) -> R<Value<'a>> {
        Ok(match &e.kind {
            ExpKind::Var { name, .. } | ExpKind::Con { name, .. } => self.ident(name, env, e.meta.span)?,
            ExpKind::SCon(c) => scon_value(c),
            ExpKind::Unit => Value::Unit,
            ExpKind::Tuple(es) => {
                let vs = es.iter().map(|x| self.eval(x, env.clone())).collect::<R<Vec<_>>>()?;
                Value::tuple(vs)
            }
            ExpKind::List(es) => {
                let vs = es.iter().map(|x| self.eval(x, env.clone())).collect::<R<Vec<_>>>()?;
                Value::List(List::from_vec(vs))
            }
            ExpKind::Record(fs) => {
                let mut map = BTreeMap::new();
                for (l, x) in fs {
                    map.insert(l.as_str(), self.eval(x, env.clone())?);
                }
                Value::Record(Rc::new(map))
            }
            ExpKind::Selector(l) => Value::Selector(l),
            ExpKind::Fn(m) => Value::Closure(Rc::new(Closure { m, env: env.clone() })),
            _ => return self.eval(e, env.clone()),
        })
    }

    /// Resolve a value identifier: program bindings first, then builtin
    /// constructors and the basis.
    fn ident<'a>(&mut self, id: &'a LongId, env: &Env<'a>, span: Span) -> R<Value<'a>> {
        if let Some(v) = env.value(id) {
            return Ok(v);
        }
        let full = id.to_string();
        if let Some(v) = builtin_con(&full) {
            return Ok(v);
        }
        if let Some(b) = basis::lookup(&full) {
            return Ok(Value::Prim(b.sml, Rc::new(Vec::new())));
        }
        Err(stuck(span, format!("unbound value {full}")))
    }

    /// Apply `f` to `arg`; closure bodies are returned for the caller's
    /// loop to continue in tail position.
    fn call<'a>(&mut self, f: Value<'a>, arg: Value<'a>, span: Span) -> R<Call<'a>> {
        match f {
            Value::Closure(c) => {
                self.spend()?;
                let (body, env) = select(c.m, &arg, &c.env)?;
                Ok(Call::Tail(body, env))
            }
            Value::Fun(g, i, args) => {
                let mut args = (*args).clone();
                args.push(arg);
                let member = &g.members[i].1;
                if args.len() < member.arity() {
                    return Ok(Call::Done(Value::Fun(g, i, Rc::new(args))));
                }
                self.spend()?;
                let env = group_env(&g);
                match member {
                    Member::Fn(m) => {
                        let (body, env) = select(m, &args[0], &env)?;
                        Ok(Call::Tail(body, env))
                    }
                    Member::Clauses(fb) => {
                        for c in &fb.clauses {
                            let mut out = Vec::new();
                            if c.pats.iter().zip(&args).all(|(p, v)| matches(p, v, &mut out)) {
                                return Ok(Call::Tail(&c.body, env.bind_all(out)));
                            }
                        }
                        Err(Fail::Bind { span: fb.meta.span, message: "uncaught exception Match".into() })
                    }
                }
            }
            Value::Prim(name, args) => {
                let mut args = (*args).clone();
                args.push(arg);
                if args.len() < prim_arity(name) {
                    return Ok(Call::Done(Value::Prim(name, Rc::new(args))));
                }
                self.spend()?;
                self.prim(name, args, span).map(Call::Done)
            }
            Value::ConFn(name) => Ok(Call::Done(construct(name, arg))),
            Value::Selector(l) => match arg {
                Value::Record(map) => {
                    map.get(l).cloned().map(Call::Done).ok_or_else(|| stuck(span, format!("record has no field {l}")))
                }
                v => Err(stuck(span, format!("#{l} applied to {}", show(&v)))),
            },
            v => Err(stuck(span, format!("{} is not a function", show(&v)))),
        }
    }

    fn apply<'a>(&mut self, f: &Value<'a>, arg: Value<'a>, span: Span) -> R<Value<'a>> {
        match self.call(f.clone(), arg, span)? {
            Call::Done(v) => Ok(v),
            Call::Tail(body, env) => self.eval(body, env),
        }
    }

    fn prim<'a>(&mut self, name: &'static str, args: Vec<Value<'a>>, span: Span) -> R<Value<'a>> {
        use Value::*;
        let bad = || stuck(span, format!("ill-typed arguments to {name}"));
        let pair = |v: &Value<'a>| match v {
            Tuple(t) if t.len() == 2 => Ok((t[0].clone(), t[1].clone())),
            _ => Err(bad()),
        };
        let int = |v: &Value<'a>| match v {
            Int(i) => Ok(*i),
            _ => Err(bad()),
        };
        let list = |v: &Value<'a>| match v {
            List(l) => Ok(l.clone()),
            _ => Err(bad()),
        };
        let string = |v: &Value<'a>| match v {
            Str(s) => Ok(s.clone()),
            _ => Err(bad()),
        };
        let chr = |v: &Value<'a>| match v {
            Char(c) => Ok(*c),
            _ => Err(bad()),
        };
        let real = |v: &Value<'a>| match v {
            Real(r) => Ok(*r),
            _ => Err(bad()),
        };
        let overflow = || raise(span, "Overflow");
        let short = name.rsplit_once('.').map_or(name, |(_, n)| n);
        let a = &args[0];
        Ok(match name {
            "+" | "-" | "*" => match pair(a)? {
                (Int(x), Int(y)) => Int(match name {
                    "+" => x.checked_add(y),
                    "-" => x.checked_sub(y),
                    _ => x.checked_mul(y),
                }
                .ok_or_else(overflow)?),
                (Real(x), Real(y)) => Real(match name {
                    "+" => x + y,
                    "-" => x - y,
                    _ => x * y,
                }),
                _ => return Err(bad()),
            },
            "~" => match a {
                Int(x) => Int(x.checked_neg().ok_or_else(overflow)?),
                Real(x) => Real(-x),
                _ => return Err(bad()),
            },
            "abs" | "Int.abs" => match a {
                Int(x) => Int(x.checked_abs().ok_or_else(overflow)?),
                Real(x) => Real(x.abs()),
                _ => return Err(bad()),
            },
            "<" | ">" | "<=" | ">=" => {
                let (x, y) = pair(a)?;
                let ord = compare(&x, &y).ok_or_else(bad)?;
                Bool(match name {
                    "<" => ord.is_lt(),
                    ">" => ord.is_gt(),
                    "<=" => ord.is_le(),
                    _ => ord.is_ge(),
                })
            }
            "=" => {
                let (x, y) = pair(a)?;
                Bool(equal(&x, &y))
            }
            "<>" => {
                let (x, y) = pair(a)?;
                Bool(!equal(&x, &y))
            }
            "o" => {
                let (f, g) = pair(a)?;
                let y = self.apply(&g, args[1].clone(), span)?;
                self.apply(&f, y, span)?
            }
            "div" | "Int.div" | "mod" | "Int.mod" => {
                let (x, y) = pair(a)?;
                let (x, y) = (int(&x)?, int(&y)?);
                if y == 0 {
                    return Err(raise(span, "Div"));
                }
                if short == "div" {
                    Int(floor_div(x, y).ok_or_else(overflow)?)
                } else {
                    Int(floor_mod(x, y))
                }
            }
            "Int.toString" => Str(show_int(int(a)?).into()),
            "Int.min" | "Int.max" => {
                let (x, y) = pair(a)?;
                let (x, y) = (int(&x)?, int(&y)?);
                Int(if short == "min" { x.min(y) } else { x.max(y) })
            }
            "/" => {
                let (x, y) = pair(a)?;
                Real(real(&x)? / real(&y)?)
            }
            "real" | "Real.fromInt" => Real(int(a)? as f64),
            "floor" | "ceil" | "round" | "trunc" | "Real.floor" | "Real.ceil" | "Real.round" | "Real.trunc" => {
                let x = real(a)?;
                if x.is_nan() {
                    return Err(raise(span, "Domain"));
                }
                let r = match short {
                    "floor" => x.floor(),
                    "ceil" => x.ceil(),
                    "round" => x.round_ties_even(),
                    _ => x.trunc(),
                };
                if !(i64::MIN as f64..i64::MAX as f64).contains(&r) {
                    return Err(overflow());
                }
                Int(r as i64)
            }
            "not" | "Bool.not" => match a {
                Bool(b) => Bool(!b),
                _ => return Err(bad()),
            },
            "Bool.toString" => match a {
                Bool(b) => Str(b.to_string().into()),
                _ => return Err(bad()),
            },
            "@" => {
                let (x, y) = pair(a)?;
                let (x, y) = (list(&x)?, list(&y)?);
                List(x.to_vec().into_iter().rev().fold(y, |t, h| Seq::cons(h, t)))
            }
            "hd" | "List.hd" => list(a)?.uncons().map(|(h, _)| h.clone()).ok_or_else(|| raise(span, "Empty"))?,
            "tl" | "List.tl" => List(list(a)?.uncons().map(|(_, t)| t.clone()).ok_or_else(|| raise(span, "Empty"))?),
            "length" | "List.length" => Int(list(a)?.iter().count() as i64),
            "null" | "List.null" => Bool(list(a)?.uncons().is_none()),
            "rev" | "List.rev" => List(Seq::from_iter_rev(list(a)?.to_vec().into_iter())),
            "List.last" => list(a)?.iter().last().cloned().ok_or_else(|| raise(span, "Empty"))?,
            "List.nth" => {
                let (l, i) = pair(a)?;
                let (l, i) = (list(&l)?, int(&i)?);
                usize::try_from(i)
                    .ok()
                    .and_then(|i| l.iter().nth(i).cloned())
                    .ok_or_else(|| raise(span, "Subscript"))?
            }
            "List.take" | "List.drop" => {
                let (l, i) = pair(a)?;
                let (l, i) = (list(&l)?.to_vec(), int(&i)?);
                let i = usize::try_from(i).ok().filter(|i| *i <= l.len()).ok_or_else(|| raise(span, "Subscript"))?;
                let part = if short == "take" { l[..i].to_vec() } else { l[i..].to_vec() };
                List(Seq::from_vec(part))
            }
            "List.concat" => {
                let mut all = Vec::new();
                for x in list(a)?.iter() {
                    all.extend(list(x)?.to_vec());
                }
                List(Seq::from_vec(all))
            }
            "map" | "List.map" => {
                let mut out = Vec::new();
                for x in list(&args[1])?.iter() {
                    out.push(self.apply(a, x.clone(), span)?);
                }
                List(Seq::from_vec(out))
            }
            "List.filter" | "List.exists" | "List.all" => {
                let mut kept = Vec::new();
                for x in list(&args[1])?.iter() {
                    let keep = match self.apply(a, x.clone(), span)? {
                        Bool(b) => b,
                        _ => return Err(bad()),
                    };
                    match (short, keep) {
                        ("exists", true) => return Ok(Bool(true)),
                        ("all", false) => return Ok(Bool(false)),
                        ("filter", true) => kept.push(x.clone()),
                        _ => {}
                    }
                }
                match short {
                    "exists" => Bool(false),
                    "all" => Bool(true),
                    _ => List(Seq::from_vec(kept)),
                }
            }
            "foldl" | "List.foldl" | "foldr" | "List.foldr" => {
                let mut items = list(&args[2])?.to_vec();
                if short == "foldr" {
                    items.reverse();
                }
                let mut acc = args[1].clone();
                for x in items {
                    acc = self.apply(a, Value::tuple(vec![x, acc]), span)?;
                }
                acc
            }
            "valOf" | "Option.valOf" => match a {
                Con("SOME", Some(v)) => (**v).clone(),
                Con("NONE", None) => return Err(raise(span, "Option")),
                _ => return Err(bad()),
            },
            "isSome" | "Option.isSome" => match a {
                Con(n, _) => Bool(*n == "SOME"),
                _ => return Err(bad()),
            },
            "getOpt" | "Option.getOpt" => match pair(a)? {
                (Con("SOME", Some(v)), _) => (*v).clone(),
                (_, d) => d,
            },
            "Option.map" => match &args[1] {
                Con("SOME", Some(v)) => Value::some(self.apply(a, (**v).clone(), span)?),
                other => other.clone(),
            },
            "^" => {
                let (x, y) = pair(a)?;
                Str(format!("{}{}", string(&x)?, string(&y)?).into())
            }
            "size" | "String.size" => Int(string(a)?.chars().count() as i64),
            "explode" | "String.explode" => List(Seq::from_vec(string(a)?.chars().map(Char).collect())),
            "implode" | "String.implode" => {
                let s = list(a)?.iter().map(chr).collect::<R<String>>()?;
                Str(s.into())
            }
            "str" | "String.str" => Str(chr(a)?.to_string().into()),
            "concat" | "String.concat" => {
                let mut s = String::new();
                for x in list(a)?.iter() {
                    s.push_str(&string(x)?);
                }
                Str(s.into())
            }
            "String.sub" => {
                let (s, i) = pair(a)?;
                let (s, i) = (string(&s)?, int(&i)?);
                usize::try_from(i)
                    .ok()
                    .and_then(|i| s.chars().nth(i))
                    .map(Char)
                    .ok_or_else(|| raise(span, "Subscript"))?
            }
            "String.substring" => {
                let t = match a {
                    Tuple(t) if t.len() == 3 => t.clone(),
                    _ => return Err(bad()),
                };
                let (s, i, n) = (string(&t[0])?, int(&t[1])?, int(&t[2])?);
                let chars: Vec<char> = s.chars().collect();
                if i < 0 || n < 0 || (i + n) as usize > chars.len() {
                    return Err(raise(span, "Subscript"));
                }
                Str(chars[i as usize..(i + n) as usize].iter().collect::<String>().into())
            }
            "String.isPrefix" => Bool(string(&args[1])?.starts_with(&*string(a)?)),
            "ord" | "Char.ord" => Int(chr(a)? as i64),
            "chr" | "Char.chr" => {
                let i = int(a)?;
                if !(0..=255).contains(&i) {
                    return Err(raise(span, "Chr"));
                }
                Char(char::from(i as u8))
            }
            "Char.isDigit" => Bool(chr(a)?.is_ascii_digit()),
            "Char.isAlpha" => Bool(chr(a)?.is_ascii_alphabetic()),
            "Char.isSpace" => Bool(matches!(chr(a)?, ' ' | '\t' | '\n' | '\r' | '\x0b' | '\x0c')),
            "Char.toUpper" => Char(chr(a)?.to_ascii_uppercase()),
            "Char.toLower" => Char(chr(a)?.to_ascii_lowercase()),
            "ListPair.zip" => {
                let (x, y) = pair(a)?;
                let (x, y) = (list(&x)?, list(&y)?);
                let zipped = x.iter().zip(y.iter()).map(|(p, q)| Value::tuple(vec![p.clone(), q.clone()])).collect();
                List(Seq::from_vec(zipped))
            }
            "ListPair.unzip" => {
                let (mut xs, mut ys) = (Vec::new(), Vec::new());
                for p in list(a)?.iter() {
                    let (x, y) = pair(p)?;
                    xs.push(x);
                    ys.push(y);
                }
                Value::tuple(vec![List(Seq::from_vec(xs)), List(Seq::from_vec(ys))])
            }
            _ => return Err(stuck(span, format!("no semantics for basis value {name}"))),
        })
    }
}

fn clone_delta<'a>(d: &Delta<'a>) -> Delta<'a> {
    Delta { vals: d.vals.clone(), mods: d.mods.clone(), functors: d.functors.clone(), cons: d.cons.clone() }
}

fn merge<'a>(into: &mut Delta<'a>, d: Delta<'a>) {
    into.vals.extend(d.vals);
    into.mods.extend(d.mods);
    into.functors.extend(d.functors);
}

fn group_values<'a>(members: Vec<(&'a str, Member<'a>)>, env: &Env<'a>) -> Vec<(&'a str, Value<'a>)> {
    let names: Vec<&'a str> = members.iter().map(|(n, _)| *n).collect();
    let g = Rc::new(Group { members, env: env.clone() });
    names.into_iter().enumerate().map(|(i, n)| (n, Value::Fun(g.clone(), i, Rc::new(Vec::new())))).collect()
}

fn group_env<'a>(g: &Rc<Group<'a>>) -> Env<'a> {
    let binds = (0..g.members.len()).map(|i| (g.members[i].0, Value::Fun(g.clone(), i, Rc::new(Vec::new())))).collect();
    g.env.bind_all(binds)
}

fn pat_name(p: &Pat) -> Option<&str> {
    match &p.kind {
        PatKind::Var(x) => Some(x),
        PatKind::Typed(p, _) => pat_name(p),
        _ => None,
    }
}

fn fn_match(e: &Exp) -> Option<&Match> {
    match &e.kind {
        ExpKind::Fn(m) => Some(m),
        ExpKind::Typed(e, _) => fn_match(e),
        _ => None,
    }
}

/// First rule of `m` matching `v`, with the environment for its body.
fn select<'a>(m: &'a Match, v: &Value<'a>, env: &Env<'a>) -> R<(&'a Exp, Env<'a>)> {
    for r in &m.rules {
        let mut out = Vec::new();
        if matches(&r.pat, v, &mut out) {
            return Ok((&r.exp, env.bind_all(out)));
        }
    }
    Err(Fail::Bind { span: m.meta.span, message: "uncaught exception Match".into() })
}

fn matches<'a>(p: &'a Pat, v: &Value<'a>, out: &mut Vec<(&'a str, Value<'a>)>) -> bool {
    match (&p.kind, v) {
        (PatKind::Wild, _) | (PatKind::Unit, _) => true,
        (PatKind::Var(x), _) => {
            out.push((x, v.clone()));
            true
        }
        (PatKind::Typed(p, _), _) => matches(p, v, out),
        (PatKind::Layered { name, pat, .. }, _) => {
            out.push((name, v.clone()));
            matches(pat, v, out)
        }
        (PatKind::SCon(c), _) => match (c, v) {
            (SCon::Int(a), Value::Int(b)) => a == b,
            (SCon::Str(a), Value::Str(b)) => **a == **b,
            (SCon::Char(a), Value::Char(b)) => a == b,
            _ => false,
        },
        (PatKind::Tuple(ps), Value::Tuple(vs)) => {
            ps.len() == vs.len() && ps.iter().zip(vs.iter()).all(|(p, v)| matches(p, v, out))
        }
        (PatKind::List(ps), Value::List(l)) => {
            let mut cur = l;
            for p in ps {
                match cur.uncons() {
                    Some((h, t)) if matches(p, h, out) => cur = t,
                    _ => return false,
                }
            }
            cur.uncons().is_none()
        }
        (PatKind::Record { fields, .. }, Value::Record(map)) => {
            fields.iter().all(|(l, p)| map.get(l.as_str()).is_some_and(|v| matches(p, v, out)))
        }
        (PatKind::Con(id), _) => match (id.name.as_str(), v) {
            ("true", Value::Bool(b)) => *b,
            ("false", Value::Bool(b)) => !*b,
            ("nil", Value::List(l)) => l.uncons().is_none(),
            (n, Value::Con(c, None)) => n == *c,
            _ => false,
        },
        (PatKind::ConApp(id, arg), _) => con_app_matches(&id.name, arg, v, out),
        (PatKind::Infix { op, lhs, rhs }, _) => match (op.as_str(), v) {
            ("::", Value::List(l)) => match l.uncons() {
                Some((h, t)) => matches(lhs, h, out) && matches(rhs, &Value::List(t.clone()), out),
                None => false,
            },
            (n, Value::Con(c, Some(payload))) if n == *c => match &**payload {
                Value::Tuple(vs) if vs.len() == 2 => matches(lhs, &vs[0], out) && matches(rhs, &vs[1], out),
                _ => false,
            },
            _ => false,
        },
        _ => false,
    }
}

fn con_app_matches<'a>(name: &str, arg: &'a Pat, v: &Value<'a>, out: &mut Vec<(&'a str, Value<'a>)>) -> bool {
    match v {
        Value::List(l) if name == "::" => match l.uncons() {
            Some((h, t)) => matches(arg, &Value::tuple(vec![h.clone(), Value::List(t.clone())]), out),
            None => false,
        },
        Value::Con(c, Some(payload)) if *c == name => matches(arg, payload, out),
        _ => false,
    }
}

fn construct<'a>(name: &'a str, arg: Value<'a>) -> Value<'a> {
    if name == "::" {
        if let Value::Tuple(t) = &arg {
            if let (Some(h), Some(Value::List(tl))) = (t.first(), t.get(1)) {
                return Value::List(List::cons(h.clone(), tl.clone()));
            }
        }
    }
    Value::Con(name, Some(Rc::new(arg)))
}

fn builtin_con(name: &str) -> Option<Value<'static>> {
    Some(match name {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        "nil" => Value::List(List::nil()),
        "NONE" => Value::none(),
        "SOME" => Value::ConFn("SOME"),
        "::" => Value::ConFn("::"),
        _ => return None,
    })
}

fn prim_arity(name: &str) -> usize {
    static ARITY: OnceLock<HashMap<&'static str, usize>> = OnceLock::new();
    let table = ARITY.get_or_init(|| {
        basis::BASIS
            .iter()
            .map(|b| {
                let mut t = basis_scheme(b).body;
                let mut n = 0;
                while let SemType::Arrow(_, r) = t {
                    n += 1;
                    t = *r;
                }
                (b.sml, n)
            })
            .collect()
    });
    table.get(name).copied().unwrap_or(1)
}

fn scon_value(c: &SCon) -> Value<'static> {
    match c {
        SCon::Int(i) => Value::Int(*i),
        SCon::Real(r) => Value::Real(r.replace('~', "-").parse().unwrap_or(f64::NAN)),
        SCon::Str(s) => Value::Str(s.as_str().into()),
        SCon::Char(c) => Value::Char(*c),
    }
}

fn floor_div(x: i64, y: i64) -> Option<i64> {
    let q = x.checked_div(y)?;
    Some(if x % y != 0 && ((x < 0) != (y < 0)) { q - 1 } else { q })
}

fn floor_mod(x: i64, y: i64) -> i64 {
    let r = x.wrapping_rem(y);
    if r != 0 && ((r < 0) != (y < 0)) {
        r + y
    } else {
        r
    }
}

/// Structural equality; functions are never equal.
pub fn equal(a: &Value, b: &Value) -> bool {
    use Value::*;
    match (a, b) {
        (Int(x), Int(y)) => x == y,
        (Real(x), Real(y)) => x == y,
        (Str(x), Str(y)) => x == y,
        (Char(x), Char(y)) => x == y,
        (Bool(x), Bool(y)) => x == y,
        (Unit, Unit) => true,
        (Tuple(x), Tuple(y)) => x.len() == y.len() && x.iter().zip(y.iter()).all(|(p, q)| equal(p, q)),
        (List(x), List(y)) => {
            let (mut i, mut j) = (x.iter(), y.iter());
            loop {
                match (i.next(), j.next()) {
                    (None, None) => return true,
                    (Some(p), Some(q)) if equal(p, q) => {}
                    _ => return false,
                }
            }
        }
        (Record(x), Record(y)) => {
            x.len() == y.len() && x.iter().zip(y.iter()).all(|((k, p), (l, q))| k == l && equal(p, q))
        }
        (Con(m, p), Con(n, q)) => {
            m == n
                && match (p, q) {
                    (None, None) => true,
                    (Some(p), Some(q)) => equal(p, q),
                    _ => false,
                }
        }
        _ => false,
    }
}

fn compare(a: &Value, b: &Value) -> Option<std::cmp::Ordering> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => Some(x.cmp(y)),
        (Value::Real(x), Value::Real(y)) => x.partial_cmp(y),
        (Value::Str(x), Value::Str(y)) => Some(x.cmp(y)),
        (Value::Char(x), Value::Char(y)) => Some(x.cmp(y)),
        _ => None,
    }
}

fn show_int(i: i64) -> String {
    if i < 0 {
        format!("~{}", i.unsigned_abs())
    } else {
        i.to_string()
    }
}

fn show_real(r: f64) -> String {
    let s = if r.is_nan() {
        "nan".to_string()
    } else if r.is_infinite() {
        "inf".to_string()
    } else if r == r.trunc() && r.abs() < 1e15 {
        format!("{r:.1}")
    } else {
        format!("{r}")
    };
    s.replace('-', "~")
}

fn escape(c: char) -> String {
    match c {
        '"' => "\\\"".into(),
        '\\' => "\\\\".into(),
        '\n' => "\\n".into(),
        '\t' => "\\t".into(),
        c if (c as u32) < 32 => format!("\\^{}", char::from(c as u8 + 64)),
        c if (c as u32) > 126 => format!("\\{:03}", c as u32),
        c => c.to_string(),
    }
}

/// Print a value the way an SML toplevel does.
pub fn show(v: &Value) -> String {
    match v {
        Value::Int(i) => show_int(*i),
        Value::Real(r) => show_real(*r),
        Value::Str(s) => format!("\"{}\"", s.chars().map(escape).collect::<String>()),
        Value::Char(c) => format!("#\"{}\"", escape(*c)),
        Value::Bool(b) => b.to_string(),
        Value::Unit => "()".into(),
        Value::Tuple(vs) => format!("({})", vs.iter().map(show).collect::<Vec<_>>().join(",")),
        Value::List(l) => format!("[{}]", l.iter().map(show).collect::<Vec<_>>().join(",")),
        Value::Record(m) => {
            format!("{{{}}}", m.iter().map(|(k, v)| format!("{k}={}", show(v))).collect::<Vec<_>>().join(","))
        }
        Value::Con(n, None) => n.to_string(),
        Value::Con(n, Some(p)) => {
            let arg = show(p);
            let atomic = !matches!(&**p, Value::Con(_, Some(_)))
                && !matches!(&**p, Value::Int(i) if *i < 0)
                && !matches!(&**p, Value::Real(r) if *r < 0.0);
            if atomic {
                format!("{n} {arg}")
            } else {
                format!("{n} ({arg})")
            }
        }
        Value::ConFn(_) | Value::Selector(_) | Value::Closure(_) | Value::Fun(..) | Value::Prim(..) => "fn".into(),
    }
}

/// Failure of a direct basis call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StubError {
    UnknownName(String),
    /// The call raised the named exception.
    BindFailure(String),
}

/// Apply a basis function to curried arguments (a tupled function takes
/// one tuple argument).
pub fn apply_basis_stub(name: &str, args: Vec<Value<'static>>) -> Result<Value<'static>, StubError> {
    let entry = basis::lookup(name).ok_or_else(|| StubError::UnknownName(name.into()))?;
    let mut it = Interp { fuel: DEFAULT_FUEL, depth: 0 };
    let mut f = Value::Prim(entry.sml, Rc::new(Vec::new()));
    for a in args {
        f = it.apply(&f, a, Span::default()).map_err(|e| match e {
            Fail::Bind { message, .. } => {
                StubError::BindFailure(message.trim_start_matches("uncaught exception ").into())
            }
            Fail::Fuel => StubError::BindFailure("fuel".into()),
            Fail::Stuck { message, .. } => StubError::BindFailure(message),
        })?;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elab::elaborate;
    use crate::frontend::parse_source;

    fn eval_src(src: &str, fuel: u64) -> EvalOutcome {
        let (p, i) = parse_source(src).unwrap();
        evaluate(&elaborate(&p, &i).unwrap(), fuel)
    }

    fn ok(src: &str) -> Vec<(String, String)> {
        match eval_src(src, DEFAULT_FUEL) {
            EvalOutcome::Ok(b) => b,
            other => panic!("{src}: {other:?}"),
        }
    }

    fn pairs(items: &[(&str, &str)]) -> Vec<(String, String)> {
        items.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn cons_binding() {
        assert_eq!(ok("val x::l = [1,2,3]"), pairs(&[("x", "1"), ("l", "[2,3]")]));
        assert!(matches!(eval_src("val x::l = []", 100), EvalOutcome::BindFailure { .. }));
    }

    #[test]
    fn divergence() {
        let r = eval_src("fun loop x = loop (x+1) val y = loop 0", 10_000);
        assert_eq!(r, EvalOutcome::FuelExhausted);
    }

    #[test]
    fn deep_recursion() {
        let src = "fun count 0 = 0 | count n = 1 + count (n - 1) val x = count 50000";
        assert_eq!(ok(src), pairs(&[("count", "fn"), ("x", "50000")]));
    }

    #[test]
    fn stubs() {
        let l = Value::list(vec![Value::Int(5), Value::Int(6)]);
        assert_eq!(apply_basis_stub("List.hd", vec![l]), Ok(Value::Int(5)));
        let empty = Value::list(Vec::new());
        assert_eq!(apply_basis_stub("List.hd", vec![empty]), Err(StubError::BindFailure("Empty".into())));
        assert_eq!(apply_basis_stub("Option.valOf", vec![Value::none()]), Err(StubError::BindFailure("Option".into())));
        assert!(matches!(apply_basis_stub("List.frob", vec![]), Err(StubError::UnknownName(_))));
    }

    #[test]
    fn integer_division_floors() {
        let b = ok("val a = ~7 div 2 val b = ~7 mod 2 val c = 7 div ~2 val d = 7 mod ~2");
        assert_eq!(b, pairs(&[("a", "~4"), ("b", "1"), ("c", "~4"), ("d", "~1")]));
    }

    #[test]
    fn fuel_is_monotone() {
        let src = "fun f 0 = 0 | f n = n + f (n - 1) val x = f 30";
        let needed = (1..200).find(|&n| eval_src(src, n).is_ok()).unwrap();
        for n in needed..needed + 20 {
            assert_eq!(eval_src(src, n), eval_src(src, DEFAULT_FUEL));
        }
        assert_eq!(eval_src(src, needed - 1), EvalOutcome::FuelExhausted);
    }
}
