//! Well-typed random programs over int, bool and int list.

use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum T {
    Int,
    Bool,
    IntList,
}

const TYPES: [T; 3] = [T::Int, T::Bool, T::IntList];

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    /// Values in scope.
    vars: Vec<(String, T)>,
    /// Unary functions in scope: name, argument type, result type.
    funs: Vec<(String, T, T)>,
    fresh: usize,
}

impl<R: Rng> Gen<'_, R> {
    fn name(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    fn pick_var(&mut self, t: T) -> Option<String> {
        let c: Vec<&String> = self.vars.iter().filter(|(_, u)| *u == t).map(|(n, _)| n).collect();
        (!c.is_empty()).then(|| c[self.rng.gen_range(0..c.len())].clone())
    }

    fn exp(&mut self, t: T, depth: u32) -> String {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return self.leaf(t);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..6) {
            0 => format!("(if {} then {} else {})", self.exp(T::Bool, d), self.exp(t, d), self.exp(t, d)),
            1 => {
                let u = TYPES[self.rng.gen_range(0..3)];
                let x = self.name("x");
                let e = self.exp(u, d);
                self.vars.push((x.clone(), u));
                let body = self.exp(t, d);
                self.vars.pop();
                format!("(let val {x} = {e} in {body} end)")
            }
            2 => {
                let f: Vec<(String, T)> =
                    self.funs.iter().filter(|(_, _, r)| *r == t).map(|(n, a, _)| (n.clone(), *a)).collect();
                if f.is_empty() {
                    return self.op(t, d);
                }
                let (name, arg) = f[self.rng.gen_range(0..f.len())].clone();
                format!("({name} {})", self.exp(arg, d))
            }
            3 => {
                let (h, tl) = (self.name("h"), self.name("t"));
                let scrut = self.exp(T::IntList, d);
                let nil = self.exp(t, d);
                self.vars.push((h.clone(), T::Int));
                self.vars.push((tl.clone(), T::IntList));
                let cons = self.exp(t, d);
                self.vars.truncate(self.vars.len() - 2);
                format!("(case {scrut} of [] => {nil} | {h} :: {tl} => {cons})")
            }
            _ => self.op(t, d),
        }
    }

    fn op(&mut self, t: T, d: u32) -> String {
        match t {
            T::Int => {
                let o = ["+", "-", "*"][self.rng.gen_range(0..3)];
                match self.rng.gen_range(0..3) {
                    0 => format!("(length {})", self.exp(T::IntList, d)),
                    _ => format!("({} {o} {})", self.exp(T::Int, d), self.exp(T::Int, d)),
                }
            }
            T::Bool => match self.rng.gen_range(0..4) {
                0 => format!("({} andalso {})", self.exp(T::Bool, d), self.exp(T::Bool, d)),
                1 => format!("({} orelse {})", self.exp(T::Bool, d), self.exp(T::Bool, d)),
                2 => format!("(not {})", self.exp(T::Bool, d)),
                _ => {
                    let o = ["<", ">", "<=", ">=", "=", "<>"][self.rng.gen_range(0..6)];
                    format!("({} {o} {})", self.exp(T::Int, d), self.exp(T::Int, d))
                }
            },
            T::IntList => match self.rng.gen_range(0..4) {
                0 => format!("({} :: {})", self.exp(T::Int, d), self.exp(T::IntList, d)),
                1 => format!("({} @ {})", self.exp(T::IntList, d), self.exp(T::IntList, d)),
                2 => format!("(rev {})", self.exp(T::IntList, d)),
                _ => {
                    let n = self.rng.gen_range(0..3);
                    let items: Vec<String> = (0..n).map(|_| self.exp(T::Int, d)).collect();
                    format!("[{}]", items.join(", "))
                }
            },
        }
    }

    fn leaf(&mut self, t: T) -> String {
        if self.rng.gen_bool(0.5) {
            if let Some(x) = self.pick_var(t) {
                return x;
            }
        }
        match t {
            T::Int => {
                let n: i64 = self.rng.gen_range(-20..100);
                if n < 0 {
                    format!("~{}", -n)
                } else {
                    n.to_string()
                }
            }
            T::Bool => if self.rng.gen_bool(0.5) { "true" } else { "false" }.into(),
            T::IntList => "[]".into(),
        }
    }
}

/// A program of `vals` value and function declarations.
pub fn program(rng: &mut impl Rng, decls: usize) -> String {
    let mut g = Gen { rng, vars: Vec::new(), funs: Vec::new(), fresh: 0 };
    let mut out = String::new();
    for _ in 0..decls {
        let t = TYPES[g.rng.gen_range(0..3)];
        if g.rng.gen_bool(0.3) {
            let a = TYPES[g.rng.gen_range(0..3)];
            let (f, x) = (g.name("f"), g.name("a"));
            g.vars.push((x.clone(), a));
            let body = g.exp(t, 3);
            g.vars.pop();
            out.push_str(&format!("fun {f} {x} = {body}\n"));
            g.funs.push((f, a, t));
        } else {
            let v = g.name("v");
            let e = g.exp(t, 4);
            out.push_str(&format!("val {v} = {e}\n"));
            g.vars.push((v, t));
        }
    }
    out
}
