//! A parser for the Gallina surface syntax the emitter produces. It reads
//! emitted text back into sentences so that printing can be checked to be
//! unambiguous: `parse(emit(s)) == s`.

use crate::emit::SHIM_MODULES;
use crate::gallina::*;
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Real(String),
    Str(String),
    Sym(&'static str),
    Comment(String),
    /// Sentence terminator.
    Dot,
}

const SYMBOLS: &[&str] = &[
    ":=", "=>", "->", "/\\", "\\/", "{|", "|}", "<:", "::", "++", "&&", "||", "<=", ">=", "<>", "(", ")", "{", "}",
    "[", "]", ";", ",", ":", "|", "@", "!", "`", "%", "'", "+", "-", "*", "/", "^", "=", "<", ">", "_",
];

/// Infix operators a term may use between two atoms.
const OPERATORS: &[&str] = &["::", "++", "&&", "||", "<=", ">=", "<>", "+", "-", "*", "/", "^", "=", "<", ">"];

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, String> {
    let cs: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '(' && cs.get(i + 1) == Some(&'*') {
            let mut depth = 0;
            let mut j = i;
            while j < cs.len() {
                if cs[j] == '(' && cs.get(j + 1) == Some(&'*') {
                    depth += 1;
                    j += 2;
                } else if cs[j] == '*' && cs.get(j + 1) == Some(&')') {
                    depth -= 1;
                    j += 2;
                    if depth == 0 {
                        break;
                    }
                } else {
                    j += 1;
                }
            }
            if depth != 0 {
                return Err(format!("unterminated comment at {i}"));
            }
            let body: String = cs[i + 2..j - 2].iter().collect();
            out.push((Tok::Comment(body.trim().to_string()), start));
            i = j;
            continue;
        }
        if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match cs.get(i) {
                    None => return Err(format!("unterminated string at {start}")),
                    Some('"') if cs.get(i + 1) == Some(&'"') => {
                        s.push('"');
                        i += 2;
                    }
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            out.push((Tok::Str(s), start));
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < cs.len() && cs[j].is_ascii_digit() {
                j += 1;
            }
            let mut real = false;
            if cs.get(j) == Some(&'.') && cs.get(j + 1).is_some_and(char::is_ascii_digit) {
                real = true;
                j += 1;
                while j < cs.len() && cs[j].is_ascii_digit() {
                    j += 1;
                }
            }
            if matches!(cs.get(j), Some('e' | 'E')) {
                let k = if cs.get(j + 1) == Some(&'-') { j + 2 } else { j + 1 };
                if cs.get(k).is_some_and(char::is_ascii_digit) {
                    real = true;
                    j = k;
                    while j < cs.len() && cs[j].is_ascii_digit() {
                        j += 1;
                    }
                }
            }
            let s: String = cs[i..j].iter().collect();
            if real {
                out.push((Tok::Real(s), start));
            } else {
                let n = s.parse().map_err(|_| format!("integer out of range at {start}"))?;
                out.push((Tok::Int(n), start));
            }
            i = j;
            continue;
        }
        if c.is_alphabetic() || (c == '_' && cs.get(i + 1).is_some_and(|&d| is_ident_char(d))) {
            let mut j = i;
            loop {
                while j < cs.len() && is_ident_char(cs[j]) {
                    j += 1;
                }
                if cs.get(j) == Some(&'.') && cs.get(j + 1).is_some_and(|&d| d.is_alphabetic() || d == '_') {
                    j += 1;
                    continue;
                }
                break;
            }
            out.push((Tok::Ident(cs[i..j].iter().collect()), start));
            i = j;
            continue;
        }
        if c == '.' {
            out.push((Tok::Dot, start));
            i += 1;
            continue;
        }
        let rest: String = cs[i..cs.len().min(i + 3)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                out.push((Tok::Sym(s), start));
                i += s.chars().count();
            }
            None => return Err(format!("unexpected character `{c}` at {i}")),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    /// Words declared with `Notation "x 'w' y"`.
    notations: BTreeSet<String>,
    /// Constructors, used to tell constant patterns from variables.
    constructors: BTreeSet<String>,
}

type PResult<T> = Result<T, String>;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(t, _)| t)
    }

    fn err<T>(&self, msg: &str) -> PResult<T> {
        let at = self.toks.get(self.pos).map_or(usize::MAX, |(_, p)| *p);
        Err(format!("{msg} at offset {at} (found {:?})", self.peek()))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(x)) if x == w)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let ok = self.is_sym(s);
        if ok {
            self.pos += 1;
        }
        ok
    }

    fn eat_word(&mut self, w: &str) -> bool {
        let ok = self.is_word(w);
        if ok {
            self.pos += 1;
        }
        ok
    }

    fn sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(&format!("expected `{s}`"))
        }
    }

    fn word(&mut self, w: &str) -> PResult<()> {
        if self.eat_word(w) {
            Ok(())
        } else {
            self.err(&format!("expected `{w}`"))
        }
    }

    fn dot(&mut self) -> PResult<()> {
        if self.peek() == Some(&Tok::Dot) {
            self.pos += 1;
            Ok(())
        } else {
            self.err("expected `.`")
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().cloned() {
            Some(Tok::Ident(x)) => {
                self.pos += 1;
                Ok(x)
            }
            _ => self.err("expected an identifier"),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("expected a number"),
        }
    }

    // ----- sentences -----

    fn sentences(&mut self, end: Option<&str>) -> PResult<Vec<Sentence>> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                None if end.is_none() => return Ok(out),
                None => return self.err("missing `End`"),
                Some(Tok::Ident(w)) if w == "End" && end.is_some() => {
                    self.pos += 1;
                    let name = self.ident()?;
                    if Some(name.as_str()) != end {
                        return self.err("mismatched `End`");
                    }
                    self.dot()?;
                    return Ok(out);
                }
                _ => out.push(self.sentence()?),
            }
        }
    }

    fn sentence(&mut self) -> PResult<Sentence> {
        if let Some(Tok::Comment(c)) = self.peek().cloned() {
            self.pos += 1;
            return Ok(Sentence::Comment(c));
        }
        let kw = self.ident()?;
        match kw.as_str() {
            "Require" => {
                self.word("Import")?;
                let m = self.ident()?;
                self.dot()?;
                Ok(Sentence::RequireImport(m))
            }
            "Definition" => {
                let name = self.ident()?;
                let binders = self.binders()?;
                let ret = if self.eat_sym(":") { Some(self.term()?) } else { None };
                self.sym(":=")?;
                let body = self.term()?;
                self.dot()?;
                Ok(Sentence::Definition { name, binders, ret, body })
            }
            "Equations" => self.equations(),
            "Inductive" => self.inductive(),
            "Record" => {
                let name = self.ident()?;
                let mut params = Vec::new();
                while self.eat_sym("{") {
                    params.push(self.ident()?);
                    self.sym(":")?;
                    self.word("Type")?;
                    self.sym("}")?;
                }
                self.sym(":=")?;
                self.sym("{")?;
                let mut fields = Vec::new();
                loop {
                    let f = self.ident()?;
                    self.sym(":")?;
                    fields.push((f, self.term()?));
                    if !self.eat_sym(";") {
                        break;
                    }
                }
                self.sym("}")?;
                self.dot()?;
                Ok(Sentence::Record { name, params, fields })
            }
            "Theorem" => {
                let name = self.ident()?;
                self.sym(":")?;
                let statement = self.prop()?;
                self.dot()?;
                let admitted = self.eat_word("Admitted");
                if admitted {
                    self.dot()?;
                }
                Ok(Sentence::Theorem { name, statement, admitted })
            }
            "Local" | "Axiom" => {
                let local = kw == "Local";
                if local {
                    self.word("Axiom")?;
                }
                let name = self.ident()?;
                self.sym(":")?;
                let statement = self.prop()?;
                self.dot()?;
                Ok(Sentence::Axiom { name, statement, local })
            }
            "Notation" => {
                let Some(Tok::Str(pattern)) = self.peek().cloned() else {
                    return self.err("expected a notation string");
                };
                self.pos += 1;
                if let Some(w) = pattern.split('\'').nth(1) {
                    self.notations.insert(w.to_string());
                }
                self.sym(":=")?;
                let body = self.atom()?;
                self.sym("(")?;
                let assoc = match self.ident()?.as_str() {
                    "left" => Assoc::Left,
                    "right" => Assoc::Right,
                    "no" => Assoc::None,
                    _ => return self.err("bad associativity"),
                };
                self.word("associativity")?;
                self.sym(",")?;
                self.word("at")?;
                self.word("level")?;
                let level = u8::try_from(self.int()?).map_err(|_| "level out of range".to_string())?;
                self.sym(")")?;
                self.dot()?;
                Ok(Sentence::Notation { pattern, body, assoc, level })
            }
            "Module" => {
                if self.eat_word("Type") {
                    let name = self.ident()?;
                    self.dot()?;
                    let body = self.sentences(Some(&name))?;
                    return Ok(Sentence::ModuleType { name, body });
                }
                let name = self.ident()?;
                let mut params = Vec::new();
                while self.eat_sym("(") {
                    let p = self.ident()?;
                    self.sym(":")?;
                    params.push((p, self.ident()?));
                    self.sym(")")?;
                }
                let ascription = if self.eat_sym("<:") { Some(self.ident()?) } else { None };
                if self.eat_sym(":=") {
                    let functor = self.eat_sym("!");
                    let head = self.ident()?;
                    let mut args = Vec::new();
                    while let Some(Tok::Ident(_)) = self.peek() {
                        args.push(self.ident()?);
                    }
                    if functor != !args.is_empty() {
                        return self.err("malformed module expression");
                    }
                    self.dot()?;
                    return Ok(Sentence::Module {
                        name,
                        params,
                        ascription,
                        body: ModBody::Alias(ModExpr { head, args }),
                    });
                }
                self.dot()?;
                let body = self.sentences(Some(&name))?;
                Ok(Sentence::Module { name, params, ascription, body: ModBody::Sentences(body) })
            }
            "Parameter" => {
                let name = self.ident()?;
                self.sym(":")?;
                let ty = self.term()?;
                self.dot()?;
                Ok(Sentence::Parameter { name, ty })
            }
            "Declare" => {
                self.word("Module")?;
                let name = self.ident()?;
                self.sym(":")?;
                let sig = self.ident()?;
                self.dot()?;
                Ok(Sentence::DeclareModule { name, sig })
            }
            "Include" => {
                let m = self.ident()?;
                self.dot()?;
                Ok(Sentence::Include(m))
            }
            _ => {
                self.pos -= 1;
                self.err("unknown sentence")
            }
        }
    }

    fn equations(&mut self) -> PResult<Sentence> {
        let mut fs = Vec::new();
        loop {
            let name = self.ident()?;
            let mut binders = Vec::new();
            let mut precondition = None;
            loop {
                if self.is_sym("{")
                    && matches!(self.peek_at(1), Some(Tok::Ident(h)) if h == "H")
                    && self.peek_at(2) == Some(&Tok::Sym(":"))
                {
                    self.pos += 3;
                    precondition = Some(self.prop()?);
                    self.sym("}")?;
                } else if self.is_sym("(") || self.is_sym("{") || self.is_sym("`") {
                    binders.push(self.binder()?);
                } else {
                    break;
                }
            }
            self.sym(":")?;
            let ret = self.term()?;
            self.sym(":=")?;
            let mut clauses = Vec::new();
            loop {
                self.word(&name)?;
                let mut pats = Vec::new();
                while !self.is_sym(":=") {
                    pats.push(self.pattern_atom()?);
                }
                self.sym(":=")?;
                let body = if self.is_sym("_") && self.clause_end_after_hole() {
                    self.pos += 1;
                    None
                } else {
                    Some(self.term()?)
                };
                clauses.push(EqClause { pats, body });
                if !self.eat_sym(";") {
                    break;
                }
            }
            fs.push(EqFun { name, binders, precondition, ret, clauses });
            if !self.eat_word("with") {
                break;
            }
        }
        self.dot()?;
        Ok(Sentence::Equations(fs))
    }

    /// `_` followed by `;`, `.` or `with` is an obligation.
    fn clause_end_after_hole(&self) -> bool {
        match self.peek_at(1) {
            Some(Tok::Dot) | Some(Tok::Sym(";")) => true,
            Some(Tok::Ident(w)) => w == "with",
            _ => false,
        }
    }

    fn inductive(&mut self) -> PResult<Sentence> {
        let mut bodies = Vec::new();
        loop {
            let name = self.ident()?;
            let mut params = Vec::new();
            while self.eat_sym("{") {
                params.push(self.ident()?);
                self.sym(":")?;
                self.word("Type")?;
                self.sym("}")?;
            }
            self.sym(":")?;
            self.word("Type")?;
            self.sym(":=")?;
            let mut constructors = Vec::new();
            while self.eat_sym("|") {
                let c = self.ident()?;
                self.constructors.insert(c.clone());
                let arg = if self.eat_sym(":") {
                    match self.term()? {
                        Term::Arrow(a, r) if *r == Term::Ident(name.clone()) => Some(*a),
                        _ => return self.err("constructor type must end in its inductive type"),
                    }
                } else {
                    None
                };
                constructors.push((c, arg));
            }
            bodies.push(IndBody { name, params, constructors });
            if !self.eat_word("with") {
                break;
            }
        }
        self.dot()?;
        Ok(Sentence::Inductive(bodies))
    }

    fn binders(&mut self) -> PResult<Vec<Binder>> {
        let mut out = Vec::new();
        while self.is_sym("(") || self.is_sym("{") || self.is_sym("`") {
            out.push(self.binder()?);
        }
        Ok(out)
    }

    fn binder(&mut self) -> PResult<Binder> {
        if self.eat_sym("`") {
            self.sym("(")?;
            let name = self.ident()?;
            self.sym(":")?;
            let ty = self.term()?;
            self.sym(")")?;
            return Ok(Binder::generalized(name, ty));
        }
        if self.eat_sym("(") {
            let name = self.ident()?;
            self.sym(":")?;
            let ty = self.term()?;
            self.sym(")")?;
            return Ok(Binder::explicit(name, ty));
        }
        if self.eat_sym("{") {
            let name = self.ident()?;
            if self.eat_sym("}") {
                return Ok(Binder::bare(name, BinderKind::Implicit));
            }
            self.sym(":")?;
            let ty = self.term()?;
            self.sym("}")?;
            return Ok(Binder::implicit(name, ty));
        }
        Ok(Binder::bare(self.ident()?, BinderKind::Explicit))
    }

    // ----- propositions -----

    fn prop(&mut self) -> PResult<Term> {
        if self.eat_word("forall") {
            let mut bs = Vec::new();
            while !self.is_sym(",") {
                bs.push(self.binder()?);
            }
            self.sym(",")?;
            return Ok(Term::Forall(bs, Box::new(self.prop()?)));
        }
        if self.eat_word("exists") {
            let mut vs = Vec::new();
            while !self.is_sym(",") {
                vs.push(self.ident()?);
            }
            self.sym(",")?;
            return Ok(Term::Exists(vs, Box::new(self.prop()?)));
        }
        let a = self.disjunction()?;
        if self.eat_sym("->") {
            return Ok(Term::arrow(a, self.prop()?));
        }
        Ok(a)
    }

    fn disjunction(&mut self) -> PResult<Term> {
        let a = self.conjunction()?;
        if self.eat_sym("\\/") {
            return Ok(Term::or(a, self.disjunction()?));
        }
        Ok(a)
    }

    fn conjunction(&mut self) -> PResult<Term> {
        let a = self.prop_atom()?;
        if self.eat_sym("/\\") {
            return Ok(Term::and(a, self.conjunction()?));
        }
        Ok(a)
    }

    /// An equation, a parenthesized proposition, or a plain term.
    fn prop_atom(&mut self) -> PResult<Term> {
        if self.is_word("eq") {
            self.pos += 1;
            let l = self.atom()?;
            let r = self.atom()?;
            return Ok(Term::eq(l, r, true));
        }
        let save = self.pos;
        if let Ok(l) = self.eq_side() {
            if self.eat_sym("=") {
                let r = self.eq_side()?;
                return Ok(Term::eq(l, r, false));
            }
            if matches!(self.peek(), None | Some(Tok::Dot | Tok::Sym("/\\" | "\\/" | ")" | "}" | "->"))) {
                // a parenthesized equation reads as an infix term
                return Ok(match l {
                    Term::Infix(op, a, b) if op == "=" => Term::Eq { lhs: a, rhs: b, head: false },
                    l => l,
                });
            }
        }
        self.pos = save;
        if self.eat_sym("(") {
            let p = self.prop()?;
            self.sym(")")?;
            return Ok(p);
        }
        self.err("expected a proposition")
    }

    /// A side of `=`: a bare application or cons cell, or an atom.
    fn eq_side(&mut self) -> PResult<Term> {
        let head = self.app_seq()?;
        if self.eat_sym("::") {
            let r = self.atom()?;
            return Ok(Term::infix("::", head, r));
        }
        Ok(head)
    }

    /// `@f a b`, `f a b` or a single atom.
    fn app_seq(&mut self) -> PResult<Term> {
        if self.eat_sym("@") {
            let f = self.ident()?;
            let mut args = Vec::new();
            while self.starts_atom() {
                args.push(self.atom()?);
            }
            return Ok(Term::ExplicitApp(f, args));
        }
        let f = self.atom()?;
        let mut args = Vec::new();
        while self.starts_atom() {
            args.push(self.atom()?);
        }
        Ok(Term::app(f, args))
    }

    // ----- terms -----

    fn term(&mut self) -> PResult<Term> {
        if self.eat_word("forall") {
            let mut bs = Vec::new();
            while !self.is_sym(",") {
                bs.push(self.binder()?);
            }
            self.sym(",")?;
            return Ok(Term::Forall(bs, Box::new(self.term()?)));
        }
        if self.is_word("match") {
            return self.match_term();
        }
        let a = self.app_seq()?;
        if self.eat_sym("->") {
            return Ok(Term::arrow(a, self.term()?));
        }
        Ok(a)
    }

    fn match_term(&mut self) -> PResult<Term> {
        self.word("match")?;
        let mut scrutinees = vec![self.term()?];
        while self.eat_sym(",") {
            scrutinees.push(self.term()?);
        }
        self.word("with")?;
        let mut branches = Vec::new();
        loop {
            let mut pats = vec![self.pattern_atom()?];
            while self.eat_sym(",") {
                pats.push(self.pattern_atom()?);
            }
            self.sym("=>")?;
            let body = self.term()?;
            branches.push(Branch { pats, body });
            if !self.eat_sym("|") {
                break;
            }
        }
        self.word("end")?;
        let exhaustive = !(branches.len() > 1
            && branches.last().is_some_and(|b| {
                b.pats.iter().all(|p| *p == Pattern::Wild) && b.body == Term::ident(crate::translate::PATTERN_FAILURE)
            }));
        Ok(Term::Match { scrutinees, branches, exhaustive })
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(w)) => {
                !matches!(w.as_str(), "with" | "end" | "then" | "else" | "in" | "as" | "forall" | "exists" | "match")
                    && !self.notations.contains(w)
            }
            Some(Tok::Int(_) | Tok::Real(_) | Tok::Str(_)) => true,
            Some(Tok::Sym(s)) => matches!(*s, "(" | "[" | "{|" | "_"),
            _ => false,
        }
    }

    fn atom(&mut self) -> PResult<Term> {
        let t = self.atom_core()?;
        if self.is_sym("%") {
            if let Some(Tok::Ident(k)) = self.peek_at(1).cloned() {
                self.pos += 2;
                return Ok(match (t, k.as_str()) {
                    (Term::Real(r), "float") => Term::Real(r),
                    (Term::Str(s), "char") if s.chars().count() == 1 => Term::Char(s.chars().next().expect("one char")),
                    (Term::Infix(op, a, b), "type") if op == "*" => {
                        Term::Scope(Box::new(Term::Product(vec![*a, *b])), k)
                    }
                    (t, _) => Term::Scope(Box::new(t), k),
                });
            }
        }
        Ok(t)
    }

    fn atom_core(&mut self) -> PResult<Term> {
        match self.peek().cloned() {
            Some(Tok::Ident(x)) => {
                self.pos += 1;
                Ok(match x.as_str() {
                    "tt" => Term::Unit,
                    "Type" | "Prop" | "Set" => Term::Sort(x),
                    _ => Term::Ident(x),
                })
            }
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Term::Int(n))
            }
            Some(Tok::Real(r)) => {
                self.pos += 1;
                Ok(Term::Real(r))
            }
            Some(Tok::Str(s)) => {
                self.pos += 1;
                Ok(Term::Str(s))
            }
            Some(Tok::Sym("_")) => {
                self.pos += 1;
                Ok(Term::Hole)
            }
            Some(Tok::Sym("@")) => {
                self.pos += 1;
                Ok(Term::ExplicitApp(self.ident()?, Vec::new()))
            }
            Some(Tok::Sym("[")) => {
                self.pos += 1;
                let mut items = Vec::new();
                if !self.eat_sym("]") {
                    loop {
                        items.push(self.term()?);
                        if !self.eat_sym(";") {
                            break;
                        }
                    }
                    self.sym("]")?;
                }
                Ok(Term::List(items))
            }
            Some(Tok::Sym("{|")) => {
                self.pos += 1;
                let mut fs = Vec::new();
                loop {
                    let f = self.ident()?;
                    self.sym(":=")?;
                    fs.push((f, self.term()?));
                    if !self.eat_sym(";") {
                        break;
                    }
                }
                self.sym("|}")?;
                Ok(Term::Record(fs))
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let t = self.paren()?;
                self.sym(")")?;
                Ok(t)
            }
            _ => self.err("expected a term"),
        }
    }

    /// Contents of a parenthesized term.
    fn paren(&mut self) -> PResult<Term> {
        if self.eat_sym("-") {
            return match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    self.pos += 1;
                    Ok(Term::Int(-n))
                }
                Some(Tok::Real(r)) => {
                    self.pos += 1;
                    Ok(Term::Real(format!("-{r}")))
                }
                _ => self.err("expected a number"),
            };
        }
        if self.eat_word("fun") {
            let p = self.binder_pattern()?;
            self.sym("=>")?;
            return Ok(Term::Fun(p, Box::new(self.term()?)));
        }
        if self.eat_word("let") {
            let p = self.binder_pattern()?;
            self.sym(":=")?;
            let e = self.term()?;
            self.word("in")?;
            return Ok(Term::Let(p, Box::new(e), Box::new(self.term()?)));
        }
        if self.eat_word("if") {
            let c = self.term()?;
            self.word("then")?;
            let a = self.term()?;
            self.word("else")?;
            return Ok(Term::If(Box::new(c), Box::new(a), Box::new(self.term()?)));
        }
        if self.is_word("match") || self.is_word("forall") {
            return self.term();
        }
        if self.is_word("exists") {
            return self.prop();
        }
        let first = self.app_seq()?;
        // `(x w y)` with `w` a declared notation
        if let Some(Tok::Ident(w)) = self.peek().cloned() {
            if self.notations.contains(&w) {
                self.pos += 1;
                let r = self.atom()?;
                return Ok(Term::infix(w, first, r));
            }
        }
        if self.is_sym(",") {
            let mut items = vec![first];
            while self.eat_sym(",") {
                items.push(self.term()?);
            }
            return Ok(Term::Tuple(items));
        }
        if self.eat_sym(":") {
            let ty = self.term()?;
            return Ok(Term::Annot(Box::new(first), Box::new(ty)));
        }
        if self.eat_sym("->") {
            return Ok(Term::arrow(first, self.term()?));
        }
        if self.is_sym("*") {
            let mut items = vec![first];
            while self.eat_sym("*") {
                items.push(self.app_seq()?);
            }
            return Ok(match <[Term; 2]>::try_from(items) {
                Ok([a, b]) => Term::infix("*", a, b),
                Err(items) => Term::Product(items),
            });
        }
        if let Some(Tok::Sym(op)) = self.peek().cloned() {
            if OPERATORS.contains(&op) {
                self.pos += 1;
                let r = self.atom()?;
                return Ok(match op {
                    "&&" => Term::BoolAnd(Box::new(first), Box::new(r)),
                    "||" => Term::BoolOr(Box::new(first), Box::new(r)),
                    _ => Term::infix(op, first, r),
                });
            }
        }
        Ok(first)
    }

    // ----- patterns -----

    fn binder_pattern(&mut self) -> PResult<Pattern> {
        if self.eat_sym("'") {
            return self.pattern_atom();
        }
        if self.eat_sym("_") {
            return Ok(Pattern::Wild);
        }
        Ok(Pattern::Var(self.ident()?))
    }

    fn pattern_atom(&mut self) -> PResult<Pattern> {
        let p = match self.peek().cloned() {
            Some(Tok::Sym("_")) => {
                self.pos += 1;
                Pattern::Wild
            }
            Some(Tok::Ident(x)) => {
                self.pos += 1;
                if x == "tt" {
                    Pattern::Unit
                } else if self.constructors.contains(&x) || x.contains('.') {
                    Pattern::Con(x, Vec::new())
                } else {
                    Pattern::Var(x)
                }
            }
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Pattern::Int(n)
            }
            Some(Tok::Str(s)) => {
                self.pos += 1;
                if self.is_sym("%") && self.peek_at(1) == Some(&Tok::Ident("char".into())) {
                    self.pos += 2;
                    let mut cs = s.chars();
                    match (cs.next(), cs.next()) {
                        (Some(c), None) => Pattern::Char(c),
                        _ => return self.err("bad character literal"),
                    }
                } else {
                    Pattern::Str(s)
                }
            }
            Some(Tok::Sym("[")) => {
                self.pos += 1;
                let mut items = Vec::new();
                if !self.eat_sym("]") {
                    loop {
                        items.push(self.pattern_atom()?);
                        if !self.eat_sym(";") {
                            break;
                        }
                    }
                    self.sym("]")?;
                }
                Pattern::List(items)
            }
            Some(Tok::Sym("{|")) => {
                self.pos += 1;
                let mut fs = Vec::new();
                loop {
                    let f = self.ident()?;
                    self.sym(":=")?;
                    fs.push((f, self.pattern_atom()?));
                    if !self.eat_sym(";") {
                        break;
                    }
                }
                self.sym("|}")?;
                Pattern::Record(fs)
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let p = self.pattern_paren()?;
                self.sym(")")?;
                p
            }
            _ => return self.err("expected a pattern"),
        };
        Ok(p)
    }

    fn pattern_paren(&mut self) -> PResult<Pattern> {
        if self.eat_sym("-") {
            return Ok(Pattern::Int(-self.int()?));
        }
        let first = self.pattern_atom()?;
        if self.eat_sym("::") {
            let r = self.pattern_atom()?;
            return Ok(Pattern::Infix("::".into(), Box::new(first), Box::new(r)));
        }
        if self.eat_word("as") {
            return Ok(Pattern::As(Box::new(first), self.ident()?));
        }
        if self.is_sym(",") {
            let mut items = vec![first];
            while self.eat_sym(",") {
                items.push(self.pattern_atom()?);
            }
            return Ok(Pattern::Tuple(items));
        }
        if !self.is_sym(")") {
            let c = match first {
                Pattern::Con(c, args) if args.is_empty() => c,
                Pattern::Var(c) => c,
                _ => return self.err("expected a constructor"),
            };
            let mut args = Vec::new();
            while !self.is_sym(")") {
                args.push(self.pattern_atom()?);
            }
            return Ok(Pattern::Con(c, args));
        }
        Ok(first)
    }
}

/// Parse emitted text. A leading import header is skipped.
pub fn parse(text: &str) -> Result<Vec<Sentence>, String> {
    let mut toks = lex(text)?;
    // skip the header
    let header_len = {
        let mut i = 0;
        for m in SHIM_MODULES {
            if toks.get(i..i + 4).is_some_and(|w| {
                w[0].0 == Tok::Ident("Require".into())
                    && w[1].0 == Tok::Ident("Import".into())
                    && w[2].0 == Tok::Ident(m.into())
                    && w[3].0 == Tok::Dot
            }) {
                i += 4;
            } else {
                break;
            }
        }
        let tail = [
            Tok::Ident("From".into()),
            Tok::Ident("Equations".into()),
            Tok::Ident("Require".into()),
            Tok::Ident("Import".into()),
            Tok::Ident("Equations".into()),
            Tok::Dot,
            Tok::Ident("Generalizable".into()),
            Tok::Ident("All".into()),
            Tok::Ident("Variables".into()),
            Tok::Dot,
        ];
        if i > 0 && toks.get(i..i + tail.len()).is_some_and(|w| w.iter().map(|(t, _)| t).eq(tail.iter())) {
            i + tail.len()
        } else {
            0
        }
    };
    toks.drain(..header_len);
    let mut p = Parser {
        toks,
        pos: 0,
        notations: BTreeSet::new(),
        constructors: ["true", "false", "None", "Some"].iter().map(|s| s.to_string()).collect(),
    };
    p.sentences(None)
}

/// Diagnostics for text that does not parse back to `sentences`.
pub fn check_reparse(sentences: &[Sentence], text: &str) -> Vec<String> {
    match parse(text) {
        Err(e) => vec![format!("emitted text does not parse: {e}")],
        Ok(parsed) => {
            let mut out = Vec::new();
            if parsed.len() != sentences.len() {
                out.push(format!("parsed {} sentences, emitted {}", parsed.len(), sentences.len()));
            }
            for (i, (a, b)) in parsed.iter().zip(sentences).enumerate() {
                if a != b {
                    out.push(format!(
                        "sentence {} differs after re-parsing:\n  parsed:  {a:?}\n  emitted: {b:?}",
                        i + 1
                    ));
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elab::elaborate;
    use crate::emit::{emit, EmitConfig};
    use crate::frontend::parse_source;
    use crate::translate::translate;

    fn round_trip(src: &str) {
        let (prog, infix) = parse_source(src).unwrap();
        let elab = elaborate(&prog, &infix).unwrap();
        let t = translate(&elab).unwrap();
        for header in [true, false] {
            let text = emit(&t.sentences, &EmitConfig { header, ..EmitConfig::default() });
            let diags = check_reparse(&t.sentences, &text);
            assert!(diags.is_empty(), "{}\n{text}", diags.join("\n"));
        }
    }

    #[test]
    fn records_and_patterns() {
        round_trip(
            "type r = { name : string, age : int }\n\
             fun isBob ({name = \"Bob\",...}: r) = true\n  | isBob {...} = false\n\
             val p = {name = \"A\", age = ~3}\nval s = #name p",
        );
    }

    #[test]
    fn preconditions() {
        round_trip("fun hd (x :: _) = x");
        round_trip(
            "fun hd_sum ((a,b)::l) ((a',b')::l') init = init + a + b + a' + b'\n\
             | hd_sum ((a,b)::l) l' init = init + a + b\n\
             | hd_sum l ((a',b')::l') init = init + a' + b'",
        );
    }

    #[test]
    fn contracts_and_infix() {
        round_trip(
            "(!! posAdd x y ==> z;\n REQUIRES: x > 0 andalso y > 0;\n ENSURES: z > 0 orelse x = 1; !!)\n\
             fun posAdd x y = x + y",
        );
        round_trip("infix F\nfun op F (x, y) = x*x + y\nval f = op F\nval x = 5 F 2\nval y = op F (2, 3)");
    }

    #[test]
    fn expressions() {
        round_trip(
            "val L = []\nval x :: l = [1, 2, 3]\n\
             val f = fn (a, b) => if a then b else ~1.5\n\
             val g = fn 0 => \"zero\" | _ => \"other\" ^ \"s\"\n\
             val h = let val (a, b) = (1, #\"c\") val c = SOME a in case c of SOME z => z | NONE => 0 end\n\
             fun m (x as (_ :: _)) = x | m [] = []\n\
             val q = (fn x => x) o (fn y => y)\nval r = 3 div 2 <> 1 mod 2",
        );
    }

    #[test]
    fn datatypes_and_modules() {
        round_trip(
            "datatype 'a evenList = ENil | ECons of 'a * 'a oddList\n\
             and 'a oddList = OCons of 'a * 'a evenList\n\
             fun lengthE (ENil: 'a evenList): int = 0\n\
               | lengthE (ECons (_, l)) = lengthO l\n\
             and lengthO (OCons (_, l)) = lengthE l",
        );
        round_trip(
            "signature PAIR = sig type t1 type t2 type t = t1 * t2 val default : unit -> t end\n\
             structure IntString : PAIR = struct type t1 = int type t2 = string type t = t1 * t2 fun default () = (0, \"\") end\n\
             functor Example (Pair : PAIR) = struct val (a, b) = Pair.default () end\n\
             structure S = Example (IntString)\n\
             structure T :> sig val z : int end = struct val z = 0 end\n\
             structure U = Example (struct type t1 = int type t2 = int type t = t1 * t2 fun default () = (1, 2) end)",
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse("Definition x := .").is_err());
        assert!(parse("Module A. Definition x := 1.").is_err());
        assert!(check_reparse(&[], "Definition x := 1.").len() == 1);
    }
}
