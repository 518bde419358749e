use super::ast::*;
use super::infix::InfixEnv;
use super::lexer::{decode_literal, int_value, Token, TokenKind};
use crate::diag::{Error, Result, Span, Stage};

/// Parse a token stream into a program and the final top-level infix
/// environment.
pub fn parse(tokens: &[Token]) -> Result<(Program, InfixEnv)> {
    let mut p = Parser::new(tokens);
    let prog = p.program()?;
    Ok((prog, p.infix))
}

/// Parse a standalone type expression.
pub fn parse_type(tokens: &[Token]) -> Result<Ty> {
    let mut p = Parser::new(tokens);
    let t = p.ty()?;
    if p.peek().is_some() {
        return p.expected("end of type");
    }
    Ok(t)
}

pub(crate) struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    next_id: u32,
    pub(crate) infix: InfixEnv,
}

const DEC_START: &[&str] = &[
    "val",
    "fun",
    "datatype",
    "type",
    "local",
    "infix",
    "infixr",
    "nonfix",
    "structure",
    "signature",
    "functor",
    "exception",
    "open",
    "abstype",
];

const UNSUPPORTED_KEYWORDS: &[(&str, &str)] = &[
    ("raise", "exceptions (`raise`) are outside the supported pure subset"),
    ("handle", "exceptions (`handle`) are outside the supported pure subset"),
    ("exception", "exception declarations are outside the supported pure subset"),
    ("while", "`while` loops are outside the supported pure subset"),
    ("open", "`open` declarations are not supported"),
    ("abstype", "`abstype` declarations are not supported"),
    ("withtype", "`withtype` is not supported"),
    ("sharing", "sharing constraints are not supported"),
    ("where", "`where type` signature refinements are not supported"),
];

impl<'t> Parser<'t> {
    pub(crate) fn new(toks: &'t [Token]) -> Self {
        Parser { toks, pos: 0, next_id: 0, infix: InfixEnv::basis() }
    }

    fn meta(&mut self, span: Span) -> Meta {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        Meta { id, span }
    }

    fn peek(&self) -> Option<&'t Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&'t Token> {
        self.toks.get(self.pos + n)
    }

    fn here(&self) -> Span {
        match self.peek() {
            Some(t) => t.span,
            None => self.toks.last().map_or(Span::default(), |t| Span::new(t.span.end, t.span.end)),
        }
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn span_from(&self, start: usize) -> Span {
        Span::new(start, self.prev_end().max(start))
    }

    fn at(&self, kind: TokenKind, text: &str) -> bool {
        self.peek().is_some_and(|t| t.is(kind, text))
    }

    fn at_kw(&self, kw: &str) -> bool {
        self.at(TokenKind::Keyword, kw)
    }

    fn at_punct(&self, p: &str) -> bool {
        self.at(TokenKind::Punct, p)
    }

    fn at_sym(&self, s: &str) -> bool {
        self.at(TokenKind::SymbolicId, s)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::syntax(self.here(), msg))
    }

    fn expected<T>(&self, what: &str) -> Result<T> {
        match self.peek() {
            Some(t) => self.err(format!("expected {what}, found `{}`", t.text)),
            None => self.err(format!("expected {what}, found end of input")),
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.expected(&format!("`{kw}`"))
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.expected(&format!("`{p}`"))
        }
    }

    fn expect_equals(&mut self) -> Result<()> {
        if self.at_sym("=") {
            self.pos += 1;
            Ok(())
        } else {
            self.expected("`=`")
        }
    }

    fn check_unsupported(&self) -> Result<()> {
        if let Some(t) = self.peek() {
            if t.kind == TokenKind::Keyword {
                if let Some((_, msg)) = UNSUPPORTED_KEYWORDS.iter().find(|(k, _)| *k == t.text) {
                    return Err(Error::unsupported(t.span, Stage::Parse, *msg));
                }
            }
        }
        Ok(())
    }

    /// Alphanumeric or symbolic value identifier (unqualified).
    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(t)
                if (t.kind == TokenKind::Ident && !t.text.starts_with('\'') && !t.text.contains('.'))
                    || t.kind == TokenKind::SymbolicId =>
            {
                self.pos += 1;
                Ok(t.text.clone())
            }
            Some(t) if t.is(TokenKind::Punct, "*") => {
                self.pos += 1;
                Ok(t.text.clone())
            }
            _ => self.expected("identifier"),
        }
    }

    fn alpha_ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident && !t.text.starts_with('\'') && !t.text.contains('.') => {
                self.pos += 1;
                Ok(t.text.clone())
            }
            _ => self.expected("identifier"),
        }
    }

    fn long_ident(&mut self) -> Result<LongId> {
        match self.peek() {
            Some(t) if (t.kind == TokenKind::Ident && !t.text.starts_with('\'')) || t.kind == TokenKind::SymbolicId => {
                self.pos += 1;
                Ok(split_long(&t.text))
            }
            _ => self.expected("identifier"),
        }
    }

    fn at_tyvar(&self) -> bool {
        self.peek().is_some_and(|t| t.kind == TokenKind::Ident && t.text.starts_with('\''))
    }

    fn tyvar(&mut self) -> Result<String> {
        let t = self.peek();
        match t {
            Some(t) if t.kind == TokenKind::Ident && t.text.starts_with('\'') => {
                if t.text.starts_with("''") {
                    return Err(Error::unsupported(t.span, Stage::Parse, "equality type variables are not supported"));
                }
                self.pos += 1;
                Ok(t.text[1..].to_string())
            }
            _ => self.expected("type variable"),
        }
    }

    /// Optional `'a` or `('a, 'b)` prefix.
    fn tyvar_seq(&mut self) -> Result<Vec<String>> {
        if self.at_tyvar() {
            return Ok(vec![self.tyvar()?]);
        }
        if self.at_punct("(") && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Ident && t.text.starts_with('\''))
        {
            self.pos += 1;
            let mut vs = vec![self.tyvar()?];
            while self.eat_punct(",") {
                vs.push(self.tyvar()?);
            }
            self.expect_punct(")")?;
            return Ok(vs);
        }
        Ok(Vec::new())
    }

    fn label(&mut self) -> Result<String> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident && !t.text.starts_with('\'') && !t.text.contains('.') => {
                self.pos += 1;
                Ok(t.text.clone())
            }
            Some(t) if t.kind == TokenKind::IntLit && !t.text.starts_with(['~', '0']) => {
                self.pos += 1;
                Ok(t.text.clone())
            }
            _ => self.expected("record label"),
        }
    }

    // ------------------------------------------------------------------
    // Declarations

    fn program(&mut self) -> Result<Program> {
        let decs = self.decs()?;
        if self.peek().is_some() {
            self.check_unsupported()?;
            return self.expected("declaration");
        }
        Ok(decs)
    }

    fn at_dec_start(&self) -> bool {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Keyword => DEC_START.contains(&t.text.as_str()),
            Some(t) => t.kind == TokenKind::ContractOpen,
            None => false,
        }
    }

    fn decs(&mut self) -> Result<Vec<Dec>> {
        let mut out = Vec::new();
        loop {
            if self.eat_punct(";") {
                continue;
            }
            if !self.at_dec_start() {
                break;
            }
            out.push(self.dec()?);
        }
        Ok(out)
    }

    fn dec(&mut self) -> Result<Dec> {
        self.check_unsupported()?;
        let start = self.here().start;
        let t = self.peek().expect("at_dec_start checked");
        if t.kind == TokenKind::ContractOpen {
            let contract = self.contract()?;
            if !self.at_kw("fun") {
                return Err(Error::syntax(
                    self.here(),
                    "a contract must be immediately followed by the `fun` declaration it describes",
                ));
            }
            let mut dec = self.dec()?;
            if let DecKind::Fun { binds, contract: slot, .. } = &mut dec.kind {
                if !binds.iter().any(|b| b.name == contract.fname) {
                    return Err(Error::syntax(
                        contract.meta.span,
                        format!(
                            "contract names `{}` but the following declaration defines `{}`",
                            contract.fname,
                            binds.iter().map(|b| b.name.as_str()).collect::<Vec<_>>().join("`, `")
                        ),
                    ));
                }
                *slot = Some(Box::new(contract));
            }
            dec.meta.span = Span::new(start, dec.meta.span.end);
            return Ok(dec);
        }
        let kw = t.text.as_str();
        self.pos += 1;
        let kind = match kw {
            "val" => self.val_dec()?,
            "fun" => self.fun_dec()?,
            "datatype" => DecKind::Datatype(self.datbinds()?),
            "type" => DecKind::Type(self.typbinds()?),
            "local" => {
                let saved = self.infix.clone();
                let first = self.decs()?;
                self.expect_kw("in")?;
                let inner_env = self.infix.clone();
                let second = self.decs()?;
                self.expect_kw("end")?;
                // fixities from the private part do not escape
                let mut env = saved;
                for (id, fx) in self.infix.iter() {
                    if inner_env.get(id) != Some(fx) {
                        env.declare(id, fx);
                    }
                }
                self.infix = env;
                DecKind::Local(first, second)
            }
            "infix" | "infixr" => {
                let assoc = if kw == "infix" { Assoc::Left } else { Assoc::Right };
                let prec = match self.peek() {
                    Some(t) if t.kind == TokenKind::IntLit && t.text.len() == 1 => {
                        self.pos += 1;
                        Some(t.text.parse::<u8>().unwrap_or(0))
                    }
                    _ => None,
                };
                let ids = self.fixity_ids()?;
                for id in &ids {
                    self.infix.declare(id, Fixity { assoc, prec: prec.unwrap_or(0) });
                }
                DecKind::Infix { assoc, prec, ids }
            }
            "nonfix" => {
                let ids = self.fixity_ids()?;
                for id in &ids {
                    self.infix.remove(id);
                }
                DecKind::Nonfix(ids)
            }
            "structure" => DecKind::Structure(self.strbinds()?),
            "signature" => DecKind::Signature(self.sigbinds()?),
            "functor" => DecKind::Functor(self.functorbinds()?),
            _ => unreachable!("dec keyword {kw}"),
        };
        let span = self.span_from(start);
        Ok(Dec { meta: self.meta(span), kind })
    }

    fn fixity_ids(&mut self) -> Result<Vec<String>> {
        let mut ids = Vec::new();
        while let Some(t) = self.peek() {
            if (t.kind == TokenKind::Ident && !t.text.starts_with('\'') && !t.text.contains('.'))
                || t.kind == TokenKind::SymbolicId
            {
                ids.push(t.text.clone());
                self.pos += 1;
            } else {
                break;
            }
        }
        if ids.is_empty() {
            return self.expected("identifier");
        }
        Ok(ids)
    }

    fn val_dec(&mut self) -> Result<DecKind> {
        let tyvars = self.tyvar_seq()?;
        let mut rec = self.eat_kw("rec");
        let mut binds = Vec::new();
        loop {
            if self.eat_kw("rec") {
                rec = true;
            }
            let start = self.here().start;
            let pat = self.pat()?;
            self.expect_equals()?;
            let exp = self.exp()?;
            let span = self.span_from(start);
            binds.push(ValBind { meta: self.meta(span), pat, exp });
            if !self.eat_kw("and") {
                break;
            }
        }
        Ok(DecKind::Val { rec, tyvars, binds })
    }

    fn fun_dec(&mut self) -> Result<DecKind> {
        let tyvars = self.tyvar_seq()?;
        let mut binds = Vec::new();
        loop {
            binds.push(self.funbind()?);
            if !self.eat_kw("and") {
                break;
            }
        }
        Ok(DecKind::Fun { tyvars, binds, contract: None })
    }

    fn funbind(&mut self) -> Result<FunBind> {
        let start = self.here().start;
        let mut clauses = Vec::new();
        let mut name: Option<(String, bool)> = None;
        loop {
            let cstart = self.here().start;
            let (cname, op, pats) = self.clause_head()?;
            match &name {
                None => name = Some((cname, op)),
                Some((n, _)) if *n != cname => {
                    return Err(Error::syntax(
                        self.span_from(cstart),
                        format!("clauses for `{n}` and `{cname}` in the same function binding"),
                    ));
                }
                _ => {}
            }
            if let Some(first) = clauses.first() {
                let first: &Clause = first;
                if first.pats.len() != pats.len() {
                    return Err(Error::syntax(
                        self.span_from(cstart),
                        "clauses of a function must have the same number of arguments",
                    ));
                }
            }
            let ret = if self.eat_punct(":") { Some(self.ty()?) } else { None };
            self.expect_equals()?;
            let body = self.exp()?;
            let span = self.span_from(cstart);
            clauses.push(Clause { meta: self.meta(span), pats, ret, body });
            if !self.eat_punct("|") {
                break;
            }
        }
        let (name, op) = name.expect("at least one clause");
        let fixity = self.infix.get(&name);
        let span = self.span_from(start);
        Ok(FunBind { meta: self.meta(span), name, op, fixity, clauses })
    }

    /// `[op] f apat ... apat` or `apat f apat` with `f` infix.
    fn clause_head(&mut self) -> Result<(String, bool, Vec<Pat>)> {
        if self.eat_kw("op") {
            let name = self.ident()?;
            let pats = self.atpats_until_eq()?;
            if pats.is_empty() {
                return self.expected("function argument pattern");
            }
            return Ok((name, true, pats));
        }
        // infix form: `x F y = ...`
        if let (Some(_), Some(op)) = (self.peek(), self.peek_at(1)) {
            let is_op = (op.kind == TokenKind::Ident || op.kind == TokenKind::SymbolicId)
                && !op.text.contains('.')
                && self.infix.is_infix(&op.text)
                && !self.peek().is_some_and(|t| t.kind == TokenKind::Ident && self.infix.is_infix(&t.text));
            if is_op && op.text != "=" {
                let start = self.here().start;
                let lhs = self.atpat()?;
                let name = self.ident()?;
                let rhs = self.atpat()?;
                let span = self.span_from(start);
                let tuple = Pat { meta: self.meta(span), kind: PatKind::Tuple(vec![lhs, rhs]) };
                return Ok((name, false, vec![tuple]));
            }
        }
        let name = self.ident()?;
        if self.infix.is_infix(&name) {
            return Err(Error::syntax(
                self.toks[self.pos - 1].span,
                format!("`{name}` is infix; write `op {name}` to declare it in prefix form"),
            ));
        }
        let pats = self.atpats_until_eq()?;
        if pats.is_empty() {
            return self.expected("function argument pattern");
        }
        Ok((name, false, pats))
    }

    fn atpats_until_eq(&mut self) -> Result<Vec<Pat>> {
        let mut pats = Vec::new();
        while !self.at_sym("=") && !self.at_punct(":") && self.at_atpat_start() {
            pats.push(self.atpat()?);
        }
        Ok(pats)
    }

    fn datbinds(&mut self) -> Result<Vec<DatBind>> {
        let mut binds = Vec::new();
        loop {
            let start = self.here().start;
            let tyvars = self.tyvar_seq()?;
            let name = self.alpha_ident()?;
            self.expect_equals()?;
            if self.at_kw("datatype") {
                return Err(Error::unsupported(self.here(), Stage::Parse, "datatype replication is not supported"));
            }
            let mut cons = Vec::new();
            loop {
                let cstart = self.here().start;
                self.eat_kw("op");
                let cname = self.ident()?;
                let arg = if self.eat_kw("of") { Some(self.ty()?) } else { None };
                let span = self.span_from(cstart);
                cons.push(ConBind { meta: self.meta(span), name: cname, arg });
                if !self.eat_punct("|") {
                    break;
                }
            }
            let span = self.span_from(start);
            binds.push(DatBind { meta: self.meta(span), tyvars, name, cons });
            if !self.eat_kw("and") {
                break;
            }
        }
        self.check_unsupported()?;
        Ok(binds)
    }

    fn typbinds(&mut self) -> Result<Vec<TypBind>> {
        let mut binds = Vec::new();
        loop {
            let start = self.here().start;
            let tyvars = self.tyvar_seq()?;
            let name = self.alpha_ident()?;
            self.expect_equals()?;
            let ty = self.ty()?;
            let span = self.span_from(start);
            binds.push(TypBind { meta: self.meta(span), tyvars, name, ty });
            if !self.eat_kw("and") {
                break;
            }
        }
        Ok(binds)
    }

    // ------------------------------------------------------------------
    // Contracts

    fn contract(&mut self) -> Result<Contract> {
        let start = self.here().start;
        self.pos += 1; // (!!
        self.eat_kw("op");
        let fname = self.ident()?;
        let mut inputs = Vec::new();
        while !self.at_sym("==>") {
            if !self.at_atpat_start() {
                return self.expected("contract input or `==>`");
            }
            let p = self.atpat()?;
            check_contract_input(&p)?;
            inputs.push(p);
        }
        if inputs.is_empty() {
            return self.err("a contract needs at least one input");
        }
        self.pos += 1; // ==>
        let output = self.pat()?;
        if !is_contract_var(&output) {
            return Err(Error::syntax(
                output.meta.span,
                "contract output must be a single (optionally typed) variable",
            ));
        }
        self.expect_punct(";")?;
        self.expect_kw("REQUIRES")?;
        self.expect_punct(":")?;
        let requires = self.exp()?;
        self.expect_punct(";")?;
        self.expect_kw("ENSURES")?;
        self.expect_punct(":")?;
        let ensures = self.exp()?;
        self.eat_punct(";");
        match self.peek() {
            Some(t) if t.kind == TokenKind::ContractClose => self.pos += 1,
            _ => return self.expected("`!!)`"),
        }
        let span = self.span_from(start);
        Ok(Contract { meta: self.meta(span), fname, inputs, output, requires, ensures })
    }

    // ------------------------------------------------------------------
    // Modules

    fn strbinds(&mut self) -> Result<Vec<StrBind>> {
        let mut binds = Vec::new();
        loop {
            let start = self.here().start;
            let name = self.alpha_ident()?;
            let sig = self.opt_ascription()?;
            self.expect_equals()?;
            let body = self.strexp()?;
            let span = self.span_from(start);
            binds.push(StrBind { meta: self.meta(span), name, sig, body });
            if !self.eat_kw("and") {
                break;
            }
        }
        Ok(binds)
    }

    fn opt_ascription(&mut self) -> Result<Option<Ascription>> {
        if self.eat_punct(":") {
            Ok(Some(Ascription { sig: self.sigexp()?, opaque: false }))
        } else if self.eat_punct(":>") {
            Ok(Some(Ascription { sig: self.sigexp()?, opaque: true }))
        } else {
            Ok(None)
        }
    }

    fn strexp(&mut self) -> Result<StrExp> {
        let start = self.here().start;
        let mut e = self.atstrexp()?;
        while self.at_punct(":") || self.at_punct(":>") {
            let asc = self.opt_ascription()?.expect("checked");
            let span = self.span_from(start);
            e = StrExp { meta: self.meta(span), kind: StrExpKind::Constrained(Box::new(e), Box::new(asc)) };
        }
        Ok(e)
    }

    fn atstrexp(&mut self) -> Result<StrExp> {
        let start = self.here().start;
        if self.eat_kw("struct") {
            let saved = self.infix.clone();
            let decs = self.decs()?;
            self.check_unsupported()?;
            self.expect_kw("end")?;
            self.infix = saved;
            let span = self.span_from(start);
            return Ok(StrExp { meta: self.meta(span), kind: StrExpKind::Struct(decs) });
        }
        if self.at_kw("let") {
            return Err(Error::unsupported(self.here(), Stage::Parse, "`let` structure expressions are not supported"));
        }
        let id = self.long_ident()?;
        if self.at_punct("(") && id.is_simple() {
            self.pos += 1;
            let arg = if self.at_dec_start() {
                let astart = self.here().start;
                let saved = self.infix.clone();
                let decs = self.decs()?;
                self.infix = saved;
                let span = self.span_from(astart);
                StrExp { meta: self.meta(span), kind: StrExpKind::Struct(decs) }
            } else {
                self.strexp()?
            };
            self.expect_punct(")")?;
            let span = self.span_from(start);
            return Ok(StrExp { meta: self.meta(span), kind: StrExpKind::App(id.name, Box::new(arg)) });
        }
        let span = self.span_from(start);
        Ok(StrExp { meta: self.meta(span), kind: StrExpKind::Name(id) })
    }

    fn sigbinds(&mut self) -> Result<Vec<SigBind>> {
        let mut binds = Vec::new();
        loop {
            let start = self.here().start;
            let name = self.alpha_ident()?;
            self.expect_equals()?;
            let sig = self.sigexp()?;
            let span = self.span_from(start);
            binds.push(SigBind { meta: self.meta(span), name, sig });
            if !self.eat_kw("and") {
                break;
            }
        }
        Ok(binds)
    }

    fn sigexp(&mut self) -> Result<SigExp> {
        let start = self.here().start;
        let kind = if self.eat_kw("sig") {
            let specs = self.specs()?;
            self.check_unsupported()?;
            self.expect_kw("end")?;
            SigExpKind::Sig(specs)
        } else {
            SigExpKind::Name(self.alpha_ident()?)
        };
        self.check_unsupported()?;
        let span = self.span_from(start);
        Ok(SigExp { meta: self.meta(span), kind })
    }

    fn specs(&mut self) -> Result<Vec<Spec>> {
        let mut out = Vec::new();
        loop {
            if self.eat_punct(";") {
                continue;
            }
            self.check_unsupported()?;
            let start = self.here().start;
            let kind = if self.eat_kw("val") {
                let mut vals = Vec::new();
                loop {
                    let n = self.ident()?;
                    self.expect_punct(":")?;
                    vals.push((n, self.ty()?));
                    if !self.eat_kw("and") {
                        break;
                    }
                }
                SpecKind::Val(vals)
            } else if self.at_kw("type") || self.at_kw("eqtype") {
                self.pos += 1;
                let mut specs = Vec::new();
                loop {
                    let tyvars = self.tyvar_seq()?;
                    let name = self.alpha_ident()?;
                    let def = if self.at_sym("=") {
                        self.pos += 1;
                        Some(self.ty()?)
                    } else {
                        None
                    };
                    specs.push(TypeSpec { tyvars, name, def });
                    if !self.eat_kw("and") {
                        break;
                    }
                }
                SpecKind::Type(specs)
            } else if self.eat_kw("datatype") {
                SpecKind::Datatype(self.datbinds()?)
            } else if self.eat_kw("structure") {
                let mut strs = Vec::new();
                loop {
                    let n = self.alpha_ident()?;
                    self.expect_punct(":")?;
                    strs.push((n, self.sigexp()?));
                    if !self.eat_kw("and") {
                        break;
                    }
                }
                SpecKind::Structure(strs)
            } else if self.eat_kw("include") {
                SpecKind::Include(self.sigexp()?)
            } else {
                break;
            };
            let span = self.span_from(start);
            out.push(Spec { meta: self.meta(span), kind });
        }
        Ok(out)
    }

    fn functorbinds(&mut self) -> Result<Vec<FunctorBind>> {
        let mut binds = Vec::new();
        loop {
            let start = self.here().start;
            let name = self.alpha_ident()?;
            self.expect_punct("(")?;
            if self.at_dec_start() || self.at_kw("type") || self.at_kw("val") {
                return Err(Error::unsupported(
                    self.here(),
                    Stage::Parse,
                    "functor parameters given as specifications are not supported; use `(Name : SIG)`",
                ));
            }
            let param = self.alpha_ident()?;
            self.expect_punct(":")?;
            let param_sig = self.sigexp()?;
            self.expect_punct(")")?;
            let result_sig = self.opt_ascription()?;
            self.expect_equals()?;
            let body = self.strexp()?;
            let span = self.span_from(start);
            binds.push(FunctorBind { meta: self.meta(span), name, param, param_sig, result_sig, body });
            if !self.eat_kw("and") {
                break;
            }
        }
        Ok(binds)
    }

    // ------------------------------------------------------------------
    // Types

    pub(crate) fn ty(&mut self) -> Result<Ty> {
        let start = self.here().start;
        let lhs = self.tuple_ty()?;
        if self.eat_punct("->") {
            let rhs = self.ty()?;
            let span = self.span_from(start);
            return Ok(Ty { meta: self.meta(span), kind: TyKind::Arrow(Box::new(lhs), Box::new(rhs)) });
        }
        Ok(lhs)
    }

    fn tuple_ty(&mut self) -> Result<Ty> {
        let start = self.here().start;
        let first = self.app_ty()?;
        if !self.at_sym("*") {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.at_sym("*") {
            self.pos += 1;
            parts.push(self.app_ty()?);
        }
        let span = self.span_from(start);
        Ok(Ty { meta: self.meta(span), kind: TyKind::Tuple(parts) })
    }

    fn at_tycon(&self) -> bool {
        self.peek().is_some_and(|t| t.kind == TokenKind::Ident && !t.text.starts_with('\''))
    }

    fn app_ty(&mut self) -> Result<Ty> {
        let start = self.here().start;
        let mut t = self.at_ty()?;
        while self.at_tycon() {
            let con = self.long_ident()?;
            let span = self.span_from(start);
            t = Ty { meta: self.meta(span), kind: TyKind::Con(vec![t], con) };
        }
        Ok(t)
    }

    fn at_ty(&mut self) -> Result<Ty> {
        let start = self.here().start;
        if self.at_tyvar() {
            let v = self.tyvar()?;
            let span = self.span_from(start);
            return Ok(Ty { meta: self.meta(span), kind: TyKind::Var(v) });
        }
        if self.eat_punct("{") {
            let mut fields = Vec::new();
            if !self.at_punct("}") {
                loop {
                    let l = self.label()?;
                    self.expect_punct(":")?;
                    fields.push((l, self.ty()?));
                    if !self.eat_punct(",") {
                        break;
                    }
                }
            }
            self.expect_punct("}")?;
            let span = self.span_from(start);
            return Ok(Ty { meta: self.meta(span), kind: TyKind::Record(fields) });
        }
        if self.eat_punct("(") {
            let first = self.ty()?;
            if self.eat_punct(")") {
                return Ok(first);
            }
            let mut args = vec![first];
            while self.eat_punct(",") {
                args.push(self.ty()?);
            }
            self.expect_punct(")")?;
            if !self.at_tycon() {
                return self.expected("type constructor after type argument sequence");
            }
            let con = self.long_ident()?;
            let span = self.span_from(start);
            return Ok(Ty { meta: self.meta(span), kind: TyKind::Con(args, con) });
        }
        if self.at_tycon() {
            let con = self.long_ident()?;
            let span = self.span_from(start);
            return Ok(Ty { meta: self.meta(span), kind: TyKind::Con(Vec::new(), con) });
        }
        self.expected("type")
    }

    // ------------------------------------------------------------------
    // Patterns

    fn at_atpat_start(&self) -> bool {
        match self.peek() {
            None => false,
            Some(t) => match t.kind {
                TokenKind::Ident => !t.text.starts_with('\'') && !self.infix.is_infix(&t.text),
                TokenKind::SymbolicId => !self.infix.is_infix(&t.text) && t.text != "==>",
                TokenKind::IntLit | TokenKind::StringLit | TokenKind::CharLit => true,
                TokenKind::RealLit => true,
                TokenKind::Keyword => t.text == "op",
                TokenKind::Punct => matches!(t.text.as_str(), "_" | "(" | "[" | "{"),
                _ => false,
            },
        }
    }

    pub(crate) fn pat(&mut self) -> Result<Pat> {
        let start = self.here().start;
        // layered: `x as p` / `x : ty as p`
        if let (Some(a), Some(b)) = (self.peek(), self.peek_at(1)) {
            let is_var = a.kind == TokenKind::Ident
                && !a.text.contains('.')
                && !a.text.starts_with('\'')
                && !self.infix.is_infix(&a.text);
            if is_var && b.is(TokenKind::Keyword, "as") {
                let name = a.text.clone();
                self.pos += 2;
                let inner = self.pat()?;
                let span = self.span_from(start);
                return Ok(Pat {
                    meta: self.meta(span),
                    kind: PatKind::Layered { name, ty: None, pat: Box::new(inner) },
                });
            }
            if is_var && b.is(TokenKind::Punct, ":") {
                let save = self.pos;
                let save_id = self.next_id;
                self.pos += 2;
                if let Ok(ty) = self.ty() {
                    if self.eat_kw("as") {
                        let name = a.text.clone();
                        let inner = self.pat()?;
                        let span = self.span_from(start);
                        return Ok(Pat {
                            meta: self.meta(span),
                            kind: PatKind::Layered { name, ty: Some(ty), pat: Box::new(inner) },
                        });
                    }
                }
                self.pos = save;
                self.next_id = save_id;
            }
        }
        let mut p = self.infix_pat()?;
        while self.eat_punct(":") {
            let ty = self.ty()?;
            let span = self.span_from(start);
            p = Pat { meta: self.meta(span), kind: PatKind::Typed(Box::new(p), ty) };
        }
        Ok(p)
    }

    fn app_pat(&mut self) -> Result<Pat> {
        let start = self.here().start;
        let head = self.atpat()?;
        if !self.at_atpat_start() || self.at_sym("=") {
            return Ok(head);
        }
        let con = match &head.kind {
            PatKind::Var(v) => LongId::simple(v.clone()),
            PatKind::Con(c) => c.clone(),
            _ => return self.err("only constructors can be applied in patterns"),
        };
        let arg = self.atpat()?;
        if self.at_atpat_start() && !self.at_sym("=") {
            return self.err("constructor applied to more than one argument");
        }
        let span = self.span_from(start);
        Ok(Pat { meta: self.meta(span), kind: PatKind::ConApp(con, Box::new(arg)) })
    }

    fn infix_op_here(&self) -> Option<(String, Fixity)> {
        let t = self.peek()?;
        if (t.kind == TokenKind::Ident || t.kind == TokenKind::SymbolicId) && !t.text.contains('.') {
            self.infix.get(&t.text).map(|f| (t.text.clone(), f))
        } else {
            None
        }
    }

    fn infix_pat(&mut self) -> Result<Pat> {
        let mut operands = vec![self.app_pat()?];
        let mut ops: Vec<(String, Fixity)> = Vec::new();
        while let Some((op, fx)) = self.infix_op_here() {
            if op == "=" {
                break;
            }
            self.pos += 1;
            while let Some((_, top)) = ops.last() {
                if top.prec > fx.prec || (top.prec == fx.prec && fx.assoc == Assoc::Left) {
                    self.reduce_pat(&mut operands, &mut ops);
                } else {
                    break;
                }
            }
            ops.push((op, fx));
            operands.push(self.app_pat()?);
        }
        while !ops.is_empty() {
            self.reduce_pat(&mut operands, &mut ops);
        }
        Ok(operands.pop().expect("one operand"))
    }

    fn reduce_pat(&mut self, operands: &mut Vec<Pat>, ops: &mut Vec<(String, Fixity)>) {
        let (op, _) = ops.pop().expect("operator");
        let rhs = operands.pop().expect("rhs");
        let lhs = operands.pop().expect("lhs");
        let span = lhs.meta.span.to(rhs.meta.span);
        let meta = self.meta(span);
        operands.push(Pat { meta, kind: PatKind::Infix { op, lhs: Box::new(lhs), rhs: Box::new(rhs) } });
    }

    pub(crate) fn atpat(&mut self) -> Result<Pat> {
        let start = self.here().start;
        let Some(t) = self.peek() else {
            return self.expected("pattern");
        };
        let kind = match t.kind {
            TokenKind::Punct if t.text == "_" => {
                self.pos += 1;
                PatKind::Wild
            }
            TokenKind::IntLit => {
                self.pos += 1;
                PatKind::SCon(SCon::Int(int_lit(t)?))
            }
            TokenKind::StringLit => {
                self.pos += 1;
                PatKind::SCon(SCon::Str(decode_literal(&t.text)))
            }
            TokenKind::CharLit => {
                self.pos += 1;
                PatKind::SCon(SCon::Char(decode_literal(&t.text).chars().next().unwrap_or('\0')))
            }
            TokenKind::RealLit => {
                return Err(Error::syntax(t.span, "real constants are not allowed in patterns"));
            }
            TokenKind::Keyword if t.text == "op" => {
                self.pos += 1;
                let id = self.long_ident()?;
                if id.is_simple() {
                    PatKind::Var(id.name)
                } else {
                    PatKind::Con(id)
                }
            }
            TokenKind::Ident | TokenKind::SymbolicId => {
                let id = self.long_ident()?;
                if id.is_simple() {
                    PatKind::Var(id.name)
                } else {
                    PatKind::Con(id)
                }
            }
            TokenKind::Punct if t.text == "(" => {
                self.pos += 1;
                if self.eat_punct(")") {
                    PatKind::Unit
                } else {
                    let first = self.pat()?;
                    if self.eat_punct(")") {
                        return Ok(first);
                    }
                    let mut items = vec![first];
                    while self.eat_punct(",") {
                        items.push(self.pat()?);
                    }
                    self.expect_punct(")")?;
                    PatKind::Tuple(items)
                }
            }
            TokenKind::Punct if t.text == "[" => {
                self.pos += 1;
                let mut items = Vec::new();
                if !self.at_punct("]") {
                    loop {
                        items.push(self.pat()?);
                        if !self.eat_punct(",") {
                            break;
                        }
                    }
                }
                self.expect_punct("]")?;
                PatKind::List(items)
            }
            TokenKind::Punct if t.text == "{" => {
                self.pos += 1;
                let mut fields = Vec::new();
                let mut ellipsis = false;
                if !self.at_punct("}") {
                    loop {
                        if self.eat_punct("...") {
                            ellipsis = true;
                            break;
                        }
                        let fstart = self.here().start;
                        let label = self.label()?;
                        if self.at_sym("=") {
                            self.pos += 1;
                            fields.push((label, self.pat()?));
                        } else {
                            // punned field `{name}` / `{name : ty}` / `{name as p}`
                            let mut p = Pat { meta: Meta::default(), kind: PatKind::Var(label.clone()) };
                            let span = self.span_from(fstart);
                            p.meta = self.meta(span);
                            if self.eat_punct(":") {
                                let ty = self.ty()?;
                                let span = self.span_from(fstart);
                                p = Pat { meta: self.meta(span), kind: PatKind::Typed(Box::new(p), ty) };
                            }
                            fields.push((label, p));
                        }
                        if !self.eat_punct(",") {
                            break;
                        }
                    }
                }
                self.expect_punct("}")?;
                PatKind::Record { fields, ellipsis }
            }
            _ => return self.expected("pattern"),
        };
        let span = self.span_from(start);
        Ok(Pat { meta: self.meta(span), kind })
    }

    // ------------------------------------------------------------------
    // Expressions

    pub(crate) fn exp(&mut self) -> Result<Exp> {
        self.check_unsupported()?;
        let start = self.here().start;
        let mut lhs = self.andalso_exp()?;
        while self.eat_kw("orelse") {
            let rhs = self.andalso_exp()?;
            let span = self.span_from(start);
            lhs = Exp { meta: self.meta(span), kind: ExpKind::Orelse(Box::new(lhs), Box::new(rhs)) };
        }
        self.check_unsupported()?;
        Ok(lhs)
    }

    fn andalso_exp(&mut self) -> Result<Exp> {
        let start = self.here().start;
        let mut lhs = self.typed_exp()?;
        while self.eat_kw("andalso") {
            let rhs = self.typed_exp()?;
            let span = self.span_from(start);
            lhs = Exp { meta: self.meta(span), kind: ExpKind::Andalso(Box::new(lhs), Box::new(rhs)) };
        }
        Ok(lhs)
    }

    fn typed_exp(&mut self) -> Result<Exp> {
        self.check_unsupported()?;
        let start = self.here().start;
        if self.eat_kw("fn") {
            let m = self.match_()?;
            let span = self.span_from(start);
            return Ok(Exp { meta: self.meta(span), kind: ExpKind::Fn(m) });
        }
        if self.eat_kw("case") {
            let scrut = self.exp()?;
            self.expect_kw("of")?;
            let m = self.match_()?;
            let span = self.span_from(start);
            return Ok(Exp { meta: self.meta(span), kind: ExpKind::Case(Box::new(scrut), m) });
        }
        if self.eat_kw("if") {
            let c = self.exp()?;
            self.expect_kw("then")?;
            let t = self.exp()?;
            self.expect_kw("else")?;
            let e = self.exp()?;
            let span = self.span_from(start);
            return Ok(Exp { meta: self.meta(span), kind: ExpKind::If(Box::new(c), Box::new(t), Box::new(e)) });
        }
        let mut e = self.infix_exp()?;
        while self.eat_punct(":") {
            let ty = self.ty()?;
            let span = self.span_from(start);
            e = Exp { meta: self.meta(span), kind: ExpKind::Typed(Box::new(e), ty) };
        }
        Ok(e)
    }

    fn match_(&mut self) -> Result<Match> {
        let start = self.here().start;
        let mut rules = Vec::new();
        loop {
            let pat = self.pat()?;
            self.expect_punct("=>")?;
            let exp = self.exp()?;
            rules.push(Rule { pat, exp });
            if !self.eat_punct("|") {
                break;
            }
        }
        let span = self.span_from(start);
        Ok(Match { meta: self.meta(span), rules })
    }

    fn at_atexp_start(&self) -> bool {
        match self.peek() {
            None => false,
            Some(t) => match t.kind {
                TokenKind::Ident => !t.text.starts_with('\'') && !self.infix.is_infix(&t.text),
                TokenKind::SymbolicId => !self.infix.is_infix(&t.text),
                TokenKind::IntLit | TokenKind::RealLit | TokenKind::StringLit | TokenKind::CharLit => true,
                TokenKind::Keyword => matches!(t.text.as_str(), "op" | "let"),
                TokenKind::Punct => matches!(t.text.as_str(), "(" | "[" | "{" | "#"),
                _ => false,
            },
        }
    }

    fn app_exp(&mut self) -> Result<Exp> {
        let start = self.here().start;
        let mut e = self.atexp()?;
        while self.at_atexp_start() {
            let arg = self.atexp()?;
            let span = self.span_from(start);
            e = Exp { meta: self.meta(span), kind: ExpKind::App(Box::new(e), Box::new(arg)) };
        }
        Ok(e)
    }

    fn infix_exp(&mut self) -> Result<Exp> {
        if !self.at_atexp_start() {
            self.check_unsupported()?;
            return self.expected("expression");
        }
        let mut operands = vec![self.app_exp()?];
        let mut ops: Vec<(String, Fixity, Span)> = Vec::new();
        while let Some((op, fx)) = self.infix_op_here() {
            let op_span = self.here();
            self.pos += 1;
            while let Some((_, top, _)) = ops.last() {
                if top.prec > fx.prec || (top.prec == fx.prec && fx.assoc == Assoc::Left) {
                    self.reduce_exp(&mut operands, &mut ops);
                } else {
                    break;
                }
            }
            ops.push((op, fx, op_span));
            if !self.at_atexp_start() {
                self.check_unsupported()?;
                return self.expected("operand");
            }
            operands.push(self.app_exp()?);
        }
        while !ops.is_empty() {
            self.reduce_exp(&mut operands, &mut ops);
        }
        Ok(operands.pop().expect("one operand"))
    }

    fn reduce_exp(&mut self, operands: &mut Vec<Exp>, ops: &mut Vec<(String, Fixity, Span)>) {
        let (op, _, _) = ops.pop().expect("operator");
        let rhs = operands.pop().expect("rhs");
        let lhs = operands.pop().expect("lhs");
        let span = lhs.meta.span.to(rhs.meta.span);
        let meta = self.meta(span);
        operands.push(Exp {
            meta,
            kind: ExpKind::Infix { op: LongId::simple(op), lhs: Box::new(lhs), rhs: Box::new(rhs) },
        });
    }

    fn atexp(&mut self) -> Result<Exp> {
        let start = self.here().start;
        let Some(t) = self.peek() else {
            return self.expected("expression");
        };
        let kind = match t.kind {
            TokenKind::IntLit => {
                self.pos += 1;
                ExpKind::SCon(SCon::Int(int_lit(t)?))
            }
            TokenKind::RealLit => {
                self.pos += 1;
                ExpKind::SCon(SCon::Real(t.text.clone()))
            }
            TokenKind::StringLit => {
                self.pos += 1;
                ExpKind::SCon(SCon::Str(decode_literal(&t.text)))
            }
            TokenKind::CharLit => {
                self.pos += 1;
                ExpKind::SCon(SCon::Char(decode_literal(&t.text).chars().next().unwrap_or('\0')))
            }
            TokenKind::Keyword if t.text == "op" => {
                self.pos += 1;
                ExpKind::Var { name: self.long_ident()?, op: true }
            }
            TokenKind::Keyword if t.text == "let" => {
                self.pos += 1;
                let saved = self.infix.clone();
                let decs = self.decs()?;
                self.check_unsupported()?;
                self.expect_kw("in")?;
                let body = self.exp()?;
                if self.at_punct(";") {
                    return Err(Error::unsupported(
                        self.here(),
                        Stage::Parse,
                        "expression sequences are outside the pure subset",
                    ));
                }
                self.expect_kw("end")?;
                self.infix = saved;
                ExpKind::Let(decs, Box::new(body))
            }
            TokenKind::Ident | TokenKind::SymbolicId => {
                self.pos += 1;
                ExpKind::Var { name: split_long(&t.text), op: false }
            }
            TokenKind::Punct if t.text == "#" => {
                self.pos += 1;
                ExpKind::Selector(self.label()?)
            }
            TokenKind::Punct if t.text == "(" => {
                self.pos += 1;
                if self.eat_punct(")") {
                    ExpKind::Unit
                } else {
                    let first = self.exp()?;
                    if self.eat_punct(")") {
                        return Ok(first);
                    }
                    if self.at_punct(";") {
                        return Err(Error::unsupported(
                            self.here(),
                            Stage::Parse,
                            "expression sequences are outside the pure subset",
                        ));
                    }
                    let mut items = vec![first];
                    while self.eat_punct(",") {
                        items.push(self.exp()?);
                    }
                    self.expect_punct(")")?;
                    ExpKind::Tuple(items)
                }
            }
            TokenKind::Punct if t.text == "[" => {
                self.pos += 1;
                let mut items = Vec::new();
                if !self.at_punct("]") {
                    loop {
                        items.push(self.exp()?);
                        if !self.eat_punct(",") {
                            break;
                        }
                    }
                }
                self.expect_punct("]")?;
                ExpKind::List(items)
            }
            TokenKind::Punct if t.text == "{" => {
                self.pos += 1;
                let mut fields = Vec::new();
                if !self.at_punct("}") {
                    loop {
                        let l = self.label()?;
                        self.expect_equals()?;
                        fields.push((l, self.exp()?));
                        if !self.eat_punct(",") {
                            break;
                        }
                    }
                }
                self.expect_punct("}")?;
                ExpKind::Record(fields)
            }
            _ => {
                self.check_unsupported()?;
                return self.expected("expression");
            }
        };
        let span = self.span_from(start);
        Ok(Exp { meta: self.meta(span), kind })
    }
}

fn int_lit(t: &Token) -> Result<i64> {
    int_value(&t.text)
        .ok_or_else(|| Error::Lex { span: t.span, message: format!("integer literal `{}` out of range", t.text) })
}

fn split_long(text: &str) -> LongId {
    // symbolic tail after a qualifier: `Int.+`
    let mut parts: Vec<&str> = Vec::new();
    let mut rest = text;
    while let Some(dot) = rest.find('.') {
        let (q, tail) = rest.split_at(dot);
        if q.is_empty() {
            break;
        }
        parts.push(q);
        rest = &tail[1..];
    }
    LongId { qualifiers: parts.iter().map(|s| s.to_string()).collect(), name: rest.to_string() }
}

fn is_contract_var(p: &Pat) -> bool {
    match &p.kind {
        PatKind::Var(_) => true,
        PatKind::Typed(inner, _) => is_contract_var(inner),
        _ => false,
    }
}

fn check_contract_input(p: &Pat) -> Result<()> {
    let ok = match &p.kind {
        PatKind::Tuple(items) => items.iter().all(is_contract_var),
        PatKind::Typed(inner, _) => match &inner.kind {
            PatKind::Tuple(items) => items.iter().all(is_contract_var),
            _ => is_contract_var(inner),
        },
        _ => is_contract_var(p),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::syntax(p.meta.span, "contract inputs must be variables or tuples of variables (optionally typed)"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::lexer::tokenize;

    fn parse_src(src: &str) -> Result<(Program, InfixEnv)> {
        parse(&tokenize(src)?)
    }

    fn only_val_exp(src: &str) -> Exp {
        let (prog, _) = parse_src(src).unwrap();
        match &prog[0].kind {
            DecKind::Val { binds, .. } => binds[0].exp.clone(),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn if_then_else_is_not_desugared() {
        let e = only_val_exp("val z = if b then 1 else 2");
        assert!(matches!(e.kind, ExpKind::If(..)));
    }

    #[test]
    fn derived_forms_keep_their_variants() {
        assert!(matches!(only_val_exp("val z = ()").kind, ExpKind::Unit));
        assert!(matches!(only_val_exp("val z = (1, 2)").kind, ExpKind::Tuple(_)));
        assert!(matches!(only_val_exp("val z = [1, 2]").kind, ExpKind::List(_)));
        assert!(matches!(only_val_exp("val z = a andalso b").kind, ExpKind::Andalso(..)));
        assert!(matches!(only_val_exp("val z = a orelse b").kind, ExpKind::Orelse(..)));
        assert!(matches!(only_val_exp("val z = case x of _ => 1").kind, ExpKind::Case(..)));
        assert!(matches!(only_val_exp("val z = 1 + 2").kind, ExpKind::Infix { .. }));
    }

    #[test]
    fn infix_precedence() {
        let e = only_val_exp("val z = 1 + 2 * 3");
        let ExpKind::Infix { op, rhs, .. } = e.kind else { panic!() };
        assert_eq!(op.name, "+");
        assert!(matches!(rhs.kind, ExpKind::Infix { ref op, .. } if op.name == "*"));
        let e = only_val_exp("val z = 1 :: 2 :: nil");
        let ExpKind::Infix { lhs, .. } = e.kind else { panic!() };
        assert!(matches!(lhs.kind, ExpKind::SCon(SCon::Int(1))));
    }

    #[test]
    fn infix_directive_default_fixity() {
        let (prog, env) = parse_src("infix F  fun op F (x, y) = x*x + y").unwrap();
        assert_eq!(env.get("F"), Some(Fixity { assoc: Assoc::Left, prec: 0 }));
        let DecKind::Fun { binds, .. } = &prog[1].kind else { panic!() };
        assert_eq!(binds[0].name, "F");
        assert!(binds[0].op);
        assert_eq!(binds[0].fixity, Some(Fixity { assoc: Assoc::Left, prec: 0 }));
        assert!(matches!(prog[0].kind, DecKind::Infix { .. }));
    }

    #[test]
    fn contract_attaches_to_following_fun() {
        let src = "(!! posAdd(x, y) ==> b; REQUIRES: x > 0 andalso y > 0; ENSURES: b > x andalso b > y; !!) fun posAdd(x, y) = x + y;";
        let (prog, _) = parse_src(src).unwrap();
        assert_eq!(prog.len(), 1);
        let DecKind::Fun { contract: Some(c), .. } = &prog[0].kind else { panic!() };
        assert_eq!(c.fname, "posAdd");
        assert_eq!(c.inputs.len(), 1);
        assert!(matches!(c.requires.kind, ExpKind::Andalso(..)));
    }

    #[test]
    fn contract_must_be_followed_by_fun() {
        let src = "(!! f x ==> y; REQUIRES: true; ENSURES: true; !!) val z = 1 fun f x = x";
        assert!(matches!(parse_src(src), Err(Error::Syntax { .. })));
    }

    #[test]
    fn contract_name_must_match() {
        let src = "(!! g x ==> y; REQUIRES: true; ENSURES: true; !!) fun f x = x";
        assert!(matches!(parse_src(src), Err(Error::Syntax { .. })));
    }

    #[test]
    fn contract_inputs_are_restricted() {
        let src = "(!! f (x::l) ==> y; REQUIRES: true; ENSURES: true; !!) fun f x = x";
        assert!(matches!(parse_src(src), Err(Error::Syntax { .. })));
    }

    #[test]
    fn unsupported_constructs() {
        assert!(matches!(parse_src("val x = raise Fail \"x\""), Err(Error::Unsupported { .. })));
        assert!(matches!(parse_src("exception E"), Err(Error::Unsupported { .. })));
        assert!(matches!(parse_src("fun f x = x handle _ => 0"), Err(Error::Unsupported { .. })));
        assert!(matches!(parse_src("open List"), Err(Error::Unsupported { .. })));
        assert!(matches!(parse_src("fun f (x : ''a) = x"), Err(Error::Unsupported { .. })));
    }

    #[test]
    fn patterns() {
        let (prog, _) = parse_src("val x::l = [1,2,3]").unwrap();
        let DecKind::Val { binds, .. } = &prog[0].kind else { panic!() };
        assert!(matches!(binds[0].pat.kind, PatKind::Infix { ref op, .. } if op == "::"));
        let (prog, _) = parse_src("fun isBob ({name = \"Bob\",...}: r) = true | isBob {...} = false").unwrap();
        let DecKind::Fun { binds, .. } = &prog[0].kind else { panic!() };
        assert_eq!(binds[0].clauses.len(), 2);
        let PatKind::Typed(inner, _) = &binds[0].clauses[0].pats[0].kind else { panic!() };
        assert!(matches!(inner.kind, PatKind::Record { ellipsis: true, .. }));
    }

    #[test]
    fn modules() {
        let src = "signature PAIR = sig type t1 type t = t1 * t1 val default : unit -> t end
                   structure IntString : PAIR = struct type t1 = int type t = t1 * t1 fun default () = (0, 0) end
                   functor Example (Pair : PAIR) = struct val (a, b) = Pair.default () end
                   structure S = Example (IntString)";
        let (prog, _) = parse_src(src).unwrap();
        assert_eq!(prog.len(), 4);
        let DecKind::Structure(b) = &prog[3].kind else { panic!() };
        assert!(matches!(b[0].body.kind, StrExpKind::App(ref f, _) if f == "Example"));
    }

    #[test]
    fn clause_arity_must_agree() {
        assert!(parse_src("fun f x y = 1 | f x = 2").is_err());
    }
}
