//! Source syntax tree. Derived forms (tuples, lists, `if`, `andalso`,
//! `orelse`, `case`, infix applications, `fun`) are kept as their own
//! variants rather than desugared into the core language.

use crate::diag::Span;
use std::fmt;

/// Identity of a syntax node within one compilation unit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

/// Node identity plus source location.
///
/// `Meta` never participates in structural equality: two trees that differ
/// only in node ids and spans compare equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct Meta {
    pub id: NodeId,
    pub span: Span,
}

impl PartialEq for Meta {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for Meta {}

/// Possibly qualified identifier, e.g. `List.hd` or `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LongId {
    pub qualifiers: Vec<String>,
    pub name: String,
}

impl LongId {
    pub fn simple(name: impl Into<String>) -> Self {
        LongId { qualifiers: Vec::new(), name: name.into() }
    }

    pub fn is_simple(&self) -> bool {
        self.qualifiers.is_empty()
    }

    pub fn parts(&self) -> Vec<String> {
        let mut v = self.qualifiers.clone();
        v.push(self.name.clone());
        v
    }
}

impl fmt::Display for LongId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.qualifiers {
            write!(f, "{q}.")?;
        }
        f.write_str(&self.name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SCon {
    Int(i64),
    /// Kept as written so printing is lossless.
    Real(String),
    Str(String),
    Char(char),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ty {
    pub meta: Meta,
    pub kind: TyKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TyKind {
    /// `'a` (stored without the quote)
    Var(String),
    /// `(t1, ..., tn) longtycon`
    Con(Vec<Ty>, LongId),
    Tuple(Vec<Ty>),
    Arrow(Box<Ty>, Box<Ty>),
    /// Fields in source order.
    Record(Vec<(String, Ty)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pat {
    pub meta: Meta,
    pub kind: PatKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PatKind {
    Wild,
    /// Unqualified identifier; the elaborator rewrites it to `Con` when it
    /// names a constructor in scope.
    Var(String),
    Con(LongId),
    SCon(SCon),
    Unit,
    Tuple(Vec<Pat>),
    List(Vec<Pat>),
    /// `{lab = pat, ...}`; fields in source order.
    Record {
        fields: Vec<(String, Pat)>,
        ellipsis: bool,
    },
    ConApp(LongId, Box<Pat>),
    Infix {
        op: String,
        lhs: Box<Pat>,
        rhs: Box<Pat>,
    },
    Typed(Box<Pat>, Ty),
    Layered {
        name: String,
        ty: Option<Ty>,
        pat: Box<Pat>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Exp {
    pub meta: Meta,
    pub kind: ExpKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExpKind {
    /// Value identifier; `op` records an explicit `op` prefix.
    Var {
        name: LongId,
        op: bool,
    },
    Con {
        name: LongId,
        op: bool,
    },
    SCon(SCon),
    Unit,
    Tuple(Vec<Exp>),
    List(Vec<Exp>),
    Record(Vec<(String, Exp)>),
    /// `#lab`
    Selector(String),
    App(Box<Exp>, Box<Exp>),
    Infix {
        op: LongId,
        lhs: Box<Exp>,
        rhs: Box<Exp>,
    },
    Fn(Match),
    Case(Box<Exp>, Match),
    If(Box<Exp>, Box<Exp>, Box<Exp>),
    Andalso(Box<Exp>, Box<Exp>),
    Orelse(Box<Exp>, Box<Exp>),
    Let(Vec<Dec>, Box<Exp>),
    Typed(Box<Exp>, Ty),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Match {
    pub meta: Meta,
    pub rules: Vec<Rule>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub pat: Pat,
    pub exp: Exp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dec {
    pub meta: Meta,
    pub kind: DecKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DecKind {
    Val { rec: bool, tyvars: Vec<String>, binds: Vec<ValBind> },
    Fun { tyvars: Vec<String>, binds: Vec<FunBind>, contract: Option<Box<Contract>> },
    Datatype(Vec<DatBind>),
    Type(Vec<TypBind>),
    Local(Vec<Dec>, Vec<Dec>),
    Infix { assoc: Assoc, prec: Option<u8>, ids: Vec<String> },
    Nonfix(Vec<String>),
    Structure(Vec<StrBind>),
    Signature(Vec<SigBind>),
    Functor(Vec<FunctorBind>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Assoc {
    Left,
    Right,
}

/// Fixity of an infix identifier: associativity and precedence 0..=9.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fixity {
    pub assoc: Assoc,
    pub prec: u8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValBind {
    pub meta: Meta,
    pub pat: Pat,
    pub exp: Exp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunBind {
    pub meta: Meta,
    pub name: String,
    /// Declared with `fun op f`.
    pub op: bool,
    /// Fixity of `name` at the point of declaration, if it was infix.
    pub fixity: Option<Fixity>,
    pub clauses: Vec<Clause>,
}

impl FunBind {
    pub fn arity(&self) -> usize {
        self.clauses.first().map_or(0, |c| c.pats.len())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clause {
    pub meta: Meta,
    pub pats: Vec<Pat>,
    pub ret: Option<Ty>,
    pub body: Exp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatBind {
    pub meta: Meta,
    pub tyvars: Vec<String>,
    pub name: String,
    pub cons: Vec<ConBind>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConBind {
    pub meta: Meta,
    pub name: String,
    pub arg: Option<Ty>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TypBind {
    pub meta: Meta,
    pub tyvars: Vec<String>,
    pub name: String,
    pub ty: Ty,
}

/// `(!! f input ==> output; REQUIRES: e1; ENSURES: e2; !!)`
#[derive(Clone, Debug, PartialEq)]
pub struct Contract {
    pub meta: Meta,
    pub fname: String,
    /// One pattern per curried argument group.
    pub inputs: Vec<Pat>,
    pub output: Pat,
    pub requires: Exp,
    pub ensures: Exp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrBind {
    pub meta: Meta,
    pub name: String,
    pub sig: Option<Ascription>,
    pub body: StrExp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ascription {
    pub sig: SigExp,
    /// `:>` rather than `:`
    pub opaque: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrExp {
    pub meta: Meta,
    pub kind: StrExpKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StrExpKind {
    Struct(Vec<Dec>),
    Name(LongId),
    /// Functor application `F (strexp)` or `F (decs)`.
    App(String, Box<StrExp>),
    Constrained(Box<StrExp>, Box<Ascription>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SigBind {
    pub meta: Meta,
    pub name: String,
    pub sig: SigExp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SigExp {
    pub meta: Meta,
    pub kind: SigExpKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SigExpKind {
    Sig(Vec<Spec>),
    Name(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spec {
    pub meta: Meta,
    pub kind: SpecKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpecKind {
    Val(Vec<(String, Ty)>),
    /// `type t` (abstract) or `type t = ty` (manifest); `eqtype` is folded in.
    Type(Vec<TypeSpec>),
    Datatype(Vec<DatBind>),
    Structure(Vec<(String, SigExp)>),
    Include(SigExp),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TypeSpec {
    pub tyvars: Vec<String>,
    pub name: String,
    pub def: Option<Ty>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctorBind {
    pub meta: Meta,
    pub name: String,
    pub param: String,
    pub param_sig: SigExp,
    pub result_sig: Option<Ascription>,
    pub body: StrExp,
}

pub type Program = Vec<Dec>;

impl Dec {
    /// Short name of the declaration form, for diagnostics.
    pub fn describe(&self) -> &'static str {
        match &self.kind {
            DecKind::Val { rec: false, .. } => "val",
            DecKind::Val { rec: true, .. } => "val rec",
            DecKind::Fun { .. } => "fun",
            DecKind::Datatype(_) => "datatype",
            DecKind::Type(_) => "type",
            DecKind::Local(..) => "local",
            DecKind::Infix { .. } | DecKind::Nonfix(_) => "infix directive",
            DecKind::Structure(_) => "structure",
            DecKind::Signature(_) => "signature",
            DecKind::Functor(_) => "functor",
        }
    }
}
