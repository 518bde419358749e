//! Structures, signatures and functors.

use super::{Scope, ScopeKind, Translator};
use crate::diag::Result;
use crate::frontend::ast::*;
use crate::gallina::{Binder, ModBody, ModExpr, NameKind, Sentence, Term};

fn ty_vars(t: &Ty, out: &mut Vec<String>) {
    match &t.kind {
        TyKind::Var(a) => {
            if !out.contains(a) {
                out.push(a.clone());
            }
        }
        TyKind::Con(args, _) | TyKind::Tuple(args) => args.iter().for_each(|x| ty_vars(x, out)),
        TyKind::Arrow(a, b) => {
            ty_vars(a, out);
            ty_vars(b, out);
        }
        TyKind::Record(fs) => fs.iter().for_each(|(_, x)| ty_vars(x, out)),
    }
}

impl Translator<'_> {
    fn enter(&mut self, kind: ScopeKind, name: &str) {
        let mark = self.records.len();
        self.scopes.push(Scope::new(kind, mark));
        self.path.push(name.to_string());
    }

    fn exit(&mut self) {
        let scope = self.scopes.pop().expect("module scope");
        if matches!(scope.kind, ScopeKind::Signature | ScopeKind::Functor) {
            self.records.truncate(scope.record_mark);
        }
        self.path.pop();
    }

    /// Translate declarations as the body of a new scope.
    fn body(&mut self, kind: ScopeKind, name: &str, decs: &[Dec]) -> Result<Vec<Sentence>> {
        self.enter(kind, name);
        let mut out = Vec::new();
        let r = decs.iter().try_for_each(|d| self.dec_in_scope(d, &mut out));
        self.exit();
        r.map(|()| out)
    }

    /// Queue a lifted module sentence in the nearest scope that can hold it.
    fn lift(&mut self, s: Sentence) {
        let scope = self.scopes.iter_mut().rev().find(|s| s.kind != ScopeKind::Signature).expect("top-level scope");
        scope.lifted.push(s);
    }

    fn ascription(&mut self, a: &Ascription) -> Result<String> {
        if a.opaque {
            self.warn(a.sig.meta.span, "opaque ascription is translated as transparent");
        }
        self.sig_name(&a.sig)
    }

    /// Name of a module type, lifting inline signatures.
    fn sig_name(&mut self, s: &SigExp) -> Result<String> {
        match &s.kind {
            SigExpKind::Name(n) => Ok(n.clone()),
            SigExpKind::Sig(_) => {
                let name = self.names.fresh(NameKind::ModuleLift);
                let sentence = self.signature(&name, s)?;
                self.lift(sentence);
                Ok(name)
            }
        }
    }

    pub(super) fn structure(&mut self, sb: &StrBind) -> Result<Vec<Sentence>> {
        let mut out = Vec::new();
        let mut ascription = match &sb.sig {
            Some(a) => Some(self.ascription(a)?),
            None => None,
        };
        if sb.sig.as_ref().is_some_and(|a| a.opaque) {
            out.push(Sentence::Comment(format!("{} was sealed with an opaque signature", sb.name)));
        }
        let body = self.str_body(&sb.name, &sb.body, &mut ascription)?;
        out.push(Sentence::Module { name: sb.name.clone(), params: Vec::new(), ascription, body });
        Ok(out)
    }

    fn str_body(&mut self, name: &str, e: &StrExp, ascription: &mut Option<String>) -> Result<ModBody> {
        Ok(match &e.kind {
            StrExpKind::Struct(decs) => ModBody::Sentences(self.body(ScopeKind::Structure, name, decs)?),
            StrExpKind::Name(id) => ModBody::Alias(ModExpr { head: id.to_string(), args: Vec::new() }),
            StrExpKind::App(f, arg) => {
                let arg = self.module_arg(arg)?;
                ModBody::Alias(ModExpr { head: f.clone(), args: vec![arg] })
            }
            StrExpKind::Constrained(inner, a) => {
                let asc = self.ascription(a)?;
                if ascription.is_none() {
                    *ascription = Some(asc);
                }
                self.str_body(name, inner, ascription)?
            }
        })
    }

    /// A functor argument as a module path, lifting anything else.
    fn module_arg(&mut self, e: &StrExp) -> Result<String> {
        if let StrExpKind::Name(id) = &e.kind {
            return Ok(id.to_string());
        }
        let name = self.names.fresh(NameKind::ModuleLift);
        let mut ascription = None;
        let body = self.str_body(&name, e, &mut ascription)?;
        self.lift(Sentence::Module { name: name.clone(), params: Vec::new(), ascription, body });
        Ok(name)
    }

    pub(super) fn signature(&mut self, name: &str, s: &SigExp) -> Result<Sentence> {
        let body = match &s.kind {
            SigExpKind::Name(other) => vec![Sentence::Include(other.clone())],
            SigExpKind::Sig(specs) => {
                self.enter(ScopeKind::Signature, name);
                let mut out = Vec::new();
                let r = specs.iter().try_for_each(|sp| {
                    let ss = self.spec(sp)?;
                    let scope = self.scope();
                    out.append(&mut scope.records);
                    out.append(&mut scope.lifted);
                    out.extend(ss);
                    Ok(())
                });
                self.exit();
                r?;
                out
            }
        };
        Ok(Sentence::ModuleType { name: name.to_string(), body })
    }

    fn spec(&mut self, sp: &Spec) -> Result<Vec<Sentence>> {
        let span = sp.meta.span;
        let mut out = Vec::new();
        match &sp.kind {
            SpecKind::Val(vals) => {
                for (x, t) in vals {
                    let mut vars = Vec::new();
                    ty_vars(t, &mut vars);
                    let mut ty = self.ty(t);
                    if !vars.is_empty() {
                        let binders = vars.iter().map(|a| Binder::implicit(format!("_{a}"), Term::ty())).collect();
                        ty = Term::Forall(binders, Box::new(ty));
                    }
                    out.push(Sentence::Parameter { name: self.ident(x, span)?, ty });
                }
            }
            SpecKind::Type(ts) => {
                for ts in ts {
                    match &ts.def {
                        Some(def) => out.push(self.type_abbrev(&ts.name, &ts.tyvars, def, span)?),
                        None => {
                            let ty = ts.tyvars.iter().fold(Term::ty(), |acc, _| Term::arrow(Term::ty(), acc));
                            out.push(Sentence::Parameter { name: self.ident(&ts.name, span)?, ty });
                        }
                    }
                }
            }
            SpecKind::Datatype(dbs) => out.push(self.datatype(dbs)?),
            SpecKind::Structure(ss) => {
                for (name, sig) in ss {
                    let sig = self.sig_name(sig)?;
                    out.push(Sentence::DeclareModule { name: name.clone(), sig });
                }
            }
            SpecKind::Include(sig) => out.push(Sentence::Include(self.sig_name(sig)?)),
        }
        Ok(out)
    }

    pub(super) fn functor(&mut self, fb: &FunctorBind) -> Result<Sentence> {
        let param_sig = self.sig_name(&fb.param_sig)?;
        let mut ascription = match &fb.result_sig {
            Some(a) => Some(self.ascription(a)?),
            None => None,
        };
        let body = match &fb.body.kind {
            StrExpKind::Struct(decs) => ModBody::Sentences(self.body(ScopeKind::Functor, &fb.name, decs)?),
            _ => {
                self.enter(ScopeKind::Functor, &fb.name);
                let r = self.str_body(&fb.name, &fb.body, &mut ascription);
                self.exit();
                r?
            }
        };
        Ok(Sentence::Module { name: fb.name.clone(), params: vec![(fb.param.clone(), param_sig)], ascription, body })
    }
}
