//! The Coq libraries imported by the emitted header, and the check that
//! emitted code only uses names they provide.

use crate::gallina::{ModBody, Pattern, Sentence, Term};
use std::collections::BTreeSet;
use std::io;
use std::path::Path;

pub struct ShimFile {
    pub name: &'static str,
    pub content: &'static str,
}

macro_rules! shim {
    ($name:literal) => {
        ShimFile { name: $name, content: include_str!(concat!("../shims/", $name, ".v")) }
    };
}

/// In header import order.
pub const SHIMS: &[ShimFile] = &[
    shim!("intSml"),
    shim!("listSml"),
    shim!("realSml"),
    shim!("stringSml"),
    shim!("charSml"),
    shim!("boolSml"),
    shim!("optionSml"),
    shim!("listPairSml"),
    shim!("notationsSml"),
];

/// Names every Coq file has without imports.
const PRELUDE: &[&str] = &["Type", "unit", "tt", "eq"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ShimKind {
    Typeclass,
    Instance,
    Notation,
    Function,
    Axiom,
    /// A type, constructor or notation re-exported from the standard library.
    Export,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Provided {
    pub name: String,
    pub kind: ShimKind,
}

fn first_word(s: &str) -> Option<String> {
    let w: String = s.chars().take_while(|c| c.is_alphanumeric() || *c == '_' || *c == '\'').collect();
    (!w.is_empty()).then_some(w)
}

/// Operator of a notation pattern: `"x ^ y"` gives `^`, `"="` gives `=`.
fn notation_op(s: &str) -> Option<String> {
    let quoted = s.trim_start().strip_prefix('"')?;
    let pat = &quoted[..quoted.find('"')?];
    let words: Vec<&str> = pat.split_whitespace().collect();
    match words.as_slice() {
        [op] => Some(op.to_string()),
        [_, op, _] => Some(op.to_string()),
        _ => None,
    }
}

/// Everything a shim file declares, qualified by its module nesting.
pub fn provides(shim: &ShimFile) -> Vec<Provided> {
    let mut out = Vec::new();
    let mut modules: Vec<String> = Vec::new();
    let mut in_class = false;
    let qualify = |modules: &[String], n: String| {
        let mut parts = modules.to_vec();
        parts.push(n);
        parts.join(".")
    };
    for line in shim.content.lines() {
        let l = line.trim().trim_start_matches("#[global]").trim();
        if in_class {
            if l.starts_with('}') {
                in_class = false;
            } else if let Some((field, _)) = l.split_once(':') {
                if let Some(n) = first_word(field.trim()) {
                    out.push(Provided { name: qualify(&modules, n), kind: ShimKind::Function });
                }
            }
            continue;
        }
        if let Some(rest) = l.strip_prefix("(* exports:") {
            for n in rest.trim_end_matches("*)").split_whitespace() {
                out.push(Provided { name: n.to_string(), kind: ShimKind::Export });
            }
            continue;
        }
        let (keyword, rest) = l.split_once(' ').unwrap_or((l, ""));
        let kind = match keyword {
            "Module" => {
                if let Some(n) = first_word(rest) {
                    modules.push(n);
                }
                continue;
            }
            "End" => {
                modules.pop();
                continue;
            }
            "Definition" | "Fixpoint" => ShimKind::Function,
            "Axiom" => ShimKind::Axiom,
            "Class" => {
                in_class = !rest.contains('}');
                ShimKind::Typeclass
            }
            "Instance" => ShimKind::Instance,
            "Infix" | "Notation" => {
                if let Some(op) = notation_op(rest) {
                    out.push(Provided { name: op, kind: ShimKind::Notation });
                }
                continue;
            }
            _ => continue,
        };
        if let Some(n) = first_word(rest) {
            out.push(Provided { name: qualify(&modules, n), kind });
        }
    }
    out
}

/// Shims providing `name`.
pub fn providers(name: &str) -> Vec<&'static str> {
    SHIMS.iter().filter(|s| provides(s).iter().any(|p| p.name == name)).map(|s| s.name).collect()
}

/// Names bound anywhere in the unit, plus module names.
fn bound(ss: &[Sentence], out: &mut BTreeSet<String>) {
    let pattern = |p: &Pattern, out: &mut BTreeSet<String>| out.extend(p.vars());
    for s in ss {
        match s {
            Sentence::Definition { name, binders, .. } => {
                out.insert(name.clone());
                out.extend(binders.iter().map(|b| b.name.clone()));
            }
            Sentence::Equations(fs) => {
                for f in fs {
                    out.insert(f.name.clone());
                    out.extend(f.binders.iter().map(|b| b.name.clone()));
                    for c in &f.clauses {
                        c.pats.iter().for_each(|p| pattern(p, out));
                    }
                }
            }
            Sentence::Inductive(bs) => {
                for b in bs {
                    out.insert(b.name.clone());
                    out.extend(b.params.iter().cloned());
                    out.extend(b.constructors.iter().map(|(c, _)| c.clone()));
                }
            }
            Sentence::Record { name, params, fields } => {
                out.insert(name.clone());
                out.extend(params.iter().cloned());
                out.extend(fields.iter().map(|(f, _)| f.clone()));
            }
            Sentence::Theorem { name, .. } | Sentence::Axiom { name, .. } | Sentence::Parameter { name, .. } => {
                out.insert(name.clone());
            }
            Sentence::Notation { pattern: p, .. } => {
                if let Some(op) = p.split('\'').nth(1) {
                    out.insert(op.to_string());
                }
            }
            Sentence::Module { name, params, body, .. } => {
                out.insert(name.clone());
                out.extend(params.iter().map(|(p, _)| p.clone()));
                if let ModBody::Sentences(inner) = body {
                    bound(inner, out);
                }
            }
            Sentence::ModuleType { name, body } => {
                out.insert(name.clone());
                bound(body, out);
            }
            Sentence::DeclareModule { name, .. } => {
                out.insert(name.clone());
            }
            _ => {}
        }
        s.visit_terms(&mut |t| match t {
            Term::Fun(p, _) | Term::Let(p, _, _) => pattern(p, out),
            Term::Match { branches, .. } => {
                branches.iter().flat_map(|b| &b.pats).for_each(|p| pattern(p, out));
            }
            Term::Forall(bs, _) => out.extend(bs.iter().map(|b| b.name.clone())),
            Term::Exists(vs, _) => out.extend(vs.iter().cloned()),
            _ => {}
        });
    }
}

fn used_in_pattern(p: &Pattern, out: &mut BTreeSet<String>) {
    p.visit(&mut |q| match q {
        Pattern::Con(c, _) => {
            out.insert(c.clone());
        }
        Pattern::Infix(op, ..) => {
            out.insert(op.clone());
        }
        Pattern::List(_) => {
            out.insert("[]".into());
        }
        _ => {}
    });
}

fn used(ss: &[Sentence], out: &mut BTreeSet<String>) {
    for s in ss {
        match s {
            Sentence::Equations(fs) => {
                for c in fs.iter().flat_map(|f| &f.clauses) {
                    c.pats.iter().for_each(|p| used_in_pattern(p, out));
                }
            }
            Sentence::Module { params, ascription, body, .. } => {
                out.extend(params.iter().map(|(_, sig)| sig.clone()));
                out.extend(ascription.iter().cloned());
                match body {
                    ModBody::Sentences(inner) => used(inner, out),
                    ModBody::Alias(m) => {
                        out.insert(m.head.clone());
                        out.extend(m.args.iter().cloned());
                    }
                }
            }
            Sentence::ModuleType { body, .. } => used(body, out),
            Sentence::DeclareModule { sig, .. } | Sentence::Include(sig) => {
                out.insert(sig.clone());
            }
            _ => {}
        }
        s.visit_terms(&mut |t| match t {
            Term::Ident(x) | Term::ExplicitApp(x, _) | Term::Infix(x, ..) => {
                out.insert(x.clone());
            }
            Term::List(_) => {
                out.insert("[]".into());
            }
            Term::BoolAnd(..) => {
                out.insert("&&".into());
            }
            Term::BoolOr(..) => {
                out.insert("||".into());
            }
            Term::Fun(p, _) | Term::Let(p, _, _) => used_in_pattern(p, out),
            Term::Match { branches, .. } => {
                branches.iter().flat_map(|b| &b.pats).for_each(|p| used_in_pattern(p, out));
            }
            _ => {}
        });
    }
}

/// Names the sentences reference but do not define. Type variables and
/// names under a locally defined module are excluded.
pub fn external_names(ss: &[Sentence]) -> BTreeSet<String> {
    let mut local = BTreeSet::new();
    bound(ss, &mut local);
    let mut refs = BTreeSet::new();
    used(ss, &mut refs);
    refs.into_iter()
        .filter(|n| !n.starts_with('_') && !local.contains(n))
        .filter(|n| !n.split_once('.').is_some_and(|(m, _)| local.contains(m)))
        .filter(|n| !PRELUDE.contains(&n.as_str()))
        .collect()
}

/// One diagnostic per name that no shim provides.
pub fn validate_shims(names: &BTreeSet<String>) -> Vec<String> {
    let provided: BTreeSet<String> = SHIMS.iter().flat_map(provides).map(|p| p.name).collect();
    names
        .iter()
        .filter(|n| !provided.contains(*n) && !PRELUDE.contains(&n.as_str()))
        .map(|n| format!("`{n}` is not provided by any shim library"))
        .collect()
}

/// Write every shim as `<name>.v` into `dir`.
pub fn install(dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for s in SHIMS {
        std::fs::write(dir.join(format!("{}.v", s.name)), s.content)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{CoqForm, BASIS, BUILTIN_CONSTRUCTORS};
    use crate::emit::SHIM_MODULES;

    fn one_provider(name: &str) -> &'static str {
        let ps = providers(name);
        assert_eq!(ps.len(), 1, "{name} provided by {ps:?}");
        ps[0]
    }

    #[test]
    fn shims_match_header() {
        let names: Vec<&str> = SHIMS.iter().map(|s| s.name).collect();
        assert_eq!(names, SHIM_MODULES);
    }

    #[test]
    fn every_basis_name_has_exactly_one_provider() {
        for b in BASIS {
            let names: Vec<&str> = match b.coq {
                CoqForm::Infix { notation, prefix } => vec![notation, prefix],
                CoqForm::Binary { curried, pair } => vec![curried, pair],
                CoqForm::Prefix(p) => vec![p],
            };
            for n in names {
                assert_eq!(one_provider(n), b.shim, "{} ({n})", b.sml);
            }
        }
        for (_, coq, shim) in BUILTIN_CONSTRUCTORS {
            assert_eq!(one_provider(coq), *shim, "{coq}");
        }
        for n in ["Z", "string", "char", "real", "bool", "list", "option", "&&", "||", "::"] {
            one_provider(n);
        }
    }

    #[test]
    fn equality_class() {
        let ps = provides(&SHIMS[8]);
        for (n, k) in [
            ("eqInfixes", ShimKind::Typeclass),
            ("eqb", ShimKind::Function),
            ("neq", ShimKind::Function),
            ("=", ShimKind::Notation),
        ] {
            assert!(ps.contains(&Provided { name: n.into(), kind: k }), "{n}");
        }
        assert!(SHIMS[8].content.contains("Infix \"=\" := eqb (at level 70)"));
        for inst in ["eqZ", "eqString", "eqChar", "eqBool", "eqList"] {
            assert!(ps.iter().any(|p| p.name == inst && p.kind == ShimKind::Instance), "{inst}");
        }
    }

    #[test]
    fn list_hd_raises_empty() {
        assert_eq!(one_provider("List.hd"), "listSml");
        assert_eq!(one_provider("EmptyException"), "listSml");
        let src = SHIMS[1].content;
        assert!(src.contains("Axiom EmptyException : forall {a}, a."));
        let hd = &src[src.find("Definition hd").unwrap()..];
        let hd = &hd[..hd.find("end.").unwrap()];
        assert!(hd.contains("[] => EmptyException"));
    }

    #[test]
    fn validation() {
        let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        assert!(validate_shims(&set(&["=", "Z", "list"])).is_empty());
        assert!(validate_shims(&set(&["List.hd"])).is_empty());
        let d = validate_shims(&set(&["Foo.bar", "Z"]));
        assert_eq!(d.len(), 1);
        assert!(d[0].contains("Foo.bar"));
    }

    #[test]
    fn no_string_conversions() {
        assert!(SHIMS.iter().all(|s| !s.content.contains("StringCvt")));
    }
}
