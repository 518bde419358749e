//! Source text to Coq text: parse, elaborate, evaluate (as a gate),
//! translate, check, emit.

use crate::diag::{render, Error, Span, Stage, Warning};
use crate::elab::elaborate;
use crate::emit::{emit, EmitConfig};
use crate::eval::{evaluate, EvalOutcome, DEFAULT_FUEL};
use crate::frontend::parse_source;
use crate::gallina::{record_fields, well_formed, Sentence};
use crate::shims::{external_names, validate_shims};
use crate::translate::translate;

#[derive(Clone, Debug)]
pub struct Options {
    /// Run the evaluation gate.
    pub eval: bool,
    pub fuel: u64,
    pub emit: EmitConfig,
}

impl Default for Options {
    fn default() -> Self {
        Options { eval: true, fuel: DEFAULT_FUEL, emit: EmitConfig::default() }
    }
}

#[derive(Clone, Debug)]
pub struct Output {
    pub text: String,
    pub sentences: Vec<Sentence>,
    pub warnings: Vec<Warning>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Failure {
    /// Lexing, parsing or elaboration rejected the program.
    Static(Error),
    /// Evaluation hit a match failure, ran out of fuel or got stuck.
    Eval(EvalOutcome),
    Unsupported(Error),
    /// The translation produced sentences that fail the structural checks.
    IllFormed(Vec<String>),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Static(_) => 1,
            Failure::Eval(_) => 2,
            Failure::Unsupported(_) => 3,
            Failure::IllFormed(_) => 4,
        }
    }

    pub fn stage(&self) -> Stage {
        match self {
            Failure::Static(e) | Failure::Unsupported(e) => e.stage(),
            Failure::Eval(_) => Stage::Evaluate,
            Failure::IllFormed(_) => Stage::Emit,
        }
    }

    /// Diagnostic lines, `file:line:col: stage: message`.
    pub fn render(&self, file: &str, source: &str) -> Vec<String> {
        let line = |span: Span, msg: &str| render(file, source, span, &format!("{}: {msg}", self.stage()));
        match self {
            Failure::Static(e) | Failure::Unsupported(e) => vec![line(e.span(), &e.to_string())],
            Failure::Eval(EvalOutcome::BindFailure { span, message }) => {
                vec![line(*span, &format!("bind failure: {message}"))]
            }
            Failure::Eval(EvalOutcome::Stuck { span, message }) => {
                vec![line(*span, &format!("evaluation stuck: {message}"))]
            }
            Failure::Eval(_) => {
                vec![format!("{file}: {}: fuel exhausted; the program may not terminate", self.stage())]
            }
            Failure::IllFormed(ms) => ms.iter().map(|m| format!("{file}: {}: {m}", self.stage())).collect(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_unsupported() {
            Failure::Unsupported(e)
        } else if matches!(e, Error::Internal { .. }) {
            Failure::IllFormed(vec![e.to_string()])
        } else {
            Failure::Static(e)
        }
    }
}

pub fn compile(source: &str, opts: &Options) -> Result<Output, Failure> {
    let (program, infix) = parse_source(source)?;
    let elab = elaborate(&program, &infix)?;
    if opts.eval {
        let outcome = evaluate(&elab, opts.fuel);
        if !outcome.is_ok() {
            return Err(Failure::Eval(outcome));
        }
    }
    let translation = translate(&elab)?;
    let sentences = translation.sentences;
    let records = record_fields(&sentences);
    let problems: Vec<String> = sentences.iter().flat_map(|s| well_formed(s, &records)).collect();
    if !problems.is_empty() {
        return Err(Failure::IllFormed(problems));
    }
    let mut warnings = elab.warnings.clone();
    warnings.extend(translation.warnings);
    for m in validate_shims(&external_names(&sentences)) {
        warnings.push(Warning { span: Span::default(), stage: Stage::Emit, message: m });
    }
    let text = emit(&sentences, &opts.emit);
    Ok(Output { text, sentences, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(src: &str) -> i32 {
        compile(src, &Options::default()).map_or_else(|f| f.exit_code(), |_| 0)
    }

    #[test]
    fn exit_codes() {
        assert_eq!(code("fun f x = x + 1\nval y = f 2"), 0);
        assert_eq!(code("val x = "), 1);
        assert_eq!(code("val x = 1 + \"a\""), 1);
        assert_eq!(code("val x :: l = []"), 2);
        assert_eq!(code("fun loop x = loop x\nval y = loop 0"), 2);
        assert_eq!(code("val x = raise Fail \"x\""), 3);
    }

    #[test]
    fn skipping_eval_keeps_text() {
        let src = "fun hd (x :: _) = x\nval a = hd [1]";
        let on = compile(src, &Options::default()).unwrap();
        let off = compile(src, &Options { eval: false, ..Options::default() }).unwrap();
        assert_eq!(on.text, off.text);
        let bad = "val x :: l = []";
        assert!(compile(bad, &Options { eval: false, ..Options::default() }).is_ok());
    }

    #[test]
    fn basis_names_need_no_warnings() {
        let out = compile(
            "val a = List.hd [1, 2]\nval b = map (fn x => x * 2) [a]\nval c = Int.toString (size \"ab\") ^ \"!\"",
            &Options::default(),
        );
        let out = out.map_err(|f| f.render("t", "")).unwrap();
        assert!(out.warnings.iter().all(|w| w.stage != Stage::Emit), "{:?}", out.warnings);
    }

    #[test]
    fn diagnostics_name_the_stage() {
        let src = "val x :: l = []";
        let f = compile(src, &Options::default()).unwrap_err();
        let lines = f.render("t.sml", src);
        assert!(lines[0].starts_with("t.sml:1:") && lines[0].contains("evaluate: bind failure"), "{lines:?}");
    }
}
