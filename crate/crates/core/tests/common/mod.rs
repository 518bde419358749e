#![allow(dead_code)]

pub mod patgen;
pub mod progen;

use std::fs;
use std::path::{Path, PathBuf};

use sml2gallina::elab::elaborate;
use sml2gallina::emit::{normalize_names, EmitConfig};
use sml2gallina::eval::{evaluate, EvalOutcome};
use sml2gallina::frontend::parse_source;
use sml2gallina::pipeline::{compile, Options};

/// Test data lives with the core crate; other crates reach over to it.
pub fn data_dir(sub: &str) -> PathBuf {
    let here = Path::new(env!("CARGO_MANIFEST_DIR"));
    let root = if here.join("tests/data").is_dir() { here.to_path_buf() } else { here.join("../core") };
    root.join("tests/data").join(sub)
}

/// `(stem, source)` for every `.sml` file in a data directory, sorted.
pub fn sources(sub: &str) -> Vec<(String, String)> {
    let mut out: Vec<_> = fs::read_dir(data_dir(sub))
        .expect("data directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "sml"))
        .map(|p| {
            let stem = p.file_stem().unwrap().to_string_lossy().into_owned();
            (stem, fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

pub fn read(sub: &str, file: &str) -> String {
    fs::read_to_string(data_dir(sub).join(file)).unwrap_or_else(|e| panic!("{sub}/{file}: {e}"))
}

pub fn run(src: &str, fuel: u64) -> EvalOutcome {
    let (prog, infix) = parse_source(src).expect("parses");
    let elab = elaborate(&prog, &infix).expect("elaborates");
    evaluate(&elab, fuel)
}

/// `name = value` lines, as stored next to each corpus program.
pub fn expected_bindings(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (k, v) = l.split_once(" = ").unwrap_or_else(|| panic!("bad expectation line {l:?}"));
            (k.to_string(), v.to_string())
        })
        .collect()
}

/// Split Coq text into tokens, dropping comments. Punctuation is split per
/// character so layout differences like `x1:` / `x1 :` vanish.
pub fn coq_tokens(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let word = |c: char| c.is_alphanumeric() || c == '_' || c == '\'' || c == '.';
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '(' && chars.get(i + 1) == Some(&'*') {
            let mut depth = 0;
            while i < chars.len() {
                if chars[i] == '(' && chars.get(i + 1) == Some(&'*') {
                    depth += 1;
                    i += 2;
                } else if chars[i] == '*' && chars.get(i + 1) == Some(&')') {
                    depth -= 1;
                    i += 2;
                    if depth == 0 {
                        break;
                    }
                } else {
                    i += 1;
                }
            }
        } else if c == '"' {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i] != '"' {
                i += 1;
            }
            i += 1;
            out.push(chars[start..i.min(chars.len())].iter().collect());
        } else if word(c) {
            let start = i;
            while i < chars.len() && word(chars[i]) {
                i += 1;
            }
            // A sentence-final period is punctuation, not part of the word.
            let mut w: String = chars[start..i].iter().collect();
            let mut dots = 0;
            while w.ends_with('.') {
                w.pop();
                dots += 1;
            }
            if !w.is_empty() {
                out.push(w);
            }
            out.extend(std::iter::repeat_n(".".to_string(), dots));
        } else {
            out.push(c.to_string());
            i += 1;
        }
    }
    out
}

/// Translation used for golden comparison: no header, normalized names.
pub fn golden_translation(src: &str) -> Result<String, String> {
    let emit = EmitConfig { header: false, normalize_names: true, ..EmitConfig::default() };
    compile(src, &Options { emit, ..Options::default() })
        .map(|o| o.text)
        .map_err(|f| f.render("golden", src).join("\n"))
}

/// Number of `(*[ ... *) ... (*]*)` completion regions in a golden file.
pub fn completion_marks(golden: &str) -> Result<usize, String> {
    let opens = golden.matches("(*[").count();
    let closes = golden.matches("(*]*)").count();
    if opens == closes {
        Ok(opens)
    } else {
        Err(format!("{opens} opening and {closes} closing completion markers"))
    }
}

/// Compare the translation of `golden/<stem>.sml` with `golden/<stem>.v`
/// token by token, ignoring comments and layout.
pub fn golden_mismatch(stem: &str) -> Result<(), String> {
    let src = read("golden", &format!("{stem}.sml"));
    let golden = read("golden", &format!("{stem}.v"));
    completion_marks(&golden)?;
    let want = coq_tokens(&normalize_names(&golden));
    let got = coq_tokens(&golden_translation(&src)?);
    if want == got {
        return Ok(());
    }
    let at = want.iter().zip(&got).take_while(|(a, b)| a == b).count();
    Err(format!(
        "{stem}: first difference at token {at}: golden {:?}, output {:?}",
        &want[at..(at + 8).min(want.len())],
        &got[at..(at + 8).min(got.len())]
    ))
}
