use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sml2gallina::diag::{render, Span};
use sml2gallina::emit::EmitConfig;
use sml2gallina::eval::DEFAULT_FUEL;
use sml2gallina::pipeline::{compile, Options};
use sml2gallina::shims;

/// Translate a Standard ML program (with contracts) into Coq using the Equations plugin.
#[derive(Parser, Debug)]
#[command(name = "sml2gallina", version)]
struct Cli {
    /// Input `.sml` file.
    input: PathBuf,

    /// Output `.v` file; standard output when absent.
    #[arg(short = 'o', value_name = "PATH")]
    output: Option<PathBuf>,

    /// Skip the evaluation gate that runs the program before translating it.
    #[arg(long)]
    no_eval: bool,

    /// Evaluation budget, counted in function applications.
    #[arg(long, value_name = "N", default_value_t = DEFAULT_FUEL,
          value_parser = clap::value_parser!(u64).range(1..))]
    fuel: u64,

    /// Omit the `Require Import` header.
    #[arg(long)]
    no_header: bool,

    /// Rename generated identifiers (records, lifted modules, type
    /// variables) by order of appearance. Meant for golden tests.
    #[arg(long)]
    normalize_names: bool,

    /// Also write the support library (.v files) into this directory.
    #[arg(long, value_name = "PATH")]
    shim_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = cli.input.display().to_string();
    let source = match fs::read_to_string(&cli.input) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{file}: {e}");
            return ExitCode::from(1);
        }
    };
    let opts = Options {
        eval: !cli.no_eval,
        fuel: cli.fuel,
        emit: EmitConfig { header: !cli.no_header, normalize_names: cli.normalize_names, ..EmitConfig::default() },
    };
    let out = match compile(&source, &opts) {
        Ok(out) => out,
        Err(f) => {
            for line in f.render(&file, &source) {
                eprintln!("{line}");
            }
            return ExitCode::from(f.exit_code() as u8);
        }
    };
    for w in &out.warnings {
        let msg = format!("warning: {}: {}", w.stage, w.message);
        if w.span == Span::default() {
            eprintln!("{file}: {msg}");
        } else {
            eprintln!("{}", render(&file, &source, w.span, &msg));
        }
    }
    if let Some(dir) = &cli.shim_dir {
        if let Err(e) = shims::install(dir) {
            eprintln!("{}: {e}", dir.display());
            return ExitCode::from(1);
        }
    }
    let written = match &cli.output {
        Some(path) => write_file(path, &out.text),
        None => io::stdout().write_all(out.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("{}: {e}", cli.output.as_ref().map_or("<stdout>".into(), |p| p.display().to_string()));
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}

fn write_file(path: &PathBuf, text: &str) -> io::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, text)
}
