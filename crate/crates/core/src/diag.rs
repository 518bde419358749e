//! Source spans, pipeline errors and warnings.

use std::fmt;

/// Half-open byte range into the source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

/// Pipeline stage that produced a diagnostic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Lex,
    Parse,
    Elaborate,
    Evaluate,
    Translate,
    Emit,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Lex => "lex",
            Stage::Parse => "parse",
            Stage::Elaborate => "elaborate",
            Stage::Evaluate => "evaluate",
            Stage::Translate => "translate",
            Stage::Emit => "emit",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("lexical error: {message}")]
    Lex { span: Span, message: String },
    #[error("syntax error: {message}")]
    Syntax { span: Span, message: String },
    #[error("unsupported construct: {message}")]
    Unsupported { span: Span, stage: Stage, message: String },
    #[error("type error: {message}")]
    Type { span: Span, message: String },
    #[error("unbound {kind} `{name}`")]
    Unbound { span: Span, kind: &'static str, name: String },
    #[error("contract error: {message}")]
    Contract { span: Span, message: String },
    #[error("ill-formed output: {message}")]
    Internal { span: Span, message: String },
}

impl Error {
    pub fn span(&self) -> Span {
        match self {
            Error::Lex { span, .. }
            | Error::Syntax { span, .. }
            | Error::Unsupported { span, .. }
            | Error::Type { span, .. }
            | Error::Unbound { span, .. }
            | Error::Contract { span, .. }
            | Error::Internal { span, .. } => *span,
        }
    }

    pub fn stage(&self) -> Stage {
        match self {
            Error::Lex { .. } => Stage::Lex,
            Error::Syntax { .. } => Stage::Parse,
            Error::Unsupported { stage, .. } => *stage,
            Error::Type { .. } | Error::Unbound { .. } | Error::Contract { .. } => Stage::Elaborate,
            Error::Internal { .. } => Stage::Emit,
        }
    }

    pub fn is_unsupported(&self) -> bool {
        matches!(self, Error::Unsupported { .. })
    }

    pub fn syntax(span: Span, message: impl Into<String>) -> Self {
        Error::Syntax { span, message: message.into() }
    }

    pub fn ty(span: Span, message: impl Into<String>) -> Self {
        Error::Type { span, message: message.into() }
    }

    pub fn unsupported(span: Span, stage: Stage, message: impl Into<String>) -> Self {
        Error::Unsupported { span, stage, message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Non-fatal finding reported on the error stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub span: Span,
    pub stage: Stage,
    pub message: String,
}

/// 1-based line and column of a byte offset.
pub fn line_col(source: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(source.len());
    let before = &source[..offset];
    let line = before.matches('\n').count() + 1;
    let col = match before.rfind('\n') {
        Some(nl) => before[nl + 1..].chars().count() + 1,
        None => before.chars().count() + 1,
    };
    (line, col)
}

/// `file:line:col: message`
pub fn render(file: &str, source: &str, span: Span, message: &str) -> String {
    let (line, col) = line_col(source, span.start);
    format!("{file}:{line}:{col}: {message}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_col_counts_from_one() {
        let src = "val x = 1\nval y = z";
        assert_eq!(line_col(src, 0), (1, 1));
        assert_eq!(line_col(src, 18), (2, 9));
    }

    #[test]
    fn rendered_diagnostic_has_file_prefix() {
        let src = "a\nbc";
        assert_eq!(render("t.sml", src, Span::new(3, 4), "boom"), "t.sml:2:2: boom");
    }
}
