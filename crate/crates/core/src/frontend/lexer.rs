use crate::diag::{Error, Result, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TokenKind {
    /// Alphanumeric identifier, possibly qualified (`List.hd`), or a type
    /// variable (`'a`).
    Ident,
    SymbolicId,
    Keyword,
    IntLit,
    RealLit,
    StringLit,
    CharLit,
    /// `(!!`
    ContractOpen,
    /// `!!)`
    ContractClose,
    Punct,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }
}

pub const KEYWORDS: &[&str] = &[
    "abstype",
    "and",
    "andalso",
    "as",
    "case",
    "datatype",
    "do",
    "else",
    "end",
    "eqtype",
    "exception",
    "fn",
    "fun",
    "functor",
    "handle",
    "if",
    "in",
    "include",
    "infix",
    "infixr",
    "let",
    "local",
    "nonfix",
    "of",
    "op",
    "open",
    "orelse",
    "raise",
    "rec",
    "sharing",
    "sig",
    "signature",
    "struct",
    "structure",
    "then",
    "type",
    "val",
    "where",
    "while",
    "with",
    "withtype",
    "REQUIRES",
    "ENSURES",
];

const RESERVED_SYMBOLS: &[&str] = &[":", "|", "=>", "->", "#", ":>"];

fn is_symbolic(c: char) -> bool {
    "!%&$#+-/:<=>?@\\~`^|*".contains(c)
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    tokens: Vec<Token>,
}

/// Split SML source into tokens, dropping whitespace and (nested) comments.
pub fn tokenize(source: &str) -> Result<Vec<Token>> {
    let mut lx = Lexer { src: source, bytes: source.as_bytes(), pos: 0, tokens: Vec::new() };
    lx.run()?;
    Ok(lx.tokens)
}

impl<'a> Lexer<'a> {
    fn peek(&self, off: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(off)
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s)
    }

    fn push(&mut self, kind: TokenKind, start: usize) {
        self.tokens.push(Token { kind, text: self.src[start..self.pos].to_string(), span: Span::new(start, self.pos) });
    }

    fn err<T>(&self, start: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Lex { span: Span::new(start, self.pos.max(start + 1)), message: msg.into() })
    }

    fn run(&mut self) -> Result<()> {
        while let Some(c) = self.peek(0) {
            let start = self.pos;
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else if self.starts_with("(*") {
                self.comment()?;
            } else if self.starts_with("(!!") {
                self.pos += 3;
                self.push(TokenKind::ContractOpen, start);
            } else if self.starts_with("!!)") {
                self.pos += 3;
                self.push(TokenKind::ContractClose, start);
            } else if self.starts_with("...") {
                self.pos += 3;
                self.push(TokenKind::Punct, start);
            } else if "()[]{},;".contains(c) {
                self.pos += 1;
                self.push(TokenKind::Punct, start);
            } else if c == '_' {
                self.pos += 1;
                if self.peek(0).is_some_and(is_ident_char) {
                    return self.err(start, "identifiers may not start with `_`");
                }
                self.push(TokenKind::Punct, start);
            } else if c == '"' {
                self.string()?;
                self.push(TokenKind::StringLit, start);
            } else if c == '#' && self.peek(1) == Some('"') {
                self.pos += 1;
                let s = self.string()?;
                if s.chars().count() != 1 {
                    return self.err(start, "character literal must contain exactly one character");
                }
                self.push(TokenKind::CharLit, start);
            } else if c.is_ascii_digit() || (c == '~' && self.peek(1).is_some_and(|d| d.is_ascii_digit())) {
                self.number(start)?;
            } else if c == '\'' {
                self.pos += 1;
                while self.peek(0).is_some_and(is_ident_char) {
                    self.pos += 1;
                }
                if self.pos - start == 1 {
                    return self.err(start, "empty type variable");
                }
                self.push(TokenKind::Ident, start);
            } else if is_ident_start(c) {
                self.ident(start);
            } else if is_symbolic(c) {
                while let Some(d) = self.peek(0) {
                    if !is_symbolic(d) || self.starts_with("!!)") && self.pos > start {
                        break;
                    }
                    self.pos += 1;
                }
                let text = &self.src[start..self.pos];
                let kind = if RESERVED_SYMBOLS.contains(&text) { TokenKind::Punct } else { TokenKind::SymbolicId };
                self.push(kind, start);
            } else {
                self.pos += c.len_utf8();
                return self.err(start, format!("unexpected character `{c}`"));
            }
        }
        Ok(())
    }

    fn ident(&mut self, start: usize) {
        loop {
            while self.peek(0).is_some_and(is_ident_char) {
                self.pos += 1;
            }
            // long identifier: `Structure.name` or `Structure.+`
            if self.peek(0) == Some('.') {
                match self.peek(1) {
                    Some(d) if is_ident_start(d) => {
                        self.pos += 1;
                        continue;
                    }
                    Some(d) if is_symbolic(d) && !self.src[self.pos + 1..].starts_with("!!)") => {
                        self.pos += 1;
                        while self.peek(0).is_some_and(is_symbolic) {
                            self.pos += 1;
                        }
                    }
                    _ => {}
                }
            }
            break;
        }
        let text = &self.src[start..self.pos];
        let kind = if KEYWORDS.contains(&text) { TokenKind::Keyword } else { TokenKind::Ident };
        self.push(kind, start);
    }

    fn number(&mut self, start: usize) -> Result<()> {
        if self.peek(0) == Some('~') {
            self.pos += 1;
        }
        if self.starts_with("0w") {
            self.pos += 2;
            return self.err(start, "word literals are not supported");
        }
        if self.starts_with("0x") && self.peek(2).is_some_and(|c| c.is_ascii_hexdigit()) {
            self.pos += 2;
            while self.peek(0).is_some_and(|c| c.is_ascii_hexdigit()) {
                self.pos += 1;
            }
            self.push(TokenKind::IntLit, start);
            return Ok(());
        }
        self.digits();
        let mut real = false;
        if self.peek(0) == Some('.') && self.peek(1).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
            self.digits();
            real = true;
        }
        if matches!(self.peek(0), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if self.peek(0) == Some('~') {
                self.pos += 1;
            }
            if self.peek(0).is_some_and(|c| c.is_ascii_digit()) {
                self.digits();
                real = true;
            } else {
                self.pos = save;
            }
        }
        self.push(if real { TokenKind::RealLit } else { TokenKind::IntLit }, start);
        Ok(())
    }

    fn digits(&mut self) {
        while self.peek(0).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
    }

    fn comment(&mut self) -> Result<()> {
        let start = self.pos;
        let mut depth = 0usize;
        while self.pos < self.bytes.len() {
            if self.starts_with("(*") {
                depth += 1;
                self.pos += 2;
            } else if self.starts_with("*)") {
                depth -= 1;
                self.pos += 2;
                if depth == 0 {
                    return Ok(());
                }
            } else {
                self.pos += self.peek(0).map_or(1, char::len_utf8);
            }
        }
        self.err(start, "unterminated comment")
    }

    /// Consumes a string literal at `pos` (which must be `"`) and returns its
    /// decoded contents.
    fn string(&mut self) -> Result<String> {
        let start = self.pos;
        self.pos += 1;
        let mut out = String::new();
        loop {
            let Some(c) = self.peek(0) else {
                return self.err(start, "unterminated string literal");
            };
            match c {
                '"' => {
                    self.pos += 1;
                    return Ok(out);
                }
                '\n' => return self.err(start, "newline in string literal"),
                '\\' => {
                    self.pos += 1;
                    let Some(e) = self.peek(0) else {
                        return self.err(start, "unterminated string literal");
                    };
                    self.pos += e.len_utf8();
                    match e {
                        'n' => out.push('\n'),
                        't' => out.push('\t'),
                        'a' => out.push('\x07'),
                        'b' => out.push('\x08'),
                        'v' => out.push('\x0b'),
                        'f' => out.push('\x0c'),
                        'r' => out.push('\r'),
                        '\\' => out.push('\\'),
                        '"' => out.push('"'),
                        '^' => {
                            let Some(k) = self.peek(0) else {
                                return self.err(start, "bad control escape");
                            };
                            self.pos += 1;
                            out.push(char::from((k as u8).wrapping_sub(64)));
                        }
                        d if d.is_ascii_digit() => {
                            let digits = &self.src[self.pos - 1..];
                            if digits.len() < 3 || !digits[..3].bytes().all(|b| b.is_ascii_digit()) {
                                return self.err(start, "malformed \\ddd escape");
                            }
                            let code: u32 = digits[..3].parse().unwrap_or(0);
                            self.pos += 2;
                            match char::from_u32(code) {
                                Some(ch) if code < 256 => out.push(ch),
                                _ => return self.err(start, "character code out of range"),
                            }
                        }
                        'u' => {
                            let hex = self.src.get(self.pos..self.pos + 4).unwrap_or("");
                            let code = u32::from_str_radix(hex, 16);
                            match code.ok().and_then(char::from_u32) {
                                Some(ch) if hex.len() == 4 => {
                                    self.pos += 4;
                                    out.push(ch)
                                }
                                _ => return self.err(start, "malformed \\u escape"),
                            }
                        }
                        w if w.is_whitespace() => {
                            // formatting gap `\  ...  \`
                            while self.peek(0).is_some_and(char::is_whitespace) {
                                self.pos += self.peek(0).map_or(1, char::len_utf8);
                            }
                            if self.peek(0) != Some('\\') {
                                return self.err(start, "unterminated string gap");
                            }
                            self.pos += 1;
                        }
                        _ => return self.err(start, format!("unknown escape `\\{e}`")),
                    }
                }
                _ => {
                    out.push(c);
                    self.pos += c.len_utf8();
                }
            }
        }
    }
}

/// Decode the contents of a string or character literal token.
pub fn decode_literal(text: &str) -> String {
    let body = text.strip_prefix('#').unwrap_or(text);
    let mut lx = Lexer { src: body, bytes: body.as_bytes(), pos: 0, tokens: Vec::new() };
    lx.string().unwrap_or_default()
}

/// Parse an integer literal token (`~12`, `0x1F`, `~0xA`).
pub fn int_value(text: &str) -> Option<i64> {
    let (neg, digits) = match text.strip_prefix('~') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let magnitude = match digits.strip_prefix("0x") {
        Some(hex) => i64::from_str_radix(hex, 16).ok()?,
        None => digits.parse::<i64>().ok()?,
    };
    Some(if neg { -magnitude } else { magnitude })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src).unwrap().into_iter().map(|t| (t.kind, t.text)).collect()
    }

    #[test]
    fn minimal_declaration() {
        use TokenKind::*;
        assert_eq!(
            kinds("val x = 1"),
            vec![(Keyword, "val".into()), (Ident, "x".into()), (SymbolicId, "=".into()), (IntLit, "1".into())]
        );
    }

    #[test]
    fn contract_delimiters_are_atomic() {
        let toks = tokenize("(!! f x ==> y; REQUIRES: true; ENSURES: true; !!)").unwrap();
        assert_eq!(toks.first().unwrap().kind, TokenKind::ContractOpen);
        assert_eq!(toks.last().unwrap().kind, TokenKind::ContractClose);
        assert!(toks.iter().any(|t| t.is(TokenKind::SymbolicId, "==>")));
        assert!(toks.iter().any(|t| t.is(TokenKind::Keyword, "REQUIRES")));
    }

    #[test]
    fn comments_are_skipped() {
        let toks = tokenize("val (* c *) x").unwrap();
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[1].text, "x");
        assert_eq!(tokenize("(* a (* nested *) b *) x").unwrap().len(), 1);
    }

    #[test]
    fn unterminated_comment_reports_offset() {
        let err = tokenize("val x = 1 (* oops").unwrap_err();
        assert_eq!(err.span().start, 10);
    }

    #[test]
    fn unterminated_string_is_an_error() {
        assert!(matches!(tokenize("\"abc"), Err(Error::Lex { .. })));
    }

    #[test]
    fn literals() {
        use TokenKind::*;
        assert_eq!(
            kinds(r#"~3 1.5 2e10 #"a" "b\n" 0xFF"#),
            vec![
                (IntLit, "~3".into()),
                (RealLit, "1.5".into()),
                (RealLit, "2e10".into()),
                (CharLit, "#\"a\"".into()),
                (StringLit, "\"b\\n\"".into()),
                (IntLit, "0xFF".into()),
            ]
        );
        assert_eq!(decode_literal("\"b\\n\\065\""), "b\nA");
        assert_eq!(int_value("~0x10"), Some(-16));
    }

    #[test]
    fn long_identifiers_and_punctuation() {
        use TokenKind::*;
        assert_eq!(
            kinds("List.hd (x::l) => {a=1,...}"),
            vec![
                (Ident, "List.hd".into()),
                (Punct, "(".into()),
                (Ident, "x".into()),
                (SymbolicId, "::".into()),
                (Ident, "l".into()),
                (Punct, ")".into()),
                (Punct, "=>".into()),
                (Punct, "{".into()),
                (Ident, "a".into()),
                (SymbolicId, "=".into()),
                (IntLit, "1".into()),
                (Punct, ",".into()),
                (Punct, "...".into()),
                (Punct, "}".into()),
            ]
        );
    }
}
