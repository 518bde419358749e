//! Lexing and parsing of the SML subset with contract annotations.

pub mod ast;
pub mod infix;
pub mod lexer;
pub mod parser;
pub mod printer;

pub use ast::*;
pub use infix::InfixEnv;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse;

use crate::diag::Result;

/// Tokenize and parse a whole source text.
pub fn parse_source(source: &str) -> Result<(Program, InfixEnv)> {
    parse(&tokenize(source)?)
}
