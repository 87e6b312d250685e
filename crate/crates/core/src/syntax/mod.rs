//! Parsing, pretty-printing and INCLUDE expansion.

pub mod ast;
mod include;
mod parser;
mod printer;

use thiserror::Error;

pub use include::{resolve_includes, Resolved};
pub use parser::{parse_expr, parse_type, parse_unit, ParseError};
pub use printer::{print_expr, print_type, print_unit, type_text};

use crate::diag::{codes, Diagnostic};
use crate::lexer::{tokenize, LexError};
use crate::source::{FileId, Loc};

/// Anything that stops the front end before semantic analysis.
#[derive(Debug, Clone, Error)]
pub enum FrontError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{message}")]
    Include { loc: Loc, message: String },
}

impl FrontError {
    pub fn to_diagnostic(&self) -> Diagnostic {
        match self {
            FrontError::Lex(e) => Diagnostic::error(codes::LEX, e.loc, e.to_string()),
            FrontError::Parse(e) => Diagnostic::error(e.code, e.loc, e.to_string()),
            FrontError::Include { loc, message } => {
                Diagnostic::error(codes::INCLUDE, *loc, message.clone())
            }
        }
    }
}

/// Tokenizes and parses one file.
pub fn parse_source(text: &str, file: FileId) -> Result<ast::Unit, FrontError> {
    let tokens = tokenize(text, file)?;
    Ok(parse_unit(&tokens)?)
}
