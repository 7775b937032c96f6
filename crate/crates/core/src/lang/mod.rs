//! Front end for the CoIn modelling language and the CI-LTL formula
//! language: lexer, parsers, validation, canonical printing, elaboration.

pub mod ast;
pub mod elaborate;
pub mod lexer;
pub mod parser;
pub mod pretty;

pub use ast::SourceModel;
pub use elaborate::elaborate;
pub use parser::{parse_claim, parse_formula, parse_model};
pub use pretty::to_coin_text;

use lexer::Loc;
use thiserror::Error;

/// Any error from the language front end, located in the source text.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("{loc}: lexical error: {message}")]
    Lex { message: String, loc: Loc },
    #[error("{loc}: syntax error: {message}")]
    Syntax { message: String, loc: Loc },
    #[error("{loc}: invalid model: {message}")]
    Invalid { message: String, loc: Loc },
}

impl ParseError {
    pub fn loc(&self) -> Loc {
        match self {
            ParseError::Lex { loc, .. }
            | ParseError::Syntax { loc, .. }
            | ParseError::Invalid { loc, .. } => *loc,
        }
    }
}
