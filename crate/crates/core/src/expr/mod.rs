//! Arithmetic expressions over the index variable `z`.
//!
//! Coefficient sequences such as `r(z) = (z*(z+1))^(5/3)` are written in this
//! language inside configuration files and on the command line.
//!
//! Note that unary minus binds tighter than `^`: `-z^2` means `(-z)^2`.

mod ast;
mod eval;
mod lexer;
mod parser;

pub use ast::{Ast, BinaryOp, Builtin, UnaryOp};
pub use eval::{eval_at, EvalError};
pub use lexer::{tokenize, LexError, Token, TokenKind};
pub use parser::{parse, ParseError, MAX_DEPTH};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl ExprError {
    pub fn position(&self) -> usize {
        match self {
            ExprError::Lex(e) => e.position,
            ExprError::Parse(e) => e.position,
        }
    }
}

pub fn parse_expr(input: &str) -> Result<Ast, ExprError> {
    Ok(parse(&tokenize(input)?)?)
}
