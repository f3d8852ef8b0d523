//! Pratt parser for the coefficient expression language.
//!
//! Binding, tightest first: unary minus, `^` (right-associative), `*` `/`,
//! then `+` `-`. Unary minus binding tighter than `^` means `-z^2` is
//! `(-z)^2`.

use thiserror::Error;

use super::ast::{Ast, BinaryOp, Builtin, UnaryOp};
use super::lexer::{Token, TokenKind};

/// Trees deeper than this are rejected so evaluation and drop never
/// recurse unboundedly.
pub const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {position}: expected {expected}")]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: usize,
}

fn infix_power(kind: TokenKind) -> Option<(BinaryOp, u8, u8)> {
    match kind {
        TokenKind::Plus => Some((BinaryOp::Add, 1, 2)),
        TokenKind::Minus => Some((BinaryOp::Sub, 1, 2)),
        TokenKind::Star => Some((BinaryOp::Mul, 3, 4)),
        TokenKind::Slash => Some((BinaryOp::Div, 3, 4)),
        TokenKind::Caret => Some((BinaryOp::Pow, 6, 5)),
        _ => None,
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.position)
    }

    fn err<T>(&self, expected: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.here(),
            expected: expected.into(),
        })
    }

    fn check_depth(&self, depth: usize) -> Result<(), ParseError> {
        if depth > MAX_DEPTH {
            return self.err(format!("expression nested at most {MAX_DEPTH} deep"));
        }
        Ok(())
    }

    fn expect(&mut self, kind: TokenKind) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t.kind == kind => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(kind.to_string()),
        }
    }

    /// Returns the node together with its depth.
    fn expr(&mut self, min_bp: u8, nest: usize) -> Result<(Ast, usize), ParseError> {
        let (mut lhs, mut depth) = self.prefix(nest)?;
        while let Some(tok) = self.peek() {
            let Some((op, l_bp, r_bp)) = infix_power(tok.kind) else {
                break;
            };
            if l_bp < min_bp {
                break;
            }
            self.pos += 1;
            let (rhs, rd) = self.expr(r_bp, nest + 1)?;
            depth = 1 + depth.max(rd);
            self.check_depth(depth)?;
            lhs = Ast::bin(op, lhs, rhs);
        }
        Ok((lhs, depth))
    }

    fn prefix(&mut self, nest: usize) -> Result<(Ast, usize), ParseError> {
        self.check_depth(nest)?;
        let Some(tok) = self.peek() else {
            return self.err("number, `z`, `-`, `(` or function call");
        };
        match tok.kind {
            TokenKind::Number => {
                let v: f64 = match tok.lexeme.parse() {
                    Ok(v) => v,
                    Err(_) => return self.err("numeric literal"),
                };
                if !v.is_finite() {
                    return self.err("finite numeric literal");
                }
                self.pos += 1;
                Ok((Ast::Literal(v), 1))
            }
            TokenKind::Minus => {
                self.pos += 1;
                let (a, d) = self.prefix(nest + 1)?;
                Ok((Ast::Unary(UnaryOp::Neg, Box::new(a)), d + 1))
            }
            TokenKind::LParen => {
                self.pos += 1;
                let inner = self.expr(0, nest + 1)?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            TokenKind::Ident => {
                let is_call = matches!(
                    self.tokens.get(self.pos + 1),
                    Some(t) if t.kind == TokenKind::LParen
                );
                if !is_call {
                    if tok.lexeme == "z" {
                        self.pos += 1;
                        return Ok((Ast::Var, 1));
                    }
                    return self.err("the index variable `z`");
                }
                let Some(f) = Builtin::lookup(&tok.lexeme) else {
                    return self.err("one of spow, pow, exp, ln");
                };
                self.pos += 2;
                let mut args = Vec::new();
                let mut depth = 1;
                if !matches!(self.peek(), Some(t) if t.kind == TokenKind::RParen) {
                    loop {
                        let (a, d) = self.expr(0, nest + 1)?;
                        depth = depth.max(d + 1);
                        args.push(a);
                        match self.peek() {
                            Some(t) if t.kind == TokenKind::Comma => self.pos += 1,
                            _ => break,
                        }
                    }
                }
                if args.len() != f.arity() {
                    return self.err(format!(
                        "{} argument(s) to {}, found {}",
                        f.arity(),
                        f.name(),
                        args.len()
                    ));
                }
                self.expect(TokenKind::RParen)?;
                Ok((Ast::Call(f, args), depth))
            }
            _ => self.err("number, `z`, `-`, `(` or function call"),
        }
    }
}

/// Parses a complete token stream.
pub fn parse(tokens: &[Token]) -> Result<Ast, ParseError> {
    let end = tokens
        .last()
        .map_or(0, |t| t.position + t.lexeme.chars().count());
    let mut p = Parser {
        tokens,
        pos: 0,
        end,
    };
    let (ast, _) = p.expr(0, 0)?;
    if p.pos != tokens.len() {
        return p.err("operator or end of input");
    }
    Ok(ast)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::lexer::tokenize;

    fn sx(s: &str) -> String {
        parse(&tokenize(s).unwrap()).unwrap().to_sexpr()
    }

    fn perr(s: &str) -> ParseError {
        parse(&tokenize(s).unwrap()).unwrap_err()
    }

    #[test]
    fn precedence() {
        assert_eq!(sx("2*z+1"), "(+ (* 2 z) 1)");
        assert_eq!(sx("1+2*z"), "(+ 1 (* 2 z))");
        assert_eq!(sx("1-2-3"), "(- (- 1 2) 3)");
        assert_eq!(sx("8/4/2"), "(/ (/ 8 4) 2)");
        assert_eq!(sx("2^3^2"), "(^ 2 (^ 3 2))");
    }

    #[test]
    fn unary_minus_binds_tighter_than_caret() {
        assert_eq!(sx("-z^2"), "(^ (neg z) 2)");
        assert_eq!(sx("2^-1"), "(^ 2 (neg 1))");
        assert_eq!(sx("--z"), "(neg (neg z))");
        assert_eq!(sx("-z*2"), "(* (neg z) 2)");
    }

    #[test]
    fn calls() {
        assert_eq!(sx("spow(z, 5, 3)"), "(spow z 5 3)");
        assert_eq!(sx("pow(z+1, 0.5)"), "(pow (+ z 1) 0.5)");
        assert_eq!(perr("spow(z, 5)").position, 9);
        assert!(perr("sin(z)").expected.contains("spow"));
    }

    #[test]
    fn malformed() {
        assert_eq!(perr("2*").position, 2);
        assert_eq!(perr("(z+1").position, 4);
        assert_eq!(perr("z z").position, 2);
        assert_eq!(perr("y+1").position, 0);
        assert_eq!(perr("").position, 0);
        assert_eq!(perr(")").position, 0);
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let s = "(".repeat(10_000) + "z" + &")".repeat(10_000);
        assert!(perr(&s).expected.contains("nested"));
        let s = "-".repeat(10_000) + "z";
        assert!(perr(&s).expected.contains("nested"));
        let s = vec!["z"; 5_000].join("+");
        assert!(perr(&s).expected.contains("nested"));
        let s = vec!["z"; 100].join("+");
        assert_eq!(parse(&tokenize(&s).unwrap()).unwrap().depth(), 100);
    }
}
