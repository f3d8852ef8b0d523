use thiserror::Error;

use super::ast::{Ast, BinaryOp, Builtin, UnaryOp};
use crate::exponent::{gcd, signed_pow, RationalExponent};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("result is not finite")]
    NonFinite,
}

/// Integer value of a literal (possibly negated) exponent, if it is one.
fn literal_int(a: &Ast) -> Option<i64> {
    match a {
        Ast::Literal(v) if v.fract() == 0.0 && v.abs() < 1e15 => Some(*v as i64),
        Ast::Unary(UnaryOp::Neg, inner) => literal_int(inner).map(|n| -n),
        _ => None,
    }
}

/// Recognises `m/n` with odd integer literals, returning the signed reduced
/// numerator and denominator.
fn odd_literal_ratio(a: &Ast) -> Option<(i64, i64)> {
    if let Some(n) = literal_int(a) {
        return Some((n, 1));
    }
    let Ast::Binary(BinaryOp::Div, num, den) = a else {
        return None;
    };
    let (m, n) = (literal_int(num)?, literal_int(den)?);
    if m % 2 == 0 || n % 2 == 0 {
        return None;
    }
    let g = gcd(m.unsigned_abs(), n.unsigned_abs()) as i64;
    let (m, n) = (m / g, n / g);
    Some(if n < 0 { (-m, -n) } else { (m, n) })
}

fn odd_pow(x: f64, m: i64, n: i64) -> Result<f64, EvalError> {
    let range = |_| EvalError::NonFinite;
    let (mu, nu) = (m.unsigned_abs(), n.unsigned_abs());
    if mu > u32::MAX as u64 || nu > u32::MAX as u64 {
        return Err(EvalError::Domain("exponent too large".into()));
    }
    if m == 0 {
        return Ok(1.0);
    }
    let e = RationalExponent::new(mu as u32, nu as u32)
        .map_err(|e| EvalError::Domain(e.to_string()))?;
    let p = signed_pow(x, e).map_err(range)?;
    if m < 0 {
        if p == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        Ok(1.0 / p)
    } else {
        Ok(p)
    }
}

/// Real power for a non-literal exponent: a negative base needs an
/// integer-valued exponent.
fn general_pow(b: f64, e: f64) -> Result<f64, EvalError> {
    if b < 0.0 && e.fract() == 0.0 && e.abs() < 9.0e15 {
        return integer_pow(b, e as i64);
    }
    if b > 0.0 {
        Ok(b.powf(e))
    } else if b == 0.0 {
        if e > 0.0 {
            Ok(0.0)
        } else if e == 0.0 {
            Ok(1.0)
        } else {
            Err(EvalError::DivisionByZero)
        }
    } else {
        Err(EvalError::Domain(format!(
            "negative base {b} with non-odd-ratio exponent {e}"
        )))
    }
}

fn integer_pow(b: f64, n: i64) -> Result<f64, EvalError> {
    if b == 0.0 && n < 0 {
        return Err(EvalError::DivisionByZero);
    }
    if n.unsigned_abs() <= i32::MAX as u64 {
        Ok(b.powi(n as i32))
    } else {
        Ok(b.powf(n as f64))
    }
}

fn eval(ast: &Ast, z: f64) -> Result<f64, EvalError> {
    match ast {
        Ast::Literal(v) => Ok(*v),
        Ast::Var => Ok(z),
        Ast::Unary(UnaryOp::Neg, a) => Ok(-eval(a, z)?),
        Ast::Binary(op, l, r) => {
            let a = eval(l, z)?;
            match op {
                BinaryOp::Add => Ok(a + eval(r, z)?),
                BinaryOp::Sub => Ok(a - eval(r, z)?),
                BinaryOp::Mul => Ok(a * eval(r, z)?),
                BinaryOp::Div => {
                    let b = eval(r, z)?;
                    if b == 0.0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    Ok(a / b)
                }
                BinaryOp::Pow => {
                    if let Some(n) = literal_int(r) {
                        return integer_pow(a, n);
                    }
                    if let Some((m, n)) = odd_literal_ratio(r) {
                        return odd_pow(a, m, n);
                    }
                    general_pow(a, eval(r, z)?)
                }
            }
        }
        Ast::Call(f, args) => match f {
            Builtin::Spow => {
                let x = eval(&args[0], z)?;
                let m = eval(&args[1], z)?;
                let n = eval(&args[2], z)?;
                if m.fract() != 0.0 || n.fract() != 0.0 || n <= 0.0 || m.abs() > 1e9 || n > 1e9 {
                    return Err(EvalError::Domain(format!(
                        "spow needs integer exponents, got {m}/{n}"
                    )));
                }
                let (m, n) = (m as i64, n as i64);
                if m % 2 == 0 || n % 2 == 0 {
                    return Err(EvalError::Domain(format!(
                        "spow needs odd exponents, got {m}/{n}"
                    )));
                }
                let g = gcd(m.unsigned_abs(), n as u64) as i64;
                odd_pow(x, m / g, n / g)
            }
            Builtin::Pow => general_pow(eval(&args[0], z)?, eval(&args[1], z)?),
            Builtin::Exp => Ok(eval(&args[0], z)?.exp()),
            Builtin::Ln => {
                let x = eval(&args[0], z)?;
                if x <= 0.0 {
                    return Err(EvalError::Domain(format!("ln of non-positive {x}")));
                }
                Ok(x.ln())
            }
        },
    }
}

/// Evaluates `ast` with `z` bound to `zeta`.
///
/// `^` with an integer literal exponent, or a literal ratio of odd integers,
/// follows sign-preserving power semantics and accepts negative bases. Any
/// other exponent requires a non-negative base.
pub fn eval_at(ast: &Ast, zeta: i64) -> Result<f64, EvalError> {
    let v = eval(ast, zeta as f64)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}
