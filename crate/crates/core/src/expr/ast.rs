use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
        }
    }
}

/// Functions callable from expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// `spow(x, m, n)`: sign-preserving `x^{m/n}` for odd `m`, `n`.
    Spow,
    /// `pow(x, y)`: real power, positive base.
    Pow,
    Exp,
    Ln,
}

impl Builtin {
    pub fn lookup(name: &str) -> Option<Self> {
        match name {
            "spow" => Some(Builtin::Spow),
            "pow" => Some(Builtin::Pow),
            "exp" => Some(Builtin::Exp),
            "ln" => Some(Builtin::Ln),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Spow => "spow",
            Builtin::Pow => "pow",
            Builtin::Exp => "exp",
            Builtin::Ln => "ln",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Builtin::Spow => 3,
            Builtin::Pow => 2,
            Builtin::Exp | Builtin::Ln => 1,
        }
    }
}

/// Expression tree over the single index variable `z`.
#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Literal(f64),
    Var,
    Unary(UnaryOp, Box<Ast>),
    Binary(BinaryOp, Box<Ast>, Box<Ast>),
    Call(Builtin, Vec<Ast>),
}

impl Ast {
    pub fn lit(v: f64) -> Self {
        Ast::Literal(v)
    }

    pub fn neg(a: Ast) -> Self {
        Ast::Unary(UnaryOp::Neg, Box::new(a))
    }

    pub fn bin(op: BinaryOp, l: Ast, r: Ast) -> Self {
        Ast::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn depth(&self) -> usize {
        match self {
            Ast::Literal(_) | Ast::Var => 1,
            Ast::Unary(_, a) => 1 + a.depth(),
            Ast::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
            Ast::Call(_, args) => 1 + args.iter().map(Ast::depth).max().unwrap_or(0),
        }
    }

    /// Prefix form used by the golden parse-tree fixtures, e.g. `(+ (* 2 z) 1)`.
    pub fn to_sexpr(&self) -> String {
        match self {
            Ast::Literal(v) => format!("{v}"),
            Ast::Var => "z".to_string(),
            Ast::Unary(UnaryOp::Neg, a) => format!("(neg {})", a.to_sexpr()),
            Ast::Binary(op, l, r) => {
                format!("({} {} {})", op.symbol(), l.to_sexpr(), r.to_sexpr())
            }
            Ast::Call(f, args) => {
                let mut s = format!("({}", f.name());
                for a in args {
                    s.push(' ');
                    s.push_str(&a.to_sexpr());
                }
                s.push(')');
                s
            }
        }
    }
}

/// Fully parenthesised infix form; re-parses to the same tree.
impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // parsed literals are never negative; `-` is always a Unary node
            Ast::Literal(v) => write!(f, "{v}"),
            Ast::Var => f.write_str("z"),
            Ast::Unary(UnaryOp::Neg, a) => write!(f, "(-{a})"),
            Ast::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Ast::Call(b, args) => {
                write!(f, "{}(", b.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
