//! Real sequences indexed by integers.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{eval_at, parse_expr, Ast, EvalError, ExprError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeqError {
    #[error("index {index} is below the domain start {start}")]
    BelowDomain { index: i64, start: i64 },
    #[error("index {index} is past the end of the table")]
    PastTable { index: i64 },
    #[error("at index {index}: {source}")]
    Eval { index: i64, source: EvalError },
    #[error("at index {index}: value is not finite")]
    NonFinite { index: i64 },
    #[error("at index {index}: {message}")]
    Undefined { index: i64, message: String },
}

impl SeqError {
    pub fn index(&self) -> i64 {
        match self {
            SeqError::BelowDomain { index, .. }
            | SeqError::PastTable { index }
            | SeqError::Eval { index, .. }
            | SeqError::NonFinite { index }
            | SeqError::Undefined { index, .. } => *index,
        }
    }
}

pub type Rule = dyn Fn(i64) -> Result<f64, SeqError> + Send + Sync;

#[derive(Clone)]
pub enum SequenceSource {
    Expression { text: String, ast: Arc<Ast> },
    ClosedForm { name: String, rule: Arc<Rule> },
    Table { start: i64, values: Arc<[f64]> },
}

/// A real sequence: expression-backed, a named closed-form rule, or a table.
///
/// Evaluation is pure, so a `Sequence` can be shared freely across threads.
#[derive(Clone)]
pub struct Sequence {
    source: SequenceSource,
    domain_start: i64,
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Sequence")
            .field("source", &self.describe())
            .field("domain_start", &self.domain_start)
            .finish()
    }
}

impl Sequence {
    pub fn parse(text: &str) -> Result<Self, ExprError> {
        Ok(Self::from_ast(text, parse_expr(text)?))
    }

    pub fn from_ast(text: &str, ast: Ast) -> Self {
        Self {
            source: SequenceSource::Expression {
                text: text.to_string(),
                ast: Arc::new(ast),
            },
            domain_start: i64::MIN,
        }
    }

    pub fn closed_form<F>(name: impl Into<String>, rule: F) -> Self
    where
        F: Fn(i64) -> Result<f64, SeqError> + Send + Sync + 'static,
    {
        Self {
            source: SequenceSource::ClosedForm {
                name: name.into(),
                rule: Arc::new(rule),
            },
            domain_start: i64::MIN,
        }
    }

    /// Closed form built from an infallible function.
    pub fn from_fn<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(i64) -> f64 + Send + Sync + 'static,
    {
        Self::closed_form(name, move |z| Ok(f(z)))
    }

    pub fn constant(c: f64) -> Self {
        Self::from_fn(format!("{c}"), move |_| c)
    }

    pub fn table(start: i64, values: Vec<f64>) -> Self {
        Self {
            source: SequenceSource::Table {
                start,
                values: values.into(),
            },
            domain_start: start,
        }
    }

    pub fn with_domain_start(mut self, start: i64) -> Self {
        self.domain_start = start;
        self
    }

    pub fn domain_start(&self) -> i64 {
        self.domain_start
    }

    pub fn source(&self) -> &SequenceSource {
        &self.source
    }

    pub fn describe(&self) -> String {
        match &self.source {
            SequenceSource::Expression { text, .. } => text.clone(),
            SequenceSource::ClosedForm { name, .. } => name.clone(),
            SequenceSource::Table { start, values } => {
                format!("table[{start}..{}]", start + values.len() as i64)
            }
        }
    }

    pub fn eval(&self, index: i64) -> Result<f64, SeqError> {
        if index < self.domain_start {
            return Err(SeqError::BelowDomain {
                index,
                start: self.domain_start,
            });
        }
        let v = match &self.source {
            SequenceSource::Expression { ast, .. } => {
                eval_at(ast, index).map_err(|source| SeqError::Eval { index, source })?
            }
            SequenceSource::ClosedForm { rule, .. } => rule(index)?,
            SequenceSource::Table { start, values } => {
                let off = index - start;
                *usize::try_from(off)
                    .ok()
                    .and_then(|i| values.get(i))
                    .ok_or(SeqError::PastTable { index })?
            }
        };
        if !v.is_finite() {
            return Err(SeqError::NonFinite { index });
        }
        Ok(v)
    }

    /// Pointwise `c·self`.
    pub fn scaled(&self, c: f64) -> Self {
        let inner = self.clone();
        Self {
            source: SequenceSource::ClosedForm {
                name: format!("{c}*({})", self.describe()),
                rule: Arc::new(move |z| Ok(c * inner.eval(z)?)),
            },
            domain_start: self.domain_start,
        }
    }
}
