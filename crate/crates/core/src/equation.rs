//! The equation model
//!
//! ```text
//! Δ(r(ζ)(Δx(ζ))^α) + q(ζ) x^α(d(ζ)) = 0,   ζ ≥ ζ₀
//! ```
//!
//! with `d(ζ) = ζ − σ` (delay form) or `d(ζ) = ζ − σ + 1` (delay-plus-one
//! form, which needs `σ ≥ 1`).

use serde::Serialize;
use thiserror::Error;

use crate::exponent::{signed_pow, RangeError, RationalExponent};
use crate::sequence::{SeqError, Sequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayForm {
    /// `x^α(ζ − σ)`
    MinusSigma,
    /// `x^α(ζ − σ + 1)`
    MinusSigmaPlusOne,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("the delay-plus-one form needs sigma >= 1")]
    SigmaTooSmall,
    #[error("r({index}) = {value} is not positive")]
    NonPositiveR { index: i64, value: f64 },
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Range(#[from] RangeError),
}

impl ModelError {
    pub fn index(&self) -> Option<i64> {
        match self {
            ModelError::NonPositiveR { index, .. } => Some(*index),
            ModelError::Seq(e) => Some(e.index()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HalfLinearEquation {
    pub r: Sequence,
    pub q: Sequence,
    pub alpha: RationalExponent,
    pub sigma: u32,
    pub delay_form: DelayForm,
    pub zeta0: i64,
    /// Registered closed form for the tail sum θ, if one is known.
    pub theta_closed_form: Option<Sequence>,
}

impl HalfLinearEquation {
    pub fn new(
        r: Sequence,
        q: Sequence,
        alpha: RationalExponent,
        sigma: u32,
        delay_form: DelayForm,
        zeta0: i64,
    ) -> Result<Self, ModelError> {
        if delay_form == DelayForm::MinusSigmaPlusOne && sigma == 0 {
            return Err(ModelError::SigmaTooSmall);
        }
        Ok(Self {
            r,
            q,
            alpha,
            sigma,
            delay_form,
            zeta0,
            theta_closed_form: None,
        })
    }

    pub fn with_theta_closed_form(mut self, theta: Sequence) -> Self {
        self.theta_closed_form = Some(theta);
        self
    }

    /// Index at which the forcing term samples the solution.
    pub fn delayed_index(&self, zeta: i64) -> i64 {
        match self.delay_form {
            DelayForm::MinusSigma => zeta - self.sigma as i64,
            DelayForm::MinusSigmaPlusOne => zeta - self.sigma as i64 + 1,
        }
    }

    /// First index at which a solution must be defined.
    pub fn first_solution_index(&self) -> i64 {
        self.zeta0 - self.sigma as i64
    }

    pub fn r_at(&self, s: i64) -> Result<f64, ModelError> {
        let v = self.r.eval(s)?;
        if v <= 0.0 {
            return Err(ModelError::NonPositiveR { index: s, value: v });
        }
        Ok(v)
    }

    /// `r^{1/α}(s)`.
    pub fn r_root(&self, s: i64) -> Result<f64, ModelError> {
        Ok(signed_pow(self.r_at(s)?, self.alpha.recip())?)
    }

    /// The tail-sum summand `1 / r^{1/α}(s)`. When `r^{1/α}` overflows the
    /// summand underflows to zero.
    pub fn inv_r_root(&self, s: i64) -> Result<f64, ModelError> {
        let r = self.r_at(s)?;
        match signed_pow(r, self.alpha.recip()) {
            Ok(root) if root > 0.0 => Ok(1.0 / root),
            Ok(_) => Err(ModelError::NonPositiveR { index: s, value: r }),
            Err(_) => Ok(0.0),
        }
    }

    pub fn q_at(&self, s: i64) -> Result<f64, ModelError> {
        Ok(self.q.eval(s)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Hypothesis {
    /// `r` is positive.
    H1,
    /// `q` is non-negative and not identically zero.
    H2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    NotPositive { value: f64 },
    Negative { value: f64 },
    Unevaluable { message: String },
    IdenticallyZero,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub hypothesis: Hypothesis,
    /// First offending index; absent for `IdenticallyZero`.
    pub index: Option<i64>,
    #[serde(flatten)]
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub from: i64,
    pub horizon: i64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// Violations that make coefficient-based criteria meaningless. A `q`
    /// that merely vanishes on the horizon does not count: the criteria then
    /// report a failing verdict on their own.
    pub fn blocks_criteria(&self) -> bool {
        self.violations
            .iter()
            .any(|v| !matches!(v.kind, ViolationKind::IdenticallyZero))
    }
}

/// Samples `r` and `q` on `[ζ₀, horizon]` and reports the first index at
/// which each hypothesis fails.
pub fn validate(eq: &HalfLinearEquation, horizon: i64) -> ValidationReport {
    let mut violations = Vec::new();

    for z in eq.zeta0..=horizon {
        let kind = match eq.r.eval(z) {
            Ok(v) if v > 0.0 => continue,
            Ok(v) => ViolationKind::NotPositive { value: v },
            Err(e) => ViolationKind::Unevaluable {
                message: e.to_string(),
            },
        };
        violations.push(Violation {
            hypothesis: Hypothesis::H1,
            index: Some(z),
            kind,
        });
        break;
    }

    let mut any_positive = false;
    for z in eq.zeta0..=horizon {
        let kind = match eq.q.eval(z) {
            Ok(v) if v >= 0.0 => {
                any_positive |= v > 0.0;
                continue;
            }
            Ok(v) => ViolationKind::Negative { value: v },
            Err(e) => ViolationKind::Unevaluable {
                message: e.to_string(),
            },
        };
        violations.push(Violation {
            hypothesis: Hypothesis::H2,
            index: Some(z),
            kind,
        });
        break;
    }
    if !any_positive && violations.iter().all(|v| v.hypothesis != Hypothesis::H2) {
        violations.push(Violation {
            hypothesis: Hypothesis::H2,
            index: None,
            kind: ViolationKind::IdenticallyZero,
        });
    }

    ValidationReport {
        from: eq.zeta0,
        horizon,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq(r: &str, q: &str, zeta0: i64) -> HalfLinearEquation {
        HalfLinearEquation::new(
            Sequence::parse(r).unwrap(),
            Sequence::parse(q).unwrap(),
            RationalExponent::ONE,
            1,
            DelayForm::MinusSigma,
            zeta0,
        )
        .unwrap()
    }

    #[test]
    fn example_one_is_clean() {
        let e = HalfLinearEquation::new(
            Sequence::parse("2^(z/3)").unwrap(),
            Sequence::parse("2*2^z").unwrap(),
            "1/3".parse().unwrap(),
            1,
            DelayForm::MinusSigma,
            1,
        )
        .unwrap();
        assert!(validate(&e, 100).is_clean());
    }

    #[test]
    fn zero_q_violates_h2() {
        let rep = validate(&eq("1", "0", 0), 100);
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].hypothesis, Hypothesis::H2);
        assert_eq!(rep.violations[0].kind, ViolationKind::IdenticallyZero);
        assert!(!rep.blocks_criteria());
    }

    #[test]
    fn first_non_positive_r() {
        let rep = validate(&eq("10-z", "1", 1), 20);
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].hypothesis, Hypothesis::H1);
        assert_eq!(rep.violations[0].index, Some(10));
        // z - 10 is already negative at the start index
        let rep = validate(&eq("z-10", "1", 1), 20);
        assert_eq!(rep.violations[0].index, Some(1));
        assert!(rep.blocks_criteria());
    }

    #[test]
    fn negative_q_reported_once() {
        let rep = validate(&eq("1", "z-3", 1), 20);
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].index, Some(1));
        assert_eq!(
            rep.violations[0].kind,
            ViolationKind::Negative { value: -2.0 }
        );
    }

    #[test]
    fn delay_plus_one_needs_sigma() {
        let err = HalfLinearEquation::new(
            Sequence::constant(1.0),
            Sequence::constant(1.0),
            RationalExponent::ONE,
            0,
            DelayForm::MinusSigmaPlusOne,
            0,
        )
        .unwrap_err();
        assert_eq!(err, ModelError::SigmaTooSmall);
    }
}
