//! Half-linear delay difference equations
//!
//! ```text
//! Δ(r(ζ)(Δx(ζ))^α) + q(ζ) x^α(ζ − σ) = 0          (delay form)
//! Δ(r(ζ)(Δx(ζ))^α) + q(ζ) x^α(ζ − σ + 1) = 0      (delay-plus-one form)
//! ```
//!
//! in non-canonical form: coefficient models, tail sums, forward simulation,
//! numerical oscillation criteria and the comparison transform to a
//! canonical linear equation.

pub mod config;
pub mod criteria;
pub mod equation;
pub mod exponent;
pub mod expr;
pub mod probe;
pub mod report;
pub mod reproduce;
pub mod run;
pub mod sequence;
pub mod solver;
pub mod tail;
pub mod transform;

pub use criteria::{CriterionId, CriterionOptions, CriterionVerdict, VerdictStatus};
pub use equation::{validate, DelayForm, HalfLinearEquation, ModelError, ValidationReport};
pub use exponent::{signed_pow, RationalExponent};
pub use probe::{divergence_probe, DivergenceAssessment, DivergenceStatus, ProbePolicy};
pub use sequence::{SeqError, Sequence};
pub use tail::{classify_form, r_partial, theta, FormClass, TailConfig, TailError, TailSumResult};
pub use transform::{canonical_residual, crit_canonical_sumq, to_canonical, CanonicalEquation};
