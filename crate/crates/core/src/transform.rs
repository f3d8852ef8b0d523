//! Comparison with a canonical linear equation
//!
//! ```text
//! Δ(r̃(ζ) Δx(ζ−1)) + q̃(ζ) x(ζ−σ) = 0
//! r̃(ζ) = θ(ζ) θ(ζ+1) r^{1/α}(ζ)
//! q̃(ζ) = (1/α) θ(ζ+1) θ^{α−1}(ζ) θ(ζ−σ+1) q(ζ)
//! ```
//!
//! built from a delay-plus-one equation with `α ≥ 1` and finite θ.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::criteria::{series_verdict, CriteriaError, CriterionId, CriterionOptions, CriterionVerdict, Step};
use crate::equation::{DelayForm, HalfLinearEquation, ModelError};
use crate::exponent::real_ratio_pow;
use crate::sequence::{SeqError, Sequence};
use crate::tail::{theta, TailConfig, TailError, ThetaTable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("the transform needs the delay-plus-one form")]
    WrongForm,
    #[error("the transform needs alpha >= 1, got {0}")]
    AlphaBelowOne(String),
    #[error("θ is not certified finite; register a closed form or use the estimated variant")]
    Uncertified,
    #[error("empty index range {from}..={to}")]
    EmptyRange { from: i64, to: i64 },
    #[error("at index {index}: {source}")]
    Eval { index: i64, source: SeqError },
    #[error(transparent)]
    Tail(#[from] TailError),
}

#[derive(Debug, Clone)]
pub struct CanonicalEquation {
    pub r_tilde: Sequence,
    pub q_tilde: Sequence,
    pub sigma: u32,
    pub zeta0: i64,
    /// Whether the θ behind the coefficients is certified.
    pub theta_certified: bool,
}

impl CanonicalEquation {
    pub fn new(r_tilde: Sequence, q_tilde: Sequence, sigma: u32, zeta0: i64) -> Self {
        Self {
            r_tilde,
            q_tilde,
            sigma,
            zeta0,
            theta_certified: true,
        }
    }
}

/// θ lookup shared by the derived coefficients: the precomputed table first,
/// then the closed form or a fresh tail evaluation past its top.
struct ThetaSource {
    eq: HalfLinearEquation,
    table: ThetaTable,
    cfg: TailConfig,
}

impl ThetaSource {
    fn at(&self, z: i64) -> Result<f64, SeqError> {
        if let Some(v) = self.table.get(z) {
            return Ok(v);
        }
        let undefined = |e: TailError| SeqError::Undefined {
            index: z,
            message: e.to_string(),
        };
        if z <= self.table.range().1 {
            return Err(undefined(self.table.at(z).unwrap_err()));
        }
        theta(&self.eq, z, &self.cfg).map(|t| t.value).map_err(undefined)
    }
}

fn check_preconditions(eq: &HalfLinearEquation) -> Result<(), TransformError> {
    if eq.delay_form != DelayForm::MinusSigmaPlusOne {
        return Err(TransformError::WrongForm);
    }
    if !eq.alpha.is_at_least_one() {
        return Err(TransformError::AlphaBelowOne(eq.alpha.to_string()));
    }
    Ok(())
}

/// Builds the canonical comparison equation. θ must be certified finite,
/// either by a registered closed form or by a geometric tail certificate.
pub fn to_canonical(eq: &HalfLinearEquation, cfg: &TailConfig) -> Result<CanonicalEquation, TransformError> {
    build(eq, cfg, true)
}

/// Like [`to_canonical`] but accepts an uncertified numeric θ; the result
/// records `theta_certified = false`.
pub fn to_canonical_estimated(
    eq: &HalfLinearEquation,
    cfg: &TailConfig,
) -> Result<CanonicalEquation, TransformError> {
    build(eq, cfg, false)
}

fn build(eq: &HalfLinearEquation, cfg: &TailConfig, strict: bool) -> Result<CanonicalEquation, TransformError> {
    check_preconditions(eq)?;
    let lo = eq.first_solution_index();
    let hi = eq.zeta0 + cfg.table_span as i64;
    let table = ThetaTable::build(eq, lo, hi, cfg)?;
    let certified = table.certified();
    if strict && !certified {
        return Err(TransformError::Uncertified);
    }
    let src = Arc::new(ThetaSource {
        eq: eq.clone(),
        table,
        cfg: *cfg,
    });
    let model = |index: i64| {
        move |e: ModelError| match e {
            ModelError::Seq(s) => s,
            other => SeqError::Undefined {
                index,
                message: other.to_string(),
            },
        }
    };

    let s = Arc::clone(&src);
    let r_tilde = Sequence::closed_form("θ(ζ)θ(ζ+1)r^{1/α}(ζ)", move |z| {
        let root = s.eq.r_root(z).map_err(model(z))?;
        Ok(s.at(z)? * s.at(z + 1)? * root)
    })
    .with_domain_start(lo);

    let s = Arc::clone(&src);
    let (m, n) = (eq.alpha.num() as i64, eq.alpha.den());
    let inv_alpha = n as f64 / m as f64;
    let shift = eq.sigma as i64 - 1;
    let q_tilde = Sequence::closed_form("(1/α)θ(ζ+1)θ^{α−1}(ζ)θ(ζ−σ+1)q(ζ)", move |z| {
        let q = s.eq.q_at(z).map_err(model(z))?;
        let factor = inv_alpha * s.at(z + 1)? * real_ratio_pow(s.at(z)?, m - n as i64, n) * s.at(z - shift)?;
        Ok(factor * q)
    })
    .with_domain_start(lo);

    Ok(CanonicalEquation {
        r_tilde,
        q_tilde,
        sigma: eq.sigma,
        zeta0: eq.zeta0,
        theta_certified: certified,
    })
}

/// Maximum over `ζ ∈ [from, to]` of
/// `|r̃(ζ+1)(x(ζ+1)−x(ζ)) − r̃(ζ)(x(ζ)−x(ζ−1)) + q̃(ζ)x(ζ−σ)|`.
pub fn canonical_residual(
    ceq: &CanonicalEquation,
    candidate: &Sequence,
    from: i64,
    to: i64,
) -> Result<f64, TransformError> {
    if to < from {
        return Err(TransformError::EmptyRange { from, to });
    }
    let ev = |s: &Sequence, i: i64| s.eval(i).map_err(|source| TransformError::Eval { index: i, source });
    let sigma = ceq.sigma as i64;
    let mut worst: f64 = 0.0;
    for z in from..=to {
        let x = |i| ev(candidate, i);
        let upper = ev(&ceq.r_tilde, z + 1)? * (x(z + 1)? - x(z)?);
        let lower = ev(&ceq.r_tilde, z)? * (x(z)? - x(z - 1)?);
        let res = upper - lower + ev(&ceq.q_tilde, z)? * x(z - sigma)?;
        worst = worst.max(res.abs());
    }
    Ok(worst)
}

/// `Σ q̃(ζ) = ∞`. Indices where q̃ cannot be formed are skipped and flagged.
pub fn crit_canonical_sumq(
    ceq: &CanonicalEquation,
    opts: &CriterionOptions,
) -> Result<CriterionVerdict, CriteriaError> {
    let start = opts.start.unwrap_or(ceq.zeta0);
    if opts.horizon <= start {
        return Err(CriteriaError::Horizon {
            start,
            horizon: opts.horizon,
        });
    }
    let mut notes = Vec::new();
    if !ceq.theta_certified {
        notes.push("q̃ built from an uncertified numeric θ".into());
    }
    series_verdict(CriterionId::CanonicalSumQ, start, opts, notes, |z| {
        Ok(match ceq.q_tilde.eval(z) {
            Ok(t) => Step::Term { term: t, running: None },
            Err(e) => Step::Skip(format!("q̃({z}) skipped: {e}")),
        })
    })
}

/// Summary row for reports: sampled `r̃` and `q̃` values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientSample {
    pub zeta: i64,
    pub r_tilde: Option<f64>,
    pub q_tilde: Option<f64>,
}

pub fn sample_coefficients(ceq: &CanonicalEquation, from: i64, to: i64) -> Vec<CoefficientSample> {
    (from..=to)
        .map(|z| CoefficientSample {
            zeta: z,
            r_tilde: ceq.r_tilde.eval(z).ok(),
            q_tilde: ceq.q_tilde.eval(z).ok(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::VerdictStatus;
    use crate::exponent::RationalExponent;

    fn example3(with_theta: bool) -> HalfLinearEquation {
        let e = HalfLinearEquation::new(
            Sequence::parse("(z*(z+1))^(5/3)").unwrap(),
            Sequence::parse("4*(z^2-1)*z^(2/3)/3").unwrap(),
            "5/3".parse().unwrap(),
            2,
            DelayForm::MinusSigmaPlusOne,
            1,
        )
        .unwrap();
        if with_theta {
            e.with_theta_closed_form(Sequence::parse("1/z").unwrap())
        } else {
            e
        }
    }

    #[test]
    fn example_three_coefficients() {
        let c = to_canonical(&example3(true), &TailConfig::default()).unwrap();
        for z in 1..=100 {
            assert!((c.r_tilde.eval(z).unwrap() - 1.0).abs() <= 1e-12, "{z}");
        }
        for z in 2..=100 {
            assert!((c.q_tilde.eval(z).unwrap() - 0.8).abs() <= 1e-9, "{z}");
        }
        // θ(0) would need r(0) = 0
        assert!(c.q_tilde.eval(1).is_err());
    }

    #[test]
    fn numeric_theta_is_rejected_then_estimated() {
        let e = example3(false);
        assert_eq!(
            to_canonical(&e, &TailConfig::default()).unwrap_err(),
            TransformError::Uncertified
        );
        let c = to_canonical_estimated(&e, &TailConfig::default()).unwrap();
        assert!(!c.theta_certified);
        for z in 1..=100 {
            assert!((c.r_tilde.eval(z).unwrap() - 1.0).abs() <= 1e-8, "{z}");
        }
    }

    #[test]
    fn linear_case() {
        // α = 1, σ = 1, r = ζ(ζ+1): θ = 1/ζ, r̃ ≡ 1, q̃ = q/(ζ(ζ+1))
        let e = HalfLinearEquation::new(
            Sequence::parse("z*(z+1)").unwrap(),
            Sequence::parse("z^2+3").unwrap(),
            RationalExponent::ONE,
            1,
            DelayForm::MinusSigmaPlusOne,
            1,
        )
        .unwrap()
        .with_theta_closed_form(Sequence::parse("1/z").unwrap());
        let c = to_canonical(&e, &TailConfig::default()).unwrap();
        for z in 1..=50i64 {
            let zf = z as f64;
            assert!((c.r_tilde.eval(z).unwrap() - 1.0).abs() < 1e-14);
            let want = (zf * zf + 3.0) / (zf * (zf + 1.0));
            assert!((c.q_tilde.eval(z).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn preconditions() {
        let mut e = example3(true);
        e.delay_form = DelayForm::MinusSigma;
        assert_eq!(to_canonical(&e, &TailConfig::default()).unwrap_err(), TransformError::WrongForm);
        let mut e = example3(true);
        e.alpha = "1/3".parse().unwrap();
        assert!(matches!(
            to_canonical(&e, &TailConfig::default()),
            Err(TransformError::AlphaBelowOne(_))
        ));
    }

    fn constant_ceq(q: f64) -> CanonicalEquation {
        CanonicalEquation::new(Sequence::constant(1.0), Sequence::constant(q), 2, 1)
    }

    #[test]
    fn residual_of_alternating_solution() {
        let alt = Sequence::parse("(-1)^z").unwrap();
        assert!(canonical_residual(&constant_ceq(4.0), &alt, 3, 100).unwrap() <= 1e-12);
        let r = canonical_residual(&constant_ceq(0.8), &alt, 3, 100).unwrap();
        assert!((r - 3.2).abs() < 1e-12);
        let c = Sequence::constant(2.5);
        assert_eq!(canonical_residual(&constant_ceq(0.0), &c, 3, 10).unwrap(), 0.0);
    }

    #[test]
    fn sum_q_verdicts() {
        let o = CriterionOptions::default();
        for q in [4.0, 0.8] {
            let v = crit_canonical_sumq(&constant_ceq(q), &o).unwrap();
            assert_eq!(v.status, VerdictStatus::CertifiedHolds);
        }
        let geo = CanonicalEquation::new(Sequence::constant(1.0), Sequence::parse("2^(-z)").unwrap(), 2, 1);
        let v = crit_canonical_sumq(&geo, &o).unwrap();
        assert_eq!(v.status, VerdictStatus::NumericallyFails);
    }

    #[test]
    fn example_three_sum_skips_first_index() {
        let c = to_canonical(&example3(true), &TailConfig::default()).unwrap();
        let v = crit_canonical_sumq(&c, &CriterionOptions::default()).unwrap();
        assert_eq!(v.status, VerdictStatus::CertifiedHolds);
        assert!(v.notes.iter().any(|n| n.starts_with("q̃(1) skipped")));
    }
}
