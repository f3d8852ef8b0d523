//! Oscillation criteria evaluated on a finite horizon.
//!
//! Every evaluator produces a [`CriterionVerdict`] with sampled evidence rows.
//! Series criteria feed their terms to [`divergence_probe`]; the limsup
//! criterion compares the trailing-half supremum of its running product
//! against one.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::equation::{validate, DelayForm, HalfLinearEquation, ModelError};
use crate::exponent::{real_ratio_pow, signed_pow};
use crate::probe::{divergence_probe, DivergenceAssessment, DivergenceStatus, ProbeError, ProbePolicy};
use crate::tail::{CompensatedSum, TailConfig, TailError, ThetaTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CriterionId {
    Thm21,
    Thm22A,
    Thm22B,
    Lem21,
    Thm23,
    CanonicalSumQ,
}

impl CriterionId {
    /// The criteria that apply to a non-canonical equation directly.
    pub const EQUATION_CRITERIA: [CriterionId; 5] = [
        CriterionId::Thm21,
        CriterionId::Thm22A,
        CriterionId::Thm22B,
        CriterionId::Lem21,
        CriterionId::Thm23,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CriterionId::Thm21 => "Thm21",
            CriterionId::Thm22A => "Thm22A",
            CriterionId::Thm22B => "Thm22B",
            CriterionId::Lem21 => "Lem21",
            CriterionId::Thm23 => "Thm23",
            CriterionId::CanonicalSumQ => "CanonicalSumQ",
        }
    }

    /// What the criterion concludes when it holds.
    pub fn conclusion(self) -> &'static str {
        match self {
            CriterionId::Thm21 => "every solution oscillates or tends to zero",
            CriterionId::Thm22A | CriterionId::Thm22B | CriterionId::Thm23 => {
                "every solution oscillates"
            }
            CriterionId::Lem21 => "every eventually positive solution is eventually decreasing",
            CriterionId::CanonicalSumQ => {
                "the canonical comparison equation oscillates, hence so does the original equation"
            }
        }
    }
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CriterionId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let all = CriterionId::EQUATION_CRITERIA
            .iter()
            .chain(std::iter::once(&CriterionId::CanonicalSumQ));
        all.copied()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown criterion '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    CertifiedHolds,
    NumericallySuggested,
    NumericallyFails,
    Inconclusive,
}

impl VerdictStatus {
    pub fn holds(self) -> bool {
        matches!(
            self,
            VerdictStatus::CertifiedHolds | VerdictStatus::NumericallySuggested
        )
    }
}

/// One sampled evidence point.
///
/// For series criteria `term` is the series term at `zeta` and `partial_sum`
/// the sum of terms through `zeta`; `running_value` is the inner sum where the
/// term has one (Thm21, Thm22A) and the partial sum otherwise. For Thm23,
/// `term` is `θ^α(ζ)`, `partial_sum` is `Σ_{s=ζ₁}^{ζ−1} q(s)` and
/// `running_value` is their product `v(ζ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvidenceRow {
    pub zeta: i64,
    pub term: f64,
    pub partial_sum: f64,
    pub running_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionVerdict {
    pub criterion: CriterionId,
    pub status: VerdictStatus,
    /// The criterion's conclusion when the status holds, otherwise a short
    /// statement that nothing follows.
    pub conclusion: String,
    pub start: i64,
    pub horizon: i64,
    pub evidence: Vec<EvidenceRow>,
    pub assessment: Option<DivergenceAssessment>,
    pub limsup_estimate: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CriteriaError {
    #[error("{criterion} needs the delay form x(ζ − σ)")]
    WrongForm { criterion: CriterionId },
    #[error("start index {start} precedes ζ₀ = {zeta0}")]
    StartBeforeZeta0 { start: i64, zeta0: i64 },
    #[error("horizon {horizon} must exceed the start index {start}")]
    Horizon { start: i64, horizon: i64 },
    #[error(transparent)]
    Tail(#[from] TailError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error(transparent)]
    Transform(#[from] crate::transform::TransformError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriterionOptions {
    pub horizon: i64,
    /// Overrides ζ₁ (defaults to ζ₀).
    pub start: Option<i64>,
    /// Relative margin above 1 required by the limsup criterion.
    pub limsup_margin: f64,
    pub max_evidence_rows: usize,
    pub probe: ProbePolicy,
    pub tail: TailConfig,
}

pub const DEFAULT_HORIZON: i64 = 200;

impl Default for CriterionOptions {
    fn default() -> Self {
        Self {
            horizon: DEFAULT_HORIZON,
            start: None,
            limsup_margin: 1e-6,
            max_evidence_rows: 512,
            probe: ProbePolicy::default(),
            tail: TailConfig::default(),
        }
    }
}

impl CriterionOptions {
    pub fn with_horizon(horizon: i64) -> Self {
        Self {
            horizon,
            ..Self::default()
        }
    }
}

/// Keeps at most `max` rows by striding, always keeping the last row.
pub(crate) fn sample_rows(rows: Vec<EvidenceRow>, max: usize) -> Vec<EvidenceRow> {
    let max = max.max(2);
    if rows.len() <= max {
        return rows;
    }
    let stride = rows.len().div_ceil(max - 1);
    let last = *rows.last().expect("non-empty");
    let mut out: Vec<EvidenceRow> = rows.into_iter().step_by(stride).collect();
    if out.last() != Some(&last) {
        out.push(last);
    }
    out
}

/// Term generator output at one index.
pub(crate) enum Step {
    Term { term: f64, running: Option<f64> },
    /// Term skipped (e.g. θ unavailable); the note is recorded once.
    Skip(String),
    /// Term not finite: the series is truncated here.
    Overflow,
}

/// Shared series driver: collects terms on `[start, horizon]`, probes them
/// and maps the assessment to a verdict.
pub(crate) fn series_verdict(
    criterion: CriterionId,
    start: i64,
    opts: &CriterionOptions,
    mut notes: Vec<String>,
    mut step: impl FnMut(i64) -> Result<Step, CriteriaError>,
) -> Result<CriterionVerdict, CriteriaError> {
    let mut terms = Vec::new();
    let mut rows = Vec::new();
    let mut acc = CompensatedSum::new();
    for z in start..=opts.horizon {
        match step(z)? {
            Step::Term { term, running } if term.is_finite() => {
                acc.add(term);
                terms.push(term);
                let partial = acc.value();
                rows.push(EvidenceRow {
                    zeta: z,
                    term,
                    partial_sum: partial,
                    running_value: running.unwrap_or(partial),
                });
            }
            Step::Skip(note) => notes.push(note),
            Step::Term { .. } | Step::Overflow => {
                notes.push(format!("terms overflow at ζ = {z}; series truncated there"));
                break;
            }
        }
    }
    let assessment = divergence_probe(&terms, &opts.probe)?;
    let status = match assessment.status {
        DivergenceStatus::Certified {
            direction: crate::probe::Direction::Diverges,
            ..
        } => VerdictStatus::CertifiedHolds,
        DivergenceStatus::DivergesSuggested => VerdictStatus::NumericallySuggested,
        DivergenceStatus::ConvergesSuggested { .. }
        | DivergenceStatus::Certified {
            direction: crate::probe::Direction::Converges,
            ..
        } => VerdictStatus::NumericallyFails,
        DivergenceStatus::Undecided => VerdictStatus::Inconclusive,
    };
    if rows.is_empty() {
        notes.push("no terms could be evaluated".into());
    }
    Ok(CriterionVerdict {
        criterion,
        status,
        conclusion: conclusion_for(criterion, status),
        start,
        horizon: opts.horizon,
        evidence: sample_rows(rows, opts.max_evidence_rows),
        assessment: Some(assessment),
        limsup_estimate: None,
        notes,
    })
}

fn conclusion_for(criterion: CriterionId, status: VerdictStatus) -> String {
    if status.holds() {
        criterion.conclusion().to_string()
    } else {
        "criterion not met on the horizon; no conclusion".to_string()
    }
}

/// Common preamble: resolves ζ₁, checks the horizon and runs validation.
/// Returns `Err(verdict)` when validation blocks evaluation.
fn prepare(
    criterion: CriterionId,
    eq: &HalfLinearEquation,
    opts: &CriterionOptions,
) -> Result<Result<i64, CriterionVerdict>, CriteriaError> {
    let start = opts.start.unwrap_or(eq.zeta0);
    if start < eq.zeta0 {
        return Err(CriteriaError::StartBeforeZeta0 {
            start,
            zeta0: eq.zeta0,
        });
    }
    if opts.horizon <= start {
        return Err(CriteriaError::Horizon {
            start,
            horizon: opts.horizon,
        });
    }
    let report = validate(eq, opts.horizon + 1);
    if report.blocks_criteria() {
        let notes = report
            .violations
            .iter()
            .map(|v| {
                format!(
                    "{:?} violated at {}: {:?}",
                    v.hypothesis,
                    v.index.map_or("-".to_string(), |i| i.to_string()),
                    v.kind
                )
            })
            .collect();
        return Ok(Err(CriterionVerdict {
            criterion,
            status: VerdictStatus::Inconclusive,
            conclusion: "inputs failed validation; no conclusion".into(),
            start,
            horizon: opts.horizon,
            evidence: Vec::new(),
            assessment: None,
            limsup_estimate: None,
            notes,
        }));
    }
    Ok(Ok(start))
}

fn require_delay_form(criterion: CriterionId, eq: &HalfLinearEquation) -> Result<(), CriteriaError> {
    if eq.delay_form != DelayForm::MinusSigma {
        return Err(CriteriaError::WrongForm { criterion });
    }
    Ok(())
}

/// `(S / r(ζ))^{1/α}`, or `None` on overflow.
fn outer_term(eq: &HalfLinearEquation, inner: f64, zeta: i64) -> Result<Option<f64>, CriteriaError> {
    let r = eq.r_at(zeta)?;
    Ok(signed_pow(inner / r, eq.alpha.recip()).ok())
}

/// Series `Σ ((1/r(ζ)) Σ_{s=ζ₁}^{ζ−1} q(s))^{1/α}`.
pub fn crit_thm21(eq: &HalfLinearEquation, opts: &CriterionOptions) -> Result<CriterionVerdict, CriteriaError> {
    let id = CriterionId::Thm21;
    require_delay_form(id, eq)?;
    let start = match prepare(id, eq, opts)? {
        Ok(s) => s,
        Err(v) => return Ok(v),
    };
    let mut inner = CompensatedSum::new();
    series_verdict(id, start, opts, Vec::new(), |z| {
        if z > start {
            inner.add(eq.q_at(z - 1)?);
        }
        let s = inner.value();
        Ok(match outer_term(eq, s, z)? {
            Some(term) => Step::Term {
                term,
                running: Some(s),
            },
            None => Step::Overflow,
        })
    })
}

fn theta_table(
    eq: &HalfLinearEquation,
    lo: i64,
    hi: i64,
    opts: &CriterionOptions,
) -> Result<ThetaTable, CriteriaError> {
    Ok(ThetaTable::build(eq, lo, hi, &opts.tail)?)
}

/// `θ^α` for positive θ.
fn theta_pow_alpha(eq: &HalfLinearEquation, theta: f64) -> f64 {
    real_ratio_pow(theta, eq.alpha.num() as i64, eq.alpha.den())
}

/// Series `Σ ((1/r(ζ)) Σ_{s=ζ₁}^{ζ−1} q(s) θ^α(s−σ))^{1/α}`.
///
/// Summands whose θ(s−σ) cannot be formed are skipped and flagged.
pub fn crit_thm22a(eq: &HalfLinearEquation, opts: &CriterionOptions) -> Result<CriterionVerdict, CriteriaError> {
    let id = CriterionId::Thm22A;
    require_delay_form(id, eq)?;
    let start = match prepare(id, eq, opts)? {
        Ok(s) => s,
        Err(v) => return Ok(v),
    };
    let sigma = eq.sigma as i64;
    let table = theta_table(eq, start - sigma, opts.horizon, opts)?;
    let mut notes = Vec::new();
    if !table.certified() {
        notes.push("θ is a numeric estimate without a certificate".into());
    }
    let mut inner = CompensatedSum::new();
    series_verdict(id, start, opts, notes, |z| {
        let mut skipped = None;
        if z > start {
            let s = z - 1;
            match table.get(s - sigma) {
                Some(th) => inner.add(eq.q_at(s)? * theta_pow_alpha(eq, th)),
                None => {
                    skipped = Some(format!(
                        "inner summand at s = {s} skipped: {}",
                        table.at(s - sigma).unwrap_err()
                    ))
                }
            }
        }
        let s = inner.value();
        if let (Some(note), true) = (skipped, s == 0.0) {
            // nothing accumulated yet: the outer term carries no information
            return Ok(Step::Skip(note));
        }
        Ok(match outer_term(eq, s, z)? {
            Some(term) => Step::Term {
                term,
                running: Some(s),
            },
            None => Step::Overflow,
        })
    })
}

/// Series `Σ q(s) θ^{α+1}(s+1)`.
pub fn crit_thm22b(eq: &HalfLinearEquation, opts: &CriterionOptions) -> Result<CriterionVerdict, CriteriaError> {
    let id = CriterionId::Thm22B;
    require_delay_form(id, eq)?;
    let start = match prepare(id, eq, opts)? {
        Ok(s) => s,
        Err(v) => return Ok(v),
    };
    let table = theta_table(eq, start, opts.horizon + 1, opts)?;
    let mut notes = Vec::new();
    if !table.certified() {
        notes.push("θ is a numeric estimate without a certificate".into());
    }
    let (m, n) = (eq.alpha.num() as i64, eq.alpha.den());
    series_verdict(id, start, opts, notes, |s| {
        let th = table.at(s + 1)?;
        let term = eq.q_at(s)? * real_ratio_pow(th, m + n as i64, n);
        Ok(Step::Term {
            term,
            running: None,
        })
    })
}

/// Series `Σ q(s)`.
pub fn crit_lem21(eq: &HalfLinearEquation, opts: &CriterionOptions) -> Result<CriterionVerdict, CriteriaError> {
    let id = CriterionId::Lem21;
    let start = match prepare(id, eq, opts)? {
        Ok(s) => s,
        Err(v) => return Ok(v),
    };
    series_verdict(id, start, opts, Vec::new(), |s| {
        Ok(Step::Term {
            term: eq.q_at(s)?,
            running: None,
        })
    })
}

/// `limsup v(ζ) > 1` with `v(ζ) = θ^α(ζ) Σ_{s=ζ₁}^{ζ−1} q(s)`, estimated by
/// the supremum of `v` over the trailing half of `[ζ₁, horizon]`.
///
/// A finite sample never certifies a limsup, so the best status is
/// `NumericallySuggested`.
pub fn crit_thm23(eq: &HalfLinearEquation, opts: &CriterionOptions) -> Result<CriterionVerdict, CriteriaError> {
    let id = CriterionId::Thm23;
    let start = match prepare(id, eq, opts)? {
        Ok(s) => s,
        Err(v) => return Ok(v),
    };
    let table = theta_table(eq, start, opts.horizon, opts)?;
    let mut notes = Vec::new();
    if !table.certified() {
        notes.push("θ is a numeric estimate without a certificate".into());
    }
    let mut inner = CompensatedSum::new();
    let mut rows = Vec::new();
    for z in start..=opts.horizon {
        if z > start {
            inner.add(eq.q_at(z - 1)?);
        }
        let factor = theta_pow_alpha(eq, table.at(z)?);
        let s = inner.value();
        let v = factor * s;
        if !v.is_finite() {
            notes.push(format!("v overflows at ζ = {z}; sampling truncated there"));
            break;
        }
        rows.push(EvidenceRow {
            zeta: z,
            term: factor,
            partial_sum: s,
            running_value: v,
        });
    }
    let mid = start + (opts.horizon - start) / 2;
    let estimate = rows
        .iter()
        .filter(|r| r.zeta >= mid)
        .map(|r| r.running_value)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    let status = match estimate {
        Some(e) if e > 1.0 + opts.limsup_margin => VerdictStatus::NumericallySuggested,
        Some(_) => VerdictStatus::NumericallyFails,
        None => {
            notes.push("no values in the trailing half of the horizon".into());
            VerdictStatus::Inconclusive
        }
    };
    if let Some(first) = rows.iter().find(|r| r.running_value > 1.0) {
        notes.push(format!("v first exceeds 1 at ζ = {}", first.zeta));
    }
    Ok(CriterionVerdict {
        criterion: id,
        status,
        conclusion: conclusion_for(id, status),
        start,
        horizon: opts.horizon,
        evidence: sample_rows(rows, opts.max_evidence_rows),
        assessment: None,
        limsup_estimate: estimate,
        notes,
    })
}

/// Dispatches one of the equation-level criteria.
pub fn evaluate(
    criterion: CriterionId,
    eq: &HalfLinearEquation,
    opts: &CriterionOptions,
) -> Result<CriterionVerdict, CriteriaError> {
    match criterion {
        CriterionId::Thm21 => crit_thm21(eq, opts),
        CriterionId::Thm22A => crit_thm22a(eq, opts),
        CriterionId::Thm22B => crit_thm22b(eq, opts),
        CriterionId::Lem21 => crit_lem21(eq, opts),
        CriterionId::Thm23 => crit_thm23(eq, opts),
        CriterionId::CanonicalSumQ => {
            let ceq = crate::transform::to_canonical(eq, &opts.tail)?;
            crate::transform::crit_canonical_sumq(&ceq, opts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::RationalExponent;
    use crate::sequence::Sequence;

    fn example1(lambda0: f64) -> HalfLinearEquation {
        HalfLinearEquation::new(
            Sequence::parse("2^(z/3)").unwrap(),
            Sequence::parse("2^z").unwrap().scaled(lambda0),
            "1/3".parse().unwrap(),
            1,
            DelayForm::MinusSigma,
            1,
        )
        .unwrap()
        .with_theta_closed_form(Sequence::parse("2^(1-z)").unwrap())
    }

    fn example2() -> HalfLinearEquation {
        HalfLinearEquation::new(
            Sequence::parse("(z*(z-1))^(1/3)").unwrap(),
            Sequence::parse("z^(4/3)").unwrap(),
            "1/3".parse().unwrap(),
            1,
            DelayForm::MinusSigma,
            2,
        )
        .unwrap()
        .with_theta_closed_form(Sequence::parse("1/(z-1)").unwrap())
    }

    fn simple(r: &str, q: &str) -> HalfLinearEquation {
        HalfLinearEquation::new(
            Sequence::parse(r).unwrap(),
            Sequence::parse(q).unwrap(),
            RationalExponent::ONE,
            1,
            DelayForm::MinusSigma,
            1,
        )
        .unwrap()
    }

    fn opts() -> CriterionOptions {
        CriterionOptions::default()
    }

    #[test]
    fn thm21_example_one_holds() {
        let v = crit_thm21(&example1(2.0), &opts()).unwrap();
        assert_eq!(v.status, VerdictStatus::CertifiedHolds);
        assert_eq!(v.conclusion, "every solution oscillates or tends to zero");
        // oracle: S(ζ) = λ₀(2^ζ − 2), t = (S · 2^{−ζ/3})³
        let row = v.evidence.iter().find(|r| r.zeta == 5).unwrap();
        let s = 2.0 * (32.0 - 2.0);
        assert!((row.running_value - s).abs() < 1e-12);
        let t = (s * 2f64.powf(-5.0 / 3.0)).powi(3);
        assert!((row.term - t).abs() <= 1e-12 * t);
    }

    #[test]
    fn thm21_any_positive_lambda_holds() {
        for lambda in [0.01, 0.5, 1.0, 3.0] {
            assert!(crit_thm21(&example1(lambda), &opts()).unwrap().status.holds());
        }
    }

    #[test]
    fn zero_q_fails_everywhere() {
        let e = simple("1", "0").with_theta_closed_form(Sequence::constant(1.0));
        for id in CriterionId::EQUATION_CRITERIA {
            let v = evaluate(id, &e, &opts()).unwrap();
            assert_eq!(v.status, VerdictStatus::NumericallyFails, "{id}");
            assert!(!v.evidence.is_empty());
        }
    }

    #[test]
    fn thm22a_example_two_holds() {
        let v = crit_thm22a(&example2(), &opts()).unwrap();
        assert!(v.status.holds(), "{v:?}");
        // oracle: brute-force inner sum of s^{4/3}(s−2)^{−1/3} over s = 3..=9
        let row = v.evidence.iter().find(|r| r.zeta == 10).unwrap();
        let inner: f64 = (3..10)
            .map(|s| (s as f64).powf(4.0 / 3.0) * ((s - 2) as f64).powf(-1.0 / 3.0))
            .sum();
        assert!((row.running_value - inner).abs() < 1e-12 * inner);
        assert!(v.notes.iter().any(|n| n.contains("s = 2")));
    }

    #[test]
    fn thm22a_summable_q_fails() {
        let e = simple("2^z", "2^(-z)").with_theta_closed_form(Sequence::parse("2^(1-z)").unwrap());
        let v = crit_thm22a(&e, &opts()).unwrap();
        assert_eq!(v.status, VerdictStatus::NumericallyFails, "{v:?}");
    }

    #[test]
    fn thm22b_example_two_terms_are_one() {
        let v = crit_thm22b(&example2(), &opts()).unwrap();
        assert_eq!(v.status, VerdictStatus::CertifiedHolds);
        for row in &v.evidence {
            assert!((row.term - 1.0).abs() < 1e-9);
            let n = (row.zeta - 1) as f64;
            assert!((row.partial_sum - n).abs() <= 1e-9 * n);
        }
    }

    #[test]
    fn thm22b_example_one_fails() {
        let v = crit_thm22b(&example1(2.0), &opts()).unwrap();
        assert_eq!(v.status, VerdictStatus::NumericallyFails);
        let row = v.evidence.iter().find(|r| r.zeta == 3).unwrap();
        let want = 2.0 * 2f64.powf(-1.0);
        assert!((row.term - want).abs() < 1e-12);
    }

    #[test]
    fn lem21_cases() {
        assert_eq!(
            crit_lem21(&example1(2.0), &opts()).unwrap().status,
            VerdictStatus::CertifiedHolds
        );
        assert_eq!(
            crit_lem21(&simple("1", "1"), &opts()).unwrap().status,
            VerdictStatus::CertifiedHolds
        );
        assert_eq!(
            crit_lem21(&simple("1", "2^(-z)"), &opts()).unwrap().status,
            VerdictStatus::NumericallyFails
        );
    }

    #[test]
    fn thm23_example_one() {
        let v = crit_thm23(&example1(2.0), &opts()).unwrap();
        assert_eq!(v.status, VerdictStatus::NumericallySuggested);
        let row = v.evidence.iter().find(|r| r.zeta == 3).unwrap();
        assert!((row.running_value - 7.559_526_299_369_239).abs() < 1e-9);
        assert!(v.notes.iter().any(|n| n.contains("ζ = 2")));
        // oscillation is concluded below λ₀ = 1 too
        assert!(crit_thm23(&example1(0.5), &opts()).unwrap().status.holds());
    }

    #[test]
    fn invalid_inputs_give_empty_evidence() {
        let v = crit_lem21(&simple("10-z", "1"), &opts()).unwrap();
        assert_eq!(v.status, VerdictStatus::Inconclusive);
        assert!(v.evidence.is_empty());
    }

    #[test]
    fn form_and_range_errors() {
        let mut e = simple("1", "1");
        e.delay_form = DelayForm::MinusSigmaPlusOne;
        assert!(matches!(crit_thm21(&e, &opts()), Err(CriteriaError::WrongForm { .. })));
        let mut o = opts();
        o.start = Some(0);
        assert!(matches!(
            crit_lem21(&simple("1", "1"), &o),
            Err(CriteriaError::StartBeforeZeta0 { .. })
        ));
    }

    #[test]
    fn canonical_equation_has_no_theta() {
        let e = simple("1", "1");
        assert!(matches!(crit_thm22b(&e, &opts()), Err(CriteriaError::Tail(_))));
    }

    #[test]
    fn sampling_keeps_last_row() {
        let rows: Vec<EvidenceRow> = (0..1000)
            .map(|z| EvidenceRow {
                zeta: z,
                term: 0.0,
                partial_sum: 0.0,
                running_value: 0.0,
            })
            .collect();
        let s = sample_rows(rows, 100);
        assert!(s.len() <= 101);
        assert_eq!(s.last().unwrap().zeta, 999);
        assert_eq!(s[0].zeta, 0);
    }

    #[test]
    fn criterion_ids_round_trip() {
        for id in CriterionId::EQUATION_CRITERIA {
            assert_eq!(id.as_str().parse::<CriterionId>().unwrap(), id);
        }
        assert!("thm99".parse::<CriterionId>().is_err());
    }
}
