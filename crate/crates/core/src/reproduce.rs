//! Built-in worked examples with claimed-versus-computed tables.
//!
//! 1. `r = 2^{ζ/3}`, `q = λ₀2^ζ`, `α = 1/3`, `σ = 1`, delay form.
//! 2. `r = (ζ(ζ−1))^{1/3}`, `q = ζ^{4/3}`, `α = 1/3`, `σ = 1`, delay form,
//!    from `ζ₀ = 2` (`r(1) = 0`).
//! 3. `r = (ζ(ζ+1))^{5/3}`, `q = 4(ζ²−1)ζ^{2/3}/3`, `α = 5/3`, `σ = 2`,
//!    delay-plus-one form.

use thiserror::Error;

use crate::config::RunConfig;
use crate::criteria::{crit_thm23, CriterionId, CriterionOptions};
use crate::equation::HalfLinearEquation;
use crate::report::{Comparison, Discrepancy, Report, StageOutcome};
use crate::run::{run, StageSelection};
use crate::sequence::Sequence;
use crate::tail::{TailConfig, ThetaTable};
use crate::transform::{canonical_residual, to_canonical, CanonicalEquation};

pub const DEFAULT_LAMBDA0: f64 = 2.0;

/// Seed recorded in example reports; drives the random-draw sweep.
pub const EXAMPLE_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExampleError {
    #[error("there is no example {0}; choose 1, 2 or 3")]
    Unknown(u8),
    #[error("lambda0 must be positive and finite, got {0}")]
    Lambda(f64),
}

/// The example as a configuration file.
pub fn example_config_text(n: u8, lambda0: f64) -> Result<String, ExampleError> {
    if !(lambda0 > 0.0 && lambda0.is_finite()) {
        return Err(ExampleError::Lambda(lambda0));
    }
    let text = match n {
        1 => format!(
            r#"[equation]
r = "2^(z/3)"
q = "{lambda0:?}*2^z"
alpha = "1/3"
sigma = 1
form = "delay"
zeta0 = 1
theta_closed_form = "2^(1-z)"

[simulate]
init = [0.5, -0.25, 0.75]
horizon = 40
tol = 1e-6
draws = 200
seed = {EXAMPLE_SEED}

[check]
criteria = "all"
horizon = 200
"#
        ),
        2 => format!(
            r#"[equation]
r = "(z*(z-1))^(1/3)"
q = "z^(4/3)"
alpha = "1/3"
sigma = 1
form = "delay"
zeta0 = 2
theta_closed_form = "1/(z-1)"

[simulate]
init = [1.0, 0.5, 0.25]
horizon = 60
tol = 1e-6
draws = 50
seed = {EXAMPLE_SEED}

[check]
criteria = "all"
horizon = 200
"#
        ),
        3 => format!(
            r#"[equation]
r = "(z*(z+1))^(5/3)"
q = "4*(z^2-1)*z^(2/3)/3"
alpha = "5/3"
sigma = 2
form = "delay_plus_one"
zeta0 = 1
theta_closed_form = "1/z"

[simulate]
init = [1.0, 0.9, 0.8, 0.7]
horizon = 60
tol = 1e-6
draws = 50
seed = {EXAMPLE_SEED}

[check]
criteria = "all"
horizon = 200

[transform]
sample_to = 30
"#
        ),
        other => return Err(ExampleError::Unknown(other)),
    };
    Ok(text)
}

pub fn example_config(n: u8, lambda0: f64) -> Result<RunConfig, ExampleError> {
    let text = example_config_text(n, lambda0)?;
    Ok(RunConfig::from_toml_str(&text).expect("built-in example configs are valid"))
}

/// The example equation, with its closed-form θ registered.
pub fn example_equation(n: u8, lambda0: f64) -> Result<HalfLinearEquation, ExampleError> {
    Ok(example_config(n, lambda0)?
        .build_equation()
        .expect("built-in example equations are valid"))
}

/// θ computed numerically, ignoring any registered closed form.
fn numeric_theta(eq: &HalfLinearEquation, lo: i64, hi: i64) -> Option<ThetaTable> {
    let mut bare = eq.clone();
    bare.theta_closed_form = None;
    ThetaTable::build(&bare, lo, hi, &TailConfig::default()).ok()
}

fn theta_rows(
    eq: &HalfLinearEquation,
    lo: i64,
    hi: i64,
    label: &str,
    closed: impl Fn(i64) -> f64,
) -> Vec<Comparison> {
    let table = numeric_theta(eq, lo, hi);
    (lo..=hi)
        .map(|z| {
            let computed = table.as_ref().and_then(|t| t.get(z));
            Comparison::numeric(label, Some(z), closed(z), computed, 1e-9)
        })
        .collect()
}

fn verdict_row(report: &Report, id: CriterionId, claim: &str) -> Comparison {
    let v = report.verdict(id);
    let holds = v.is_some_and(|v| v.status.holds());
    let computed = v.and_then(|v| {
        v.limsup_estimate
            .or_else(|| v.assessment.as_ref().map(|a| a.last_partial))
    });
    Comparison::qualitative(&format!("{id} holds"), claim, computed, holds)
}

/// Runs the example's stages and appends its comparison table.
pub fn reproduce_example(n: u8, lambda0: Option<f64>) -> Result<Report, ExampleError> {
    let lambda0 = lambda0.unwrap_or(DEFAULT_LAMBDA0);
    let cfg = example_config(n, lambda0)?;
    let eq = cfg.build_equation().expect("valid example");
    let mut report = run(&cfg, &format!("example {n}"), StageSelection::ALL);
    match n {
        1 => example_one(&eq, lambda0, &mut report),
        2 => example_two(&eq, &mut report),
        _ => example_three(&eq, &mut report),
    }
    Ok(report)
}

fn example_one(eq: &HalfLinearEquation, lambda0: f64, report: &mut Report) {
    let mut rows = theta_rows(eq, 1, 30, "theta", |z| 2f64.powi(1 - z as i32));
    rows.push(verdict_row(report, CriterionId::Thm21, "the first divergence condition holds"));
    rows.push(verdict_row(report, CriterionId::Thm23, "the limsup condition holds"));
    let v3 = report
        .verdict(CriterionId::Thm23)
        .and_then(|v| v.evidence.iter().find(|r| r.zeta == 3))
        .map(|r| r.running_value);
    rows.push(Comparison::numeric(
        "v",
        Some(3),
        lambda0 * 6.0 * 2f64.powf(-2.0 / 3.0),
        v3,
        1e-9,
    ));
    report.comparisons = rows;

    // the stated threshold λ₀ > 1 against a run below it
    let probe_lambda = 0.5;
    let below = example_equation(1, probe_lambda)
        .ok()
        .and_then(|e| crit_thm23(&e, &CriterionOptions::default()).ok());
    if let Some(v) = below.filter(|v| v.status.holds()) {
        report.discrepancies.push(Discrepancy {
            id: "example1_lambda_threshold".into(),
            description: format!(
                "oscillation is claimed for λ₀ > 1, but v(ζ) = θ^α(ζ)·λ₀(2^ζ − 2) grows without bound for every λ₀ > 0; \
                 at λ₀ = {probe_lambda} the limsup criterion also holds (trailing-half sup of v ≈ {:.6e})",
                v.limsup_estimate.unwrap_or(f64::NAN)
            ),
        });
    }
}

fn example_two(eq: &HalfLinearEquation, report: &mut Report) {
    let mut rows = theta_rows(eq, 2, 50, "theta", |z| 1.0 / (z - 1) as f64);
    if let Some(v) = report.verdict(CriterionId::Thm22B) {
        let worst = v
            .evidence
            .iter()
            .map(|r| (r.term - 1.0).abs())
            .fold(0.0f64, f64::max);
        rows.push(Comparison::numeric("max |q(s)θ^(α+1)(s+1) − 1|", None, 0.0, Some(worst), 1e-9));
    }
    rows.push(verdict_row(report, CriterionId::Thm22B, "Σ q(s)θ^(α+1)(s+1) = ∞, so every solution oscillates"));
    report.comparisons = rows;
}

fn example_three(eq: &HalfLinearEquation, report: &mut Report) {
    let mut rows = theta_rows(eq, 1, 50, "theta", |z| 1.0 / z as f64);
    let ceq = to_canonical(eq, &TailConfig::default()).ok();
    if let Some(c) = &ceq {
        for z in 1..=100 {
            rows.push(Comparison::numeric("r_tilde", Some(z), 1.0, c.r_tilde.eval(z).ok(), 1e-12));
        }
        for z in 2..=100 {
            rows.push(Comparison::numeric("q_tilde", Some(z), 4.0, c.q_tilde.eval(z).ok(), 1e-9));
        }
    }
    let alt = Sequence::parse("(-1)^z").expect("valid expression");
    let stated = CanonicalEquation::new(Sequence::constant(1.0), Sequence::constant(4.0), 2, 1);
    rows.push(Comparison::numeric(
        "residual of (-1)^z with r_tilde = 1, q_tilde = 4",
        None,
        0.0,
        canonical_residual(&stated, &alt, 3, 100).ok(),
        1e-12,
    ));
    let computed_residual = ceq.as_ref().and_then(|c| canonical_residual(c, &alt, 3, 100).ok());
    rows.push(Comparison::numeric(
        "residual of (-1)^z with the computed coefficients",
        None,
        0.0,
        computed_residual,
        1e-12,
    ));
    rows.push(verdict_row(report, CriterionId::CanonicalSumQ, "Σ q̃(ζ) = ∞, so every solution oscillates"));
    report.comparisons = rows;

    let q2 = ceq.as_ref().and_then(|c| c.q_tilde.eval(2).ok());
    if let Some(q) = q2.filter(|q| (q - 4.0).abs() > 1e-9) {
        report.discrepancies.push(Discrepancy {
            id: "example3_q_tilde".into(),
            description: format!(
                "the comparison formula gives q̃(ζ) = {q:.6} for every ζ ≥ 2, while the stated value is 4; \
                 (−1)^ζ solves the canonical equation only with q̃ = 4 (residual {:.6} with the computed q̃). \
                 Σ q̃ = ∞ holds either way",
                computed_residual.unwrap_or(f64::NAN)
            ),
        });
    }
    if report
        .stages
        .transform
        .as_ref()
        .is_some_and(StageOutcome::is_error)
    {
        report.discrepancies.push(Discrepancy {
            id: "example3_transform".into(),
            description: "the transform stage failed; see stages.transform".into(),
        });
    }
}
