//! Stage pipeline: validate → classify → simulate → check → transform.
//!
//! Each stage records its own outcome; a failing stage does not stop the
//! stages after it when their inputs are still available.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ConfigError, RunConfig, SimulateConfig, TransformConfig};
use crate::criteria::{evaluate, CriterionOptions};
use crate::equation::{validate, DelayForm, HalfLinearEquation};
use crate::report::{
    CriterionEntry, DrawSummary, Report, SimulationOutcome, StageOutcome, Stages, TransformOutcome,
    SCHEMA_VERSION,
};
use crate::solver::{
    classify_trajectory, default_burn_in, iterate, positive_window_check, residual, InitialData, TrajectoryClass,
    TrajectoryStatus, POSITIVE_WINDOW_TOL,
};
use crate::tail::{classify_form, TailConfig};
use crate::transform::{sample_coefficients, to_canonical, to_canonical_estimated};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageSelection {
    pub validate: bool,
    pub classify: bool,
    pub simulate: bool,
    pub check: bool,
    pub transform: bool,
}

impl StageSelection {
    pub const ALL: Self = Self {
        validate: true,
        classify: true,
        simulate: true,
        check: true,
        transform: true,
    };

    pub const NONE: Self = Self {
        validate: false,
        classify: false,
        simulate: false,
        check: false,
        transform: false,
    };
}

/// Runs every stage configured in the file at `path`.
pub fn run_config(path: &Path) -> Result<Report, ConfigError> {
    let cfg = RunConfig::from_path(path)?;
    Ok(run(&cfg, &path.display().to_string(), StageSelection::ALL))
}

fn validation_horizon(cfg: &RunConfig) -> i64 {
    let mut h = crate::criteria::DEFAULT_HORIZON;
    if let Some(c) = &cfg.check {
        h = h.max(c.horizon);
    }
    if let Some(s) = &cfg.simulate {
        h = h.max(*s.horizon.get_ref());
    }
    h
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Runs the selected stages. Sections missing from the configuration skip
/// their stage; validate and classify need no section.
pub fn run(cfg: &RunConfig, source: &str, sel: StageSelection) -> Report {
    let tail = TailConfig::default();
    let mut stages = Stages::default();
    let built = cfg.build_equation();

    match &built {
        Err(e) => {
            stages.validation = Some(StageOutcome::Error {
                message: e.to_string(),
            })
        }
        Ok(eq) => {
            if sel.validate {
                stages.validation = Some(StageOutcome::Ok(validate(eq, validation_horizon(cfg))));
            }
            if sel.classify {
                stages.classification = Some(StageOutcome::from_result(classify_form(eq, &tail)));
            }
            if let (true, Some(sim)) = (sel.simulate, &cfg.simulate) {
                stages.simulation = Some(simulate_stage(eq, sim, &tail));
            }
            if let (true, Some(check)) = (sel.check, &cfg.check) {
                let opts = CriterionOptions {
                    horizon: check.horizon,
                    start: check.start,
                    tail,
                    ..CriterionOptions::default()
                };
                stages.criteria = cfg
                    .criteria()
                    .into_iter()
                    .map(|id| CriterionEntry {
                        criterion: id,
                        outcome: StageOutcome::from_result(evaluate(id, eq, &opts)),
                    })
                    .collect();
            }
            if let (true, Some(t)) = (sel.transform, &cfg.transform) {
                stages.transform = Some(transform_stage(eq, t, &tail));
            }
        }
    }

    Report {
        schema_version: SCHEMA_VERSION,
        timestamp: now(),
        seed: cfg.simulate.as_ref().map_or(0, |s| s.seed),
        source: source.to_string(),
        config: cfg.clone(),
        stages,
        comparisons: Vec::new(),
        discrepancies: Vec::new(),
    }
}

fn simulate_stage(eq: &HalfLinearEquation, sim: &SimulateConfig, tail: &TailConfig) -> StageOutcome<SimulationOutcome> {
    let init = InitialData::for_equation(eq, sim.init.get_ref().clone());
    let horizon = *sim.horizon.get_ref();
    let traj = match iterate(eq, &init, horizon) {
        Ok(t) => t,
        Err(e) => {
            return StageOutcome::Error {
                message: e.to_string(),
            }
        }
    };
    let burn_in = sim.burn_in.unwrap_or_else(|| default_burn_in(&traj));
    let class = StageOutcome::from_result(classify_trajectory(&traj, sim.tol, burn_in));
    let end = traj.end_index();
    let residual = StageOutcome::from_result(residual(eq, &traj.as_sequence(), eq.zeta0, end - 2));
    let positive_window_check = (eq.delay_form == DelayForm::MinusSigmaPlusOne && eq.alpha.is_at_least_one())
        .then(|| StageOutcome::from_result(positive_window_check(eq, &traj, POSITIVE_WINDOW_TOL, tail)));
    let draws = (sim.draws > 0).then(|| {
        random_draws(
            eq,
            &DrawSpec {
                count: sim.draws,
                seed: sim.seed,
                low: sim.draw_low,
                high: sim.draw_high,
                horizon,
                tol: sim.tol,
            },
        )
    });
    StageOutcome::Ok(SimulationOutcome {
        start_index: traj.start_index,
        end_index: end,
        status: traj.status.clone(),
        class,
        residual,
        x: traj.x,
        positive_window_check,
        draws,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawSpec {
    pub count: usize,
    pub seed: u64,
    pub low: f64,
    pub high: f64,
    pub horizon: i64,
    pub tol: f64,
}

/// Label used to tally a trajectory: its class when completed, otherwise
/// its termination status.
pub fn outcome_label(status: &TrajectoryStatus, class: Option<&TrajectoryClass>) -> &'static str {
    match status {
        TrajectoryStatus::Overflowed { .. } => "overflowed",
        TrajectoryStatus::DomainError { .. } => "domain_error",
        TrajectoryStatus::Completed => match class {
            Some(TrajectoryClass::OscillatoryWitness { .. }) => "oscillatory_witness",
            Some(TrajectoryClass::EventuallyPositive { .. }) => "eventually_positive",
            Some(TrajectoryClass::EventuallyNegative { .. }) => "eventually_negative",
            Some(TrajectoryClass::TendsToZero { .. }) => "tends_to_zero",
            Some(TrajectoryClass::Inconclusive) | None => "inconclusive",
        },
    }
}

/// Simulates `count` trajectories from seeded uniform initial data and
/// tallies their classes.
pub fn random_draws(eq: &HalfLinearEquation, spec: &DrawSpec) -> DrawSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = eq.sigma as usize + 2;
    let mut by_class: BTreeMap<String, usize> = BTreeMap::new();
    let mut definite_sign = 0;
    for _ in 0..spec.count {
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(spec.low..=spec.high)).collect();
        let label = match iterate(eq, &InitialData::for_equation(eq, values), spec.horizon) {
            Ok(traj) => {
                let class = classify_trajectory(&traj, spec.tol, default_burn_in(&traj)).ok();
                let label = outcome_label(&traj.status, class.as_ref());
                if matches!(label, "eventually_positive" | "eventually_negative") {
                    definite_sign += 1;
                }
                label
            }
            // all-zero draws have probability zero; count them apart
            Err(_) => "rejected_init",
        };
        *by_class.entry(label.to_string()).or_default() += 1;
    }
    let inconclusive = by_class.get("inconclusive").copied().unwrap_or(0);
    DrawSummary {
        seed: spec.seed,
        count: spec.count,
        low: spec.low,
        high: spec.high,
        inconclusive_fraction: if spec.count == 0 {
            0.0
        } else {
            inconclusive as f64 / spec.count as f64
        },
        by_class,
        definite_sign,
    }
}

fn transform_stage(eq: &HalfLinearEquation, t: &TransformConfig, tail: &TailConfig) -> StageOutcome<TransformOutcome> {
    let built = if t.allow_estimated_theta {
        to_canonical_estimated(eq, tail)
    } else {
        to_canonical(eq, tail)
    };
    match built {
        Ok(ceq) => {
            let to = t.sample_to.unwrap_or(eq.zeta0 + 20);
            StageOutcome::Ok(TransformOutcome {
                theta_certified: ceq.theta_certified,
                samples: sample_coefficients(&ceq, eq.zeta0, to),
            })
        }
        Err(e) => StageOutcome::Error {
            message: e.to_string(),
        },
    }
}
