//! Forward iteration, trajectory classification and residual checks.
//!
//! With the quasi-difference `y(ζ) = r(ζ)(Δx(ζ))^α` the equation becomes the
//! explicit two-step recurrence
//!
//! ```text
//! y(ζ+1) = y(ζ) − q(ζ)·x^α(d(ζ))
//! x(ζ+2) = x(ζ+1) + (y(ζ+1)/r(ζ+1))^{1/α}
//! ```
//!
//! which needs `x(ζ₀−σ) … x(ζ₀+1)`, i.e. `σ + 2` starting values.

use serde::Serialize;
use thiserror::Error;

use crate::equation::{DelayForm, HalfLinearEquation, ModelError};
use crate::exponent::{real_ratio_pow, signed_pow};
use crate::sequence::{SeqError, Sequence};
use crate::tail::{TailConfig, TailError, ThetaTable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("expected {expected} initial values (sigma + 2), got {got}")]
    InitLength { expected: usize, got: usize },
    #[error("initial data must start at index {expected}, not {got}")]
    InitStart { expected: i64, got: i64 },
    #[error("initial data are all zero; solutions must be non-trivial")]
    TrivialInit,
    #[error("horizon {horizon} must exceed zeta0 + 1 = {min}")]
    Horizon { horizon: i64, min: i64 },
    #[error("trajectory has {len} points, need at least {need}")]
    TooShort { len: usize, need: usize },
    #[error("the positive-window monitor needs the delay-plus-one form")]
    WrongForm,
    #[error("the positive-window monitor needs alpha >= 1, got {0}")]
    AlphaBelowOne(String),
    #[error("no positive window to check: x({at}) is not positive")]
    NonPositiveWindow { at: i64 },
    #[error("residual at index {index}: {source}")]
    Residual { index: i64, source: ModelError },
    #[error(transparent)]
    Tail(#[from] TailError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialData {
    pub start_index: i64,
    pub values: Vec<f64>,
}

impl InitialData {
    /// Initial data starting at `ζ₀ − σ`.
    pub fn for_equation(eq: &HalfLinearEquation, values: Vec<f64>) -> Self {
        Self {
            start_index: eq.first_solution_index(),
            values,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            start_index: self.start_index,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TrajectoryStatus {
    Completed,
    Overflowed { at: i64 },
    DomainError { at: i64, message: String },
}

/// A computed solution segment. `x` starts at `start_index`, `y` at `y_start`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub start_index: i64,
    pub x: Vec<f64>,
    pub y_start: i64,
    pub y: Vec<f64>,
    pub status: TrajectoryStatus,
}

impl Trajectory {
    /// Wraps tabulated values, deriving `y` where `r` allows.
    pub fn from_values(eq: &HalfLinearEquation, start_index: i64, x: Vec<f64>) -> Self {
        let y_start = eq.zeta0.max(start_index);
        let mut y = Vec::new();
        let mut z = y_start;
        while let (Some(a), Some(b)) = (
            x.get((z - start_index) as usize),
            x.get((z + 1 - start_index) as usize),
        ) {
            let Ok(r) = eq.r_at(z) else { break };
            let Ok(p) = signed_pow(b - a, eq.alpha) else { break };
            y.push(r * p);
            z += 1;
        }
        Self {
            start_index,
            x,
            y_start,
            y,
            status: TrajectoryStatus::Completed,
        }
    }

    pub fn end_index(&self) -> i64 {
        self.start_index + self.x.len() as i64 - 1
    }

    pub fn x_at(&self, zeta: i64) -> Option<f64> {
        let off = usize::try_from(zeta - self.start_index).ok()?;
        self.x.get(off).copied()
    }

    pub fn y_at(&self, zeta: i64) -> Option<f64> {
        let off = usize::try_from(zeta - self.y_start).ok()?;
        self.y.get(off).copied()
    }

    pub fn as_sequence(&self) -> Sequence {
        Sequence::table(self.start_index, self.x.clone())
    }

    pub fn is_completed(&self) -> bool {
        self.status == TrajectoryStatus::Completed
    }
}

/// Iterates the equation from `init` until `x(horizon)` is known.
///
/// Non-finite values truncate the trajectory and mark it `Overflowed`;
/// coefficient failures (non-positive `r`, evaluation errors) mark it
/// `DomainError`. Both keep the data computed so far.
pub fn iterate(
    eq: &HalfLinearEquation,
    init: &InitialData,
    horizon: i64,
) -> Result<Trajectory, SolverError> {
    let expected = eq.sigma as usize + 2;
    if init.values.len() != expected {
        return Err(SolverError::InitLength {
            expected,
            got: init.values.len(),
        });
    }
    if init.start_index != eq.first_solution_index() {
        return Err(SolverError::InitStart {
            expected: eq.first_solution_index(),
            got: init.start_index,
        });
    }
    if init.values.iter().all(|v| *v == 0.0) {
        return Err(SolverError::TrivialInit);
    }
    if horizon <= eq.zeta0 + 1 {
        return Err(SolverError::Horizon {
            horizon,
            min: eq.zeta0 + 1,
        });
    }

    let start = init.start_index;
    let mut x = init.values.clone();
    let mut y = Vec::with_capacity((horizon - eq.zeta0) as usize);
    let xi = |z: i64| (z - start) as usize;
    let domain = |at: i64, e: &dyn std::fmt::Display| TrajectoryStatus::DomainError {
        at,
        message: e.to_string(),
    };
    let done = |x, y, status| Trajectory {
        start_index: start,
        x,
        y_start: eq.zeta0,
        y,
        status,
    };

    let z0 = eq.zeta0;
    let r0 = match eq.r_at(z0) {
        Ok(r) => r,
        Err(e) => return Ok(done(x, y, domain(z0, &e))),
    };
    let y0 = match signed_pow(x[xi(z0 + 1)] - x[xi(z0)], eq.alpha) {
        Ok(p) if (r0 * p).is_finite() => r0 * p,
        _ => return Ok(done(x, y, TrajectoryStatus::Overflowed { at: z0 })),
    };
    y.push(y0);

    for z in z0..=horizon - 2 {
        let q = match eq.q_at(z) {
            Ok(q) => q,
            Err(e) => return Ok(done(x, y, domain(z, &e))),
        };
        let xd = x[xi(eq.delayed_index(z))];
        let Ok(force) = signed_pow(xd, eq.alpha) else {
            return Ok(done(x, y, TrajectoryStatus::Overflowed { at: z }));
        };
        let y_next = y[y.len() - 1] - q * force;
        if !y_next.is_finite() {
            return Ok(done(x, y, TrajectoryStatus::Overflowed { at: z + 1 }));
        }
        let r_next = match eq.r_at(z + 1) {
            Ok(r) => r,
            Err(e) => return Ok(done(x, y, domain(z + 1, &e))),
        };
        let x_next = match signed_pow(y_next / r_next, eq.alpha.recip()) {
            Ok(dx) => x[xi(z + 1)] + dx,
            Err(_) => f64::INFINITY,
        };
        if !x_next.is_finite() {
            return Ok(done(x, y, TrajectoryStatus::Overflowed { at: z + 2 }));
        }
        y.push(y_next);
        x.push(x_next);
    }
    Ok(done(x, y, TrajectoryStatus::Completed))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum TrajectoryClass {
    OscillatoryWitness { first_sign_change: i64, count: usize },
    EventuallyPositive { since: i64 },
    EventuallyNegative { since: i64 },
    TendsToZero { since: i64, bound: f64 },
    Inconclusive,
}

/// Entries needed past the burn-in, and the shortest run below `tol` that
/// counts as decay to zero.
pub const MIN_CLASSIFY_POINTS: usize = 8;

/// Default burn-in: the first 20% of the stored points.
pub fn default_burn_in(traj: &Trajectory) -> usize {
    traj.x.len() / 5
}

/// Classifies the behaviour of `traj.x` after the first `burn_in` entries.
///
/// Entries with `|x| ≤ tol` are treated as zero: a sign change needs two
/// entries beyond `tol` of opposite sign with only near-zero entries between
/// them.
pub fn classify_trajectory(
    traj: &Trajectory,
    tol: f64,
    burn_in: usize,
) -> Result<TrajectoryClass, SolverError> {
    let need = burn_in + MIN_CLASSIFY_POINTS;
    if traj.x.len() < need {
        return Err(SolverError::TooShort {
            len: traj.x.len(),
            need,
        });
    }
    let at = |i: usize| traj.start_index + i as i64;
    let post = &traj.x[burn_in..];

    let mut first = None;
    let mut count = 0;
    let mut last_sign = 0.0;
    for (i, &v) in post.iter().enumerate() {
        if v.abs() <= tol {
            continue;
        }
        let s = v.signum();
        if last_sign != 0.0 && s != last_sign {
            count += 1;
            first.get_or_insert(at(burn_in + i));
        }
        last_sign = s;
    }
    if let Some(first_sign_change) = first {
        return Ok(TrajectoryClass::OscillatoryWitness {
            first_sign_change,
            count,
        });
    }

    let small_run = post.iter().rev().take_while(|v| v.abs() < tol).count();
    if small_run >= MIN_CLASSIFY_POINTS {
        let from = traj.x.len() - small_run;
        let bound = traj.x[from..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        return Ok(TrajectoryClass::TendsToZero {
            since: at(from),
            bound,
        });
    }

    let run_since = |pred: &dyn Fn(f64) -> bool| {
        let run = traj.x.iter().rev().take_while(|v| pred(**v)).count();
        at(traj.x.len() - run)
    };
    if post.iter().all(|v| *v > tol) {
        return Ok(TrajectoryClass::EventuallyPositive {
            since: run_since(&|v| v > 0.0),
        });
    }
    if post.iter().all(|v| *v < -tol) {
        return Ok(TrajectoryClass::EventuallyNegative {
            since: run_since(&|v| v < 0.0),
        });
    }
    Ok(TrajectoryClass::Inconclusive)
}

/// Left-hand side of the equation at one index, with the magnitude of its
/// three terms for relative comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub value: f64,
    pub scale: f64,
}

/// `r(ζ+1)(Δx(ζ+1))^α − r(ζ)(Δx(ζ))^α + q(ζ)x^α(d(ζ))`.
pub fn lhs_at(eq: &HalfLinearEquation, x: &Sequence, zeta: i64) -> Result<Stencil, ModelError> {
    let xv = |z: i64| x.eval(z).map_err(ModelError::from);
    let (x0, x1, x2) = (xv(zeta)?, xv(zeta + 1)?, xv(zeta + 2)?);
    let y1 = eq.r_at(zeta + 1)? * signed_pow(x2 - x1, eq.alpha)?;
    let y0 = eq.r_at(zeta)? * signed_pow(x1 - x0, eq.alpha)?;
    let f = eq.q_at(zeta)? * signed_pow(xv(eq.delayed_index(zeta))?, eq.alpha)?;
    Ok(Stencil {
        value: y1 - y0 + f,
        scale: y1.abs() + y0.abs() + f.abs(),
    })
}

/// Largest `|LHS(ζ)|` over `ζ ∈ [from, to]`.
pub fn residual(
    eq: &HalfLinearEquation,
    candidate: &Sequence,
    from: i64,
    to: i64,
) -> Result<f64, SolverError> {
    let mut worst = 0.0f64;
    for z in from..=to {
        let s = lhs_at(eq, candidate, z).map_err(|source| SolverError::Residual {
            index: source.index().unwrap_or(z),
            source,
        })?;
        worst = worst.max(s.value.abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositiveWindowReport {
    /// Checked indices `[from, to]`.
    pub from: i64,
    pub to: i64,
    pub violations: Vec<i64>,
    /// Largest observed `lhs / rhs`.
    pub max_ratio: f64,
}

pub const POSITIVE_WINDOW_TOL: f64 = 1e-9;

/// Checks `(r^{1/α}(ζ)Δx(ζ)/x(ζ−σ+1))^{α−1} ≤ θ^{1−α}(ζ)·(1 + tol)` over the
/// leading window from `ζ₀` on which the trajectory stays positive.
pub fn positive_window_check(
    eq: &HalfLinearEquation,
    traj: &Trajectory,
    tol: f64,
    tail: &TailConfig,
) -> Result<PositiveWindowReport, SolverError> {
    if eq.delay_form != DelayForm::MinusSigmaPlusOne {
        return Err(SolverError::WrongForm);
    }
    if !eq.alpha.is_at_least_one() {
        return Err(SolverError::AlphaBelowOne(eq.alpha.to_string()));
    }
    let positive = |z: i64| traj.x_at(z).is_some_and(|v| v > 0.0);
    let mut to = eq.zeta0 - 1;
    while traj.x_at(to + 2).is_some()
        && positive(to + 1)
        && positive(to + 2)
        && positive(eq.delayed_index(to + 1))
    {
        to += 1;
    }
    if to < eq.zeta0 {
        let at = [eq.zeta0, eq.zeta0 + 1, eq.delayed_index(eq.zeta0)]
            .into_iter()
            .find(|z| !positive(*z))
            .unwrap_or(eq.zeta0);
        return Err(SolverError::NonPositiveWindow { at });
    }

    let table = ThetaTable::build(eq, eq.zeta0, to, tail)?;
    let (m, n) = (eq.alpha.num() as i64, eq.alpha.den());
    let mut violations = Vec::new();
    let mut max_ratio = 0.0f64;
    for z in eq.zeta0..=to {
        let x0 = traj.x_at(z).expect("inside window");
        let x1 = traj.x_at(z + 1).expect("inside window");
        let xd = traj.x_at(eq.delayed_index(z)).expect("inside window");
        let root = eq.r_root(z).map_err(|source| SolverError::Residual { index: z, source })?;
        let lhs = real_ratio_pow(root * (x1 - x0) / xd, m - n as i64, n);
        let rhs = real_ratio_pow(table.at(z)?, n as i64 - m, n);
        max_ratio = max_ratio.max(lhs / rhs);
        if lhs > rhs * (1.0 + tol) {
            violations.push(z);
        }
    }
    Ok(PositiveWindowReport {
        from: eq.zeta0,
        to,
        violations,
        max_ratio,
    })
}

impl From<SeqError> for SolverError {
    fn from(e: SeqError) -> Self {
        SolverError::Residual {
            index: e.index(),
            source: ModelError::Seq(e),
        }
    }
}
