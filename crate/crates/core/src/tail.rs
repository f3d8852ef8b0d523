//! Partial sums `R(ζ) = Σ_{s=ζ₀}^{ζ−1} r^{−1/α}(s)` and tail sums
//! `θ(ζ) = Σ_{s≥ζ} r^{−1/α}(s)`, plus canonical-form classification.
//!
//! A numeric tail is *certified* only when the summands fall below the
//! tolerance while their successive ratios stay below some `ρ < 1` over the
//! trailing window; the remainder is then bounded by `t·ρ/(1−ρ)`. Otherwise
//! the sum is truncated at `max_terms` and a power-law remainder estimate is
//! added, without a certificate.

use serde::Serialize;
use thiserror::Error;

use crate::equation::{HalfLinearEquation, ModelError};

/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailConfig {
    pub max_terms: usize,
    /// Absolute size a summand must fall below before stopping.
    pub tol_abs: f64,
    /// Summands must also fall below `tol_rel` times the running sum.
    pub tol_rel: f64,
    /// Number of trailing ratios inspected by the geometric certificate.
    pub ratio_window: usize,
    /// Largest ratio accepted by the certificate.
    pub rho_max: f64,
    /// Also run the numeric path when a closed form is registered.
    pub cross_check: bool,
    /// Indices past `ζ₀` covered by precomputed θ tables.
    pub table_span: usize,
}

impl Default for TailConfig {
    fn default() -> Self {
        Self {
            max_terms: 1_000_000,
            tol_abs: 1e-12,
            tol_rel: 1e-16,
            ratio_window: 8,
            rho_max: 0.999,
            cross_check: true,
            table_span: 2048,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TailError {
    #[error("θ({zeta}) requested below the first solution index {min}")]
    BelowDomain { zeta: i64, min: i64 },
    #[error("tail sum from {from} does not converge: {reason}")]
    NonConvergent { from: i64, reason: String },
    #[error("R({zeta}) requested before ζ₀ = {zeta0}")]
    BeforeStart { zeta: i64, zeta0: i64 },
    #[error("θ({zeta}) is unavailable: {reason}")]
    Unavailable { zeta: i64, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum TailMethod {
    ClosedForm,
    GeometricCertificate { rho: f64 },
    Truncated { remainder_estimate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailSumResult {
    pub value: f64,
    /// First index not summed explicitly.
    pub truncation_index: i64,
    /// Bound on `|true − value|`; `None` when unknown.
    pub tail_bound: Option<f64>,
    pub certified: bool,
    pub method: TailMethod,
    /// Independent numeric value when a closed form produced `value`.
    pub numeric_check: Option<f64>,
}

/// Trailing-window lower bound on a term sequence: evidence that the terms
/// stay above `c > 0` from `onset` on, so the series diverges by comparison
/// with `Σ c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBound {
    pub c: f64,
    /// Offset into the term slice where the bound starts.
    pub onset: usize,
}

const WITNESS_FIRST_CHECKPOINT: usize = 16;
const WITNESS_SLACK: f64 = 0.9;

/// Looks for a non-decaying window minimum at checkpoints `k = 16, 32, 64…`:
/// the minimum over `[k/2, k)` must be positive and at least 0.9 times the
/// minimum over `[k/4, k/2)`. Checkpoints only depend on a prefix of the
/// terms, so extending the slice never withdraws a witness.
pub fn lower_bound_witness(terms: &[f64]) -> Option<LowerBound> {
    let min_of = |w: &[f64]| w.iter().copied().fold(f64::INFINITY, f64::min);
    let mut found = None;
    let mut k = WITNESS_FIRST_CHECKPOINT;
    while k <= terms.len() {
        let recent = min_of(&terms[k / 2..k]);
        let earlier = min_of(&terms[k / 4..k / 2]);
        if recent > 0.0 && recent.is_finite() && recent >= WITNESS_SLACK * earlier {
            found = Some(LowerBound {
                c: recent,
                onset: k / 2,
            });
        }
        k *= 2;
    }
    found
}

/// `R(ζ) = Σ_{s=ζ₀}^{ζ−1} 1/r^{1/α}(s)`.
pub fn r_partial(eq: &HalfLinearEquation, zeta: i64) -> Result<f64, TailError> {
    if zeta < eq.zeta0 {
        return Err(TailError::BeforeStart {
            zeta,
            zeta0: eq.zeta0,
        });
    }
    let mut acc = CompensatedSum::new();
    for s in eq.zeta0..zeta {
        acc.add(eq.inv_r_root(s)?);
    }
    Ok(acc.value())
}

/// Numeric `Σ_{s≥from} 1/r^{1/α}(s)`.
pub fn numeric_tail(
    eq: &HalfLinearEquation,
    from: i64,
    cfg: &TailConfig,
) -> Result<TailSumResult, TailError> {
    let mut acc = CompensatedSum::new();
    let window = cfg.ratio_window.max(1);
    let mut ratios = std::collections::VecDeque::with_capacity(window);
    let mut prev: Option<f64> = None;
    let mut trailing_min = f64::INFINITY;
    let mid = cfg.max_terms / 2;
    let mut mid_term = None;
    let mut last = (from, 0.0);

    for k in 0..cfg.max_terms {
        let s = from + k as i64;
        let t = eq.inv_r_root(s)?;
        acc.add(t);
        last = (s, t);
        if k == mid {
            mid_term = Some((s, t));
        }
        if k >= mid {
            trailing_min = trailing_min.min(t);
        }
        if let Some(p) = prev {
            if ratios.len() == window {
                ratios.pop_front();
            }
            ratios.push_back(if p > 0.0 {
                t / p
            } else if t == 0.0 {
                0.0
            } else {
                f64::INFINITY
            });
        }
        prev = Some(t);

        let sum = acc.value();
        if !sum.is_finite() || sum > 1e300 {
            return Err(TailError::NonConvergent {
                from,
                reason: format!("partial sum exceeded 1e300 at index {s}"),
            });
        }
        if ratios.len() == window && t < cfg.tol_abs && t <= cfg.tol_rel * sum {
            let rho = ratios.iter().copied().fold(0.0, f64::max);
            if rho <= cfg.rho_max {
                return Ok(TailSumResult {
                    value: sum,
                    truncation_index: s + 1,
                    tail_bound: Some(t * rho / (1.0 - rho)),
                    certified: true,
                    method: TailMethod::GeometricCertificate { rho },
                    numeric_check: None,
                });
            }
        }
    }

    let (n, t_n) = last;
    let sum = acc.value();
    let Some((a, t_a)) = mid_term else {
        return Err(TailError::NonConvergent {
            from,
            reason: "no terms summed".into(),
        });
    };
    if t_n == 0.0 {
        return Ok(TailSumResult {
            value: sum,
            truncation_index: n + 1,
            tail_bound: None,
            certified: false,
            method: TailMethod::Truncated {
                remainder_estimate: 0.0,
            },
            numeric_check: None,
        });
    }
    if t_n >= WITNESS_SLACK * trailing_min && t_a <= t_n {
        return Err(TailError::NonConvergent {
            from,
            reason: format!("summands do not decay (last term {t_n:e})"),
        });
    }
    if a <= 0 || n <= a {
        return Err(TailError::NonConvergent {
            from,
            reason: "cannot fit the summand decay at non-positive indices".into(),
        });
    }
    // local power law t(s) ≈ C s^{-p}
    let p = (t_a / t_n).ln() / (n as f64 / a as f64).ln();
    if !(p > 1.0 + 1e-3) {
        return Err(TailError::NonConvergent {
            from,
            reason: format!("summands decay like s^-{p:.4}, too slowly to converge"),
        });
    }
    let nf = n as f64;
    let remainder = t_n * nf.powf(p) * (nf + 0.5).powf(1.0 - p) / (p - 1.0);
    Ok(TailSumResult {
        value: sum + remainder,
        truncation_index: n + 1,
        tail_bound: None,
        certified: false,
        method: TailMethod::Truncated {
            remainder_estimate: remainder,
        },
        numeric_check: None,
    })
}

/// θ(ζ) for `ζ ≥ ζ₀ − σ`.
///
/// A registered closed form is used when present (certified), and the
/// numeric path is still run when `cfg.cross_check` is set. Below `ζ₀` the
/// value is `θ(ζ₀) + Σ_{s=ζ}^{ζ₀−1} r^{−1/α}(s)`.
pub fn theta(eq: &HalfLinearEquation, zeta: i64, cfg: &TailConfig) -> Result<TailSumResult, TailError> {
    let min = eq.first_solution_index();
    if zeta < min {
        return Err(TailError::BelowDomain { zeta, min });
    }
    let Some(closed) = &eq.theta_closed_form else {
        return numeric_tail(eq, zeta, cfg);
    };
    let value = if zeta >= eq.zeta0 {
        closed.eval(zeta).map_err(ModelError::from)?
    } else {
        let mut acc = CompensatedSum::new();
        acc.add(closed.eval(eq.zeta0).map_err(ModelError::from)?);
        for s in zeta..eq.zeta0 {
            acc.add(eq.inv_r_root(s)?);
        }
        acc.value()
    };
    let numeric_check = if cfg.cross_check {
        Some(numeric_tail(eq, zeta, cfg)?.value)
    } else {
        None
    };
    Ok(TailSumResult {
        value,
        truncation_index: zeta,
        tail_bound: Some(0.0),
        certified: true,
        method: TailMethod::ClosedForm,
        numeric_check,
    })
}

/// θ precomputed on an index range by backward accumulation from one tail
/// evaluation past the top of the range.
///
/// Entries below `ζ₀` whose extension sum runs into a non-evaluable `r` are
/// unavailable.
#[derive(Debug, Clone)]
pub struct ThetaTable {
    lo: i64,
    values: Vec<Option<f64>>,
    reasons: Vec<(i64, String)>,
    certified: bool,
    closed_form: bool,
}

impl ThetaTable {
    pub fn build(
        eq: &HalfLinearEquation,
        lo: i64,
        hi: i64,
        cfg: &TailConfig,
    ) -> Result<Self, TailError> {
        let lo = lo.max(eq.first_solution_index());
        let hi = hi.max(eq.zeta0).max(lo);
        let n = (hi - lo + 1) as usize;
        let mut values = vec![None; n];
        let mut reasons = Vec::new();
        let idx = |z: i64| (z - lo) as usize;

        let (certified, closed_form) = match &eq.theta_closed_form {
            Some(closed) => {
                for z in eq.zeta0.max(lo)..=hi {
                    values[idx(z)] = Some(closed.eval(z).map_err(ModelError::from)?);
                }
                (true, true)
            }
            None => {
                let top = numeric_tail(eq, hi + 1, cfg)?;
                let mut acc = CompensatedSum::new();
                acc.add(top.value);
                for z in (eq.zeta0.max(lo)..=hi).rev() {
                    acc.add(eq.inv_r_root(z)?);
                    values[idx(z)] = Some(acc.value());
                }
                (top.certified, false)
            }
        };

        if lo < eq.zeta0 {
            let mut acc = CompensatedSum::new();
            acc.add(values[idx(eq.zeta0)].expect("filled above"));
            let mut broken = false;
            for z in (lo..eq.zeta0).rev() {
                if !broken {
                    match eq.inv_r_root(z) {
                        Ok(t) => {
                            acc.add(t);
                            values[idx(z)] = Some(acc.value());
                            continue;
                        }
                        Err(e) => {
                            broken = true;
                            reasons.push((z, e.to_string()));
                        }
                    }
                } else {
                    reasons.push((z, format!("extension sum passes through index {}", z + 1)));
                }
            }
        }

        Ok(Self {
            lo,
            values,
            reasons,
            certified,
            closed_form,
        })
    }

    pub fn range(&self) -> (i64, i64) {
        (self.lo, self.lo + self.values.len() as i64 - 1)
    }

    pub fn get(&self, zeta: i64) -> Option<f64> {
        let off = usize::try_from(zeta - self.lo).ok()?;
        self.values.get(off).copied().flatten()
    }

    pub fn at(&self, zeta: i64) -> Result<f64, TailError> {
        self.get(zeta).ok_or_else(|| {
            let reason = self
                .reasons
                .iter()
                .find(|(z, _)| *z == zeta)
                .map(|(_, r)| r.clone())
                .unwrap_or_else(|| "outside the precomputed range".into());
            TailError::Unavailable { zeta, reason }
        })
    }

    pub fn certified(&self) -> bool {
        self.certified
    }

    pub fn from_closed_form(&self) -> bool {
        self.closed_form
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum FormClass {
    Canonical { witness: LowerBound },
    NonCanonical { theta_zeta0: f64, via_closed_form: bool },
    Inconclusive { reason: String },
}

const CANONICAL_PROBE_TERMS: usize = 1 << 16;

/// Canonical when `Σ r^{−1/α}` has a lower-bound witness; non-canonical when
/// θ(ζ₀) is certified finite; inconclusive otherwise.
pub fn classify_form(eq: &HalfLinearEquation, cfg: &TailConfig) -> Result<FormClass, TailError> {
    if let Some(closed) = &eq.theta_closed_form {
        let v = closed.eval(eq.zeta0).map_err(ModelError::from)?;
        return Ok(FormClass::NonCanonical {
            theta_zeta0: v,
            via_closed_form: true,
        });
    }
    let tail = match numeric_tail(eq, eq.zeta0, cfg) {
        Ok(t) if t.certified => {
            return Ok(FormClass::NonCanonical {
                theta_zeta0: t.value,
                via_closed_form: false,
            })
        }
        Ok(t) => format!(
            "θ(ζ₀) ≈ {:e} could not be certified after {} terms",
            t.value, cfg.max_terms
        ),
        Err(TailError::NonConvergent { reason, .. }) => {
            format!("partial sums look divergent but no lower bound was found: {reason}")
        }
        Err(e) => return Err(e),
    };
    let n = cfg.max_terms.min(CANONICAL_PROBE_TERMS);
    let terms: Vec<f64> = (0..n)
        .map_while(|k| eq.inv_r_root(eq.zeta0 + k as i64).ok())
        .collect();
    if let Some(witness) = lower_bound_witness(&terms) {
        return Ok(FormClass::Canonical { witness });
    }
    Ok(FormClass::Inconclusive { reason: tail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::DelayForm;
    use crate::sequence::Sequence;
    use crate::RationalExponent;

    fn eq(r: &str, alpha: &str, sigma: u32, zeta0: i64) -> HalfLinearEquation {
        HalfLinearEquation::new(
            Sequence::parse(r).unwrap(),
            Sequence::constant(1.0),
            alpha.parse::<RationalExponent>().unwrap(),
            sigma,
            DelayForm::MinusSigma,
            zeta0,
        )
        .unwrap()
    }

    #[test]
    fn r_partial_examples() {
        let e3 = eq("(z*(z+1))^(5/3)", "5/3", 2, 1);
        // telescoping: 1/(1·2) + 1/(2·3) = 2/3
        assert!((r_partial(&e3, 3).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r_partial(&e3, 1).unwrap(), 0.0);
        assert_eq!(r_partial(&eq("1", "1", 0, 0), 5).unwrap(), 5.0);
        assert!(r_partial(&e3, 0).is_err());
    }

    #[test]
    fn geometric_tail_is_certified() {
        let e1 = eq("2^(z/3)", "1/3", 1, 1);
        let t = theta(&e1, 1, &TailConfig::default()).unwrap();
        assert!(t.certified);
        assert!((t.value - 1.0).abs() <= t.tail_bound.unwrap() + 1e-15);
        assert!((t.value - 1.0).abs() < 1e-15);
        // relative accuracy far out in the tail
        let t = theta(&e1, 60, &TailConfig::default()).unwrap();
        assert!((t.value / 2f64.powi(-59) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polynomial_tail_uses_remainder_estimate() {
        let e3 = eq("(z*(z+1))^(5/3)", "5/3", 2, 1);
        let cfg = TailConfig {
            max_terms: 100_000,
            ..TailConfig::default()
        };
        let t = theta(&e3, 4, &cfg).unwrap();
        assert!(!t.certified);
        assert!(t.tail_bound.is_none());
        assert!((t.value - 0.25).abs() < 1e-10, "{}", t.value);
    }

    #[test]
    fn closed_form_is_cross_checked() {
        let e2 = eq("(z*(z-1))^(1/3)", "1/3", 1, 2)
            .with_theta_closed_form(Sequence::parse("1/(z-1)").unwrap());
        let cfg = TailConfig {
            max_terms: 100_000,
            ..TailConfig::default()
        };
        let t = theta(&e2, 3, &cfg).unwrap();
        assert_eq!(t.value, 0.5);
        assert!(t.certified);
        assert!((t.numeric_check.unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn canonical_tail_is_non_convergent() {
        let e = eq("1", "1", 0, 0);
        let cfg = TailConfig {
            max_terms: 10_000,
            ..TailConfig::default()
        };
        assert!(matches!(
            theta(&e, 0, &cfg),
            Err(TailError::NonConvergent { .. })
        ));
        let harmonic = eq("z", "1", 0, 1);
        assert!(matches!(
            theta(&harmonic, 1, &cfg),
            Err(TailError::NonConvergent { .. })
        ));
    }

    #[test]
    fn classify_examples() {
        let cfg = TailConfig::default();
        assert!(matches!(
            classify_form(&eq("2^(z/3)", "1/3", 1, 1), &cfg).unwrap(),
            FormClass::NonCanonical { via_closed_form: false, .. }
        ));
        assert!(matches!(
            classify_form(&eq("1", "1", 0, 0), &cfg).unwrap(),
            FormClass::Canonical { .. }
        ));
        // harmonic summands: divergent, but no constant lower bound
        let small = TailConfig {
            max_terms: 20_000,
            ..cfg
        };
        assert!(matches!(
            classify_form(&eq("z", "1", 0, 1), &small).unwrap(),
            FormClass::Inconclusive { .. }
        ));
    }

    #[test]
    fn table_matches_direct_theta_and_extends_below_start() {
        let e1 = eq("2^(z/3)", "1/3", 1, 1);
        let cfg = TailConfig::default();
        let tab = ThetaTable::build(&e1, 0, 40, &cfg).unwrap();
        assert!(tab.certified());
        for z in 0..=40 {
            let want = 2f64.powi(1 - z as i32);
            assert!((tab.at(z).unwrap() / want - 1.0).abs() < 1e-13, "z={z}");
        }
        let e2 = eq("(z*(z-1))^(1/3)", "1/3", 1, 2);
        let tab = ThetaTable::build(&e2, 1, 10, &TailConfig {
            max_terms: 100_000,
            ..cfg
        })
        .unwrap();
        assert!(tab.get(1).is_none());
        assert!(matches!(tab.at(1), Err(TailError::Unavailable { .. })));
        assert!((tab.at(2).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn witness_detects_constant_and_rejects_decay() {
        assert!(lower_bound_witness(&[1.0; 64]).is_some());
        let harmonic: Vec<f64> = (1..10_000).map(|s| 1.0 / s as f64).collect();
        assert!(lower_bound_witness(&harmonic).is_none());
        let geo: Vec<f64> = (0..200).map(|s| 0.5f64.powi(s)).collect();
        assert!(lower_bound_witness(&geo).is_none());
        assert!(lower_bound_witness(&[0.0; 64]).is_none());
        assert!(lower_bound_witness(&[1.0; 15]).is_none());
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut acc = CompensatedSum::new();
        acc.add(1.0);
        for _ in 0..1000 {
            acc.add(1e-16);
        }
        assert!((acc.value() - (1.0 + 1e-13)).abs() < 1e-16);
    }
}
