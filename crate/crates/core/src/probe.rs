//! Numerical assessment of `Σ t(s) = ∞` for non-negative terms.
//!
//! Decision order:
//! 1. a lower-bound witness (non-decaying trailing-window minimum) certifies
//!    divergence by comparison with `Σ c`;
//! 2. a geometric-ratio certificate on the trailing terms suggests
//!    convergence and bounds the remainder;
//! 3. otherwise the growth of the partial sums is fitted on a log-log scale
//!    over the trailing half and compared against two slope thresholds.

use serde::Serialize;
use thiserror::Error;

use crate::tail::{lower_bound_witness, CompensatedSum, LowerBound};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbeError {
    #[error("term {offset} is negative ({value})")]
    NegativeTerm { offset: usize, value: f64 },
    #[error("term {offset} is not finite")]
    NonFinite { offset: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbePolicy {
    pub ratio_window: usize,
    pub rho_max: f64,
    /// Log-log slope of the partial sums at or above which divergence is
    /// suggested.
    pub diverge_slope: f64,
    /// Slope at or below which convergence is suggested.
    pub converge_slope: f64,
}

impl Default for ProbePolicy {
    fn default() -> Self {
        Self {
            ratio_window: 8,
            rho_max: 0.999,
            diverge_slope: 1e-2,
            converge_slope: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Diverges,
    Converges,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "witness", rename_all = "snake_case")]
pub enum Witness {
    LowerBound(LowerBound),
    ClosedForm { id: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DivergenceStatus {
    DivergesSuggested,
    ConvergesSuggested { tail_bound: Option<f64> },
    Certified { direction: Direction, witness: Witness },
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceAssessment {
    pub status: DivergenceStatus,
    pub last_partial: f64,
    /// Log-log slope of the partial sums over the trailing half.
    pub growth_exponent_estimate: Option<f64>,
    pub terms: usize,
}

impl DivergenceAssessment {
    pub fn is_certified_divergent(&self) -> bool {
        matches!(
            self.status,
            DivergenceStatus::Certified {
                direction: Direction::Diverges,
                ..
            }
        )
    }
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn divergence_probe(
    terms: &[f64],
    policy: &ProbePolicy,
) -> Result<DivergenceAssessment, ProbeError> {
    let mut acc = CompensatedSum::new();
    let mut partials = Vec::with_capacity(terms.len());
    for (offset, &t) in terms.iter().enumerate() {
        if !t.is_finite() {
            return Err(ProbeError::NonFinite { offset });
        }
        if t < 0.0 {
            return Err(ProbeError::NegativeTerm { offset, value: t });
        }
        acc.add(t);
        partials.push(acc.value());
    }
    let last_partial = partials.last().copied().unwrap_or(0.0);
    let done = |status, g| {
        Ok(DivergenceAssessment {
            status,
            last_partial,
            growth_exponent_estimate: g,
            terms: terms.len(),
        })
    };

    if let Some(lb) = lower_bound_witness(terms) {
        return done(
            DivergenceStatus::Certified {
                direction: Direction::Diverges,
                witness: Witness::LowerBound(lb),
            },
            None,
        );
    }

    let w = policy.ratio_window.max(1);
    if terms.len() > w {
        let tail = &terms[terms.len() - w - 1..];
        if tail.iter().all(|t| *t == 0.0) {
            return done(
                DivergenceStatus::ConvergesSuggested {
                    tail_bound: Some(0.0),
                },
                None,
            );
        }
        if tail.iter().all(|t| *t > 0.0) {
            let rho = tail
                .windows(2)
                .map(|p| p[1] / p[0])
                .fold(0.0, f64::max);
            if rho <= policy.rho_max {
                let last = tail[w];
                return done(
                    DivergenceStatus::ConvergesSuggested {
                        tail_bound: Some(last * rho / (1.0 - rho)),
                    },
                    None,
                );
            }
        }
    }

    let half = terms.len() / 2;
    let (xs, ys): (Vec<f64>, Vec<f64>) = (half..terms.len())
        .filter(|&i| partials[i] > 0.0)
        .map(|i| (((i + 1) as f64).ln(), partials[i].ln()))
        .unzip();
    let Some(g) = slope(&xs, &ys) else {
        return done(DivergenceStatus::Undecided, None);
    };
    let status = if g >= policy.diverge_slope {
        DivergenceStatus::DivergesSuggested
    } else if g <= policy.converge_slope {
        DivergenceStatus::ConvergesSuggested { tail_bound: None }
    } else {
        DivergenceStatus::Undecided
    };
    done(status, Some(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probe(terms: &[f64]) -> DivergenceAssessment {
        divergence_probe(terms, &ProbePolicy::default()).unwrap()
    }

    #[test]
    fn constant_terms_are_certified() {
        let a = probe(&[1.0; 100]);
        assert!(a.is_certified_divergent());
        assert_eq!(a.last_partial, 100.0);
    }

    #[test]
    fn geometric_terms_converge_with_bound() {
        let terms: Vec<f64> = (1..60).map(|s| 0.5f64.powi(s)).collect();
        let a = probe(&terms);
        let DivergenceStatus::ConvergesSuggested { tail_bound: Some(b) } = a.status else {
            panic!("{a:?}")
        };
        let true_tail = 0.5f64.powi(59);
        assert!(b >= true_tail && b <= 2.0 * true_tail);
    }

    #[test]
    fn harmonic_terms_suggest_divergence() {
        // oracle: H_n = ln n + γ + O(1/n), so d ln H / d ln n ≈ 1/H_n
        let n = 100_000;
        let terms: Vec<f64> = (1..=n).map(|s| 1.0 / s as f64).collect();
        let a = probe(&terms);
        assert_eq!(a.status, DivergenceStatus::DivergesSuggested);
        let h = (n as f64).ln() + 0.577_215_664_901_532_9;
        assert!((a.last_partial - h).abs() < 1e-5);
        let g = a.growth_exponent_estimate.unwrap();
        assert!((g - 1.0 / h).abs() < 0.01, "{g}");
    }

    #[test]
    fn summable_power_law_suggests_convergence() {
        let terms: Vec<f64> = (1..=100_000).map(|s| 1.0 / (s as f64).powi(2)).collect();
        let a = probe(&terms);
        assert_eq!(a.status, DivergenceStatus::ConvergesSuggested { tail_bound: None });
    }

    #[test]
    fn zeros_and_errors() {
        let a = probe(&[0.0; 50]);
        assert_eq!(
            a.status,
            DivergenceStatus::ConvergesSuggested {
                tail_bound: Some(0.0)
            }
        );
        assert!(matches!(
            divergence_probe(&[1.0, -1.0], &ProbePolicy::default()),
            Err(ProbeError::NegativeTerm { offset: 1, .. })
        ));
        assert_eq!(probe(&[]).status, DivergenceStatus::Undecided);
    }
}
