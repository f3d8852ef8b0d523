//! Run configuration files.
//!
//! ```toml
//! [equation]
//! r = "2^(z/3)"
//! q = "2*2^z"
//! alpha = "1/3"
//! sigma = 1
//! form = "delay"            # or "delay_plus_one"
//! zeta0 = 1
//! theta_closed_form = "2^(1-z)"   # optional
//!
//! [simulate]
//! init = [0.5, -0.2, 0.1]   # sigma + 2 values starting at zeta0 - sigma
//! horizon = 40
//! tol = 1e-6
//!
//! [check]
//! criteria = "all"          # or ["Thm21", "Thm23"]
//! horizon = 200
//!
//! [transform]
//! sample_to = 30
//!
//! [output]
//! format = "json"           # or "csv"
//! path = "report.json"
//! ```

use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
pub use toml::Spanned;

use crate::criteria::{CriterionId, DEFAULT_HORIZON};
use crate::equation::{DelayForm, HalfLinearEquation, ModelError};
use crate::exponent::RationalExponent;
use crate::sequence::Sequence;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl ConfigError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ConfigError::Parse { line, .. } => Some(*line),
            ConfigError::Io { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormName {
    Delay,
    DelayPlusOne,
}

impl From<FormName> for DelayForm {
    fn from(f: FormName) -> Self {
        match f {
            FormName::Delay => DelayForm::MinusSigma,
            FormName::DelayPlusOne => DelayForm::MinusSigmaPlusOne,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationConfig {
    pub r: Spanned<String>,
    pub q: Spanned<String>,
    pub alpha: Spanned<String>,
    pub sigma: Spanned<u32>,
    pub form: Spanned<FormName>,
    pub zeta0: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_closed_form: Option<Spanned<String>>,
}

fn default_sim_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub init: Spanned<Vec<f64>>,
    pub horizon: Spanned<i64>,
    #[serde(default = "default_sim_tol")]
    pub tol: f64,
    /// Entries ignored by the classifier; defaults to 20% of the trajectory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
    /// Extra trajectories from initial data drawn uniformly from
    /// `[draw_low, draw_high]`, seeded by `seed`.
    #[serde(default)]
    pub draws: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_draw_low")]
    pub draw_low: f64,
    #[serde(default = "default_draw_high")]
    pub draw_high: f64,
}

fn default_draw_low() -> f64 {
    -1.0
}

fn default_draw_high() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CriteriaSelection {
    Keyword(String),
    List(Vec<String>),
}

fn default_check_horizon() -> i64 {
    DEFAULT_HORIZON
}

fn default_selection() -> Spanned<CriteriaSelection> {
    Spanned::new(0..0, CriteriaSelection::Keyword("all".into()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    #[serde(default = "default_selection")]
    pub criteria: Spanned<CriteriaSelection>,
    #[serde(default = "default_check_horizon")]
    pub horizon: i64,
    /// Overrides ζ₁.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<i64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformConfig {
    /// Last index of the sampled r̃, q̃ table; defaults to ζ₀ + 20.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_to: Option<i64>,
    /// Accept an uncertified numeric θ.
    #[serde(default)]
    pub allow_estimated_theta: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub equation: EquationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

/// 1-based line and column of a byte offset.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn at(text: &str, span: Range<usize>, message: impl Into<String>) -> ConfigError {
    let (line, column) = position(text, span.start);
    ConfigError::Parse {
        line,
        column,
        message: message.into(),
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// Parses and validates a configuration. Errors carry the line of the
    /// offending key or value.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let span = e.span().unwrap_or(0..0);
            at(text, span, e.message().trim().to_string())
        })?;
        cfg.check_consistency(text)?;
        Ok(cfg)
    }

    fn check_consistency(&self, text: &str) -> Result<(), ConfigError> {
        let eq = &self.equation;
        for (name, expr) in [("r", &eq.r), ("q", &eq.q)]
            .into_iter()
            .chain(eq.theta_closed_form.as_ref().map(|t| ("theta_closed_form", t)))
        {
            if let Err(e) = Sequence::parse(expr.get_ref()) {
                return Err(at(text, expr.span(), format!("{name}: {e}")));
            }
        }
        if let Err(e) = eq.alpha.get_ref().parse::<RationalExponent>() {
            return Err(at(text, eq.alpha.span(), format!("alpha: {e}")));
        }
        if *eq.form.get_ref() == FormName::DelayPlusOne && *eq.sigma.get_ref() == 0 {
            return Err(at(
                text,
                eq.sigma.span(),
                "sigma must be at least 1 for form = \"delay_plus_one\"",
            ));
        }
        if let Some(sim) = &self.simulate {
            let want = *eq.sigma.get_ref() as usize + 2;
            let got = sim.init.get_ref().len();
            if got != want {
                return Err(at(
                    text,
                    sim.init.span(),
                    format!("init needs sigma + 2 = {want} values, got {got}"),
                ));
            }
            if sim.draws > 0 && !(sim.draw_low < sim.draw_high) {
                return Err(at(text, sim.init.span(), "draw_low must be below draw_high"));
            }
            if *sim.horizon.get_ref() <= eq.zeta0 + 1 {
                return Err(at(
                    text,
                    sim.horizon.span(),
                    format!("horizon must exceed zeta0 + 1 = {}", eq.zeta0 + 1),
                ));
            }
        }
        if let Some(check) = &self.check {
            if let Err(e) = self.criteria_from(check) {
                return Err(at(text, check.criteria.span(), e));
            }
        }
        Ok(())
    }

    fn criteria_from(&self, check: &CheckConfig) -> Result<Vec<CriterionId>, String> {
        match check.criteria.get_ref() {
            CriteriaSelection::Keyword(k) if k.eq_ignore_ascii_case("all") => Ok(self.all_criteria()),
            CriteriaSelection::Keyword(k) => Ok(vec![k.parse()?]),
            CriteriaSelection::List(items) => items.iter().map(|s| s.parse()).collect(),
        }
    }

    /// Criteria applicable to the configured equation form.
    pub fn all_criteria(&self) -> Vec<CriterionId> {
        applicable_criteria(self.delay_form(), self.alpha())
    }

    /// The selected criteria (validated at load time).
    pub fn criteria(&self) -> Vec<CriterionId> {
        self.check
            .as_ref()
            .map(|c| self.criteria_from(c).expect("validated on load"))
            .unwrap_or_default()
    }

    pub fn delay_form(&self) -> DelayForm {
        (*self.equation.form.get_ref()).into()
    }

    pub fn alpha(&self) -> RationalExponent {
        self.equation.alpha.get_ref().parse().expect("validated on load")
    }

    pub fn build_equation(&self) -> Result<HalfLinearEquation, ModelError> {
        let e = &self.equation;
        let parse = |s: &Spanned<String>| Sequence::parse(s.get_ref()).expect("validated on load");
        let eq = HalfLinearEquation::new(
            parse(&e.r),
            parse(&e.q),
            self.alpha(),
            *e.sigma.get_ref(),
            self.delay_form(),
            e.zeta0,
        )?;
        Ok(match &e.theta_closed_form {
            Some(t) => eq.with_theta_closed_form(parse(t)),
            None => eq,
        })
    }

    pub fn output(&self) -> OutputConfig {
        self.output.clone().unwrap_or_default()
    }
}

/// The criteria whose hypotheses match the equation's form: the delay-form
/// criteria, or the canonical comparison for the delay-plus-one form with
/// `α ≥ 1`. The Σq criterion applies to both.
pub fn applicable_criteria(form: DelayForm, alpha: RationalExponent) -> Vec<CriterionId> {
    match form {
        DelayForm::MinusSigma => CriterionId::EQUATION_CRITERIA.to_vec(),
        DelayForm::MinusSigmaPlusOne => {
            let mut v = vec![CriterionId::Lem21, CriterionId::Thm23];
            if alpha.is_at_least_one() {
                v.push(CriterionId::CanonicalSumQ);
            }
            v
        }
    }
}
