//! Machine-readable run reports.
//!
//! JSON reports carry `schema_version = 1` and write every float with 17
//! significant digits (`{:.16e}`); non-finite values become `null`. CSV
//! evidence uses the same number formatting, so both outputs contain the same
//! decimal strings.

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::config::RunConfig;
use crate::criteria::{CriterionId, CriterionVerdict};
use crate::equation::ValidationReport;
use crate::solver::{PositiveWindowReport, TrajectoryClass, TrajectoryStatus};
use crate::tail::FormClass;
use crate::transform::CoefficientSample;

pub const SCHEMA_VERSION: u32 = 1;

/// Formats a float with 17 significant digits.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StageOutcome<T> {
    Ok(T),
    Error { message: String },
}

impl<T> StageOutcome<T> {
    pub fn from_result<E: std::fmt::Display>(r: Result<T, E>) -> Self {
        match r {
            Ok(v) => StageOutcome::Ok(v),
            Err(e) => StageOutcome::Error {
                message: e.to_string(),
            },
        }
    }

    pub fn ok(&self) -> Option<&T> {
        match self {
            StageOutcome::Ok(v) => Some(v),
            StageOutcome::Error { .. } => None,
        }
    }

    pub fn is_error(&self) -> bool {
        matches!(self, StageOutcome::Error { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrawSummary {
    pub seed: u64,
    pub count: usize,
    pub low: f64,
    pub high: f64,
    pub by_class: BTreeMap<String, usize>,
    pub inconclusive_fraction: f64,
    /// Completed draws that settled to one sign with `|x|` above tolerance.
    pub definite_sign: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationOutcome {
    pub start_index: i64,
    pub end_index: i64,
    pub status: TrajectoryStatus,
    pub class: StageOutcome<TrajectoryClass>,
    /// Largest stencil residual of the computed trajectory.
    pub residual: StageOutcome<f64>,
    pub x: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positive_window_check: Option<StageOutcome<PositiveWindowReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub draws: Option<DrawSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformOutcome {
    pub theta_certified: bool,
    pub samples: Vec<CoefficientSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionEntry {
    pub criterion: CriterionId,
    pub outcome: StageOutcome<CriterionVerdict>,
}

/// One row of a claimed-versus-computed table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub quantity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<i64>,
    pub claimed: String,
    pub computed: Option<f64>,
    pub abs_difference: Option<f64>,
    pub tolerance: Option<f64>,
    pub agrees: bool,
}

impl Comparison {
    pub fn numeric(quantity: &str, zeta: Option<i64>, claimed: f64, computed: Option<f64>, tol: f64) -> Self {
        let diff = computed.map(|c| (c - claimed).abs());
        Self {
            quantity: quantity.into(),
            zeta,
            claimed: format_number(claimed),
            computed,
            abs_difference: diff,
            tolerance: Some(tol),
            agrees: diff.is_some_and(|d| d <= tol),
        }
    }

    pub fn qualitative(quantity: &str, claimed: &str, computed: Option<f64>, agrees: bool) -> Self {
        Self {
            quantity: quantity.into(),
            zeta: None,
            claimed: claimed.into(),
            computed,
            abs_difference: None,
            tolerance: None,
            agrees,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub id: String,
    pub description: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Stages {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<StageOutcome<ValidationReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<StageOutcome<FormClass>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<StageOutcome<SimulationOutcome>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub criteria: Vec<CriterionEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transform: Option<StageOutcome<TransformOutcome>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    /// Seconds since the Unix epoch; the only field that differs between
    /// repeated runs.
    pub timestamp: u64,
    /// Seed of every random draw made by the run.
    pub seed: u64,
    pub source: String,
    pub config: RunConfig,
    pub stages: Stages,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<Comparison>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub discrepancies: Vec<Discrepancy>,
}

/// Pretty JSON with floats at 17 significant digits.
struct NumberFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for NumberFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_number(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes any value with the report number format.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, NumberFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report values serialize");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

pub const EVIDENCE_COLUMNS: [&str; 5] = ["criterion_id", "zeta", "term", "partial_sum", "running_value"];

impl Report {
    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn verdicts(&self) -> impl Iterator<Item = &CriterionVerdict> {
        self.stages.criteria.iter().filter_map(|c| c.outcome.ok())
    }

    pub fn verdict(&self, id: CriterionId) -> Option<&CriterionVerdict> {
        self.verdicts().find(|v| v.criterion == id)
    }

    /// Criterion evidence as CSV.
    pub fn evidence_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(EVIDENCE_COLUMNS).expect("in-memory write");
        for v in self.verdicts() {
            for row in &v.evidence {
                w.write_record([
                    v.criterion.as_str().to_string(),
                    row.zeta.to_string(),
                    format_number(row.term),
                    format_number(row.partial_sum),
                    format_number(row.running_value),
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }

    /// The simulated trajectory as `zeta,x` CSV; header only without one.
    pub fn trajectory_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["zeta", "x"]).expect("in-memory write");
        if let Some(StageOutcome::Ok(sim)) = &self.stages.simulation {
            for (i, x) in sim.x.iter().enumerate() {
                w.write_record([(sim.start_index + i as i64).to_string(), format_number(*x)])
                    .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }

    /// Whether any stage or criterion recorded an error.
    pub fn has_stage_errors(&self) -> bool {
        let s = &self.stages;
        s.validation.as_ref().is_some_and(|o| o.is_error())
            || s.classification.as_ref().is_some_and(|o| o.is_error())
            || s.simulation.as_ref().is_some_and(|o| o.is_error())
            || s.transform.as_ref().is_some_and(|o| o.is_error())
            || s.criteria.iter().any(|c| c.outcome.is_error())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_seventeen_digits() {
        assert_eq!(format_number(1.0), "1.0000000000000000e0");
        assert_eq!(format_number(-0.1), "-1.0000000000000001e-1");
        let json = to_json(&vec![0.1, f64::NAN, 3.0]);
        let back: Vec<Option<f64>> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![Some(0.1), None, Some(3.0)]);
        assert!(json.contains("1.0000000000000001e-1"));
    }

    #[test]
    fn round_trip_is_exact() {
        for v in [std::f64::consts::PI, 1e-300, 123456789.12345679, 7.559526299369239] {
            assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
        }
    }
}
