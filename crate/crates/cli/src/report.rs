//! JSON run reports. Field order and float formatting are fixed, so equal
//! inputs give byte-identical output.

use finsler_core::verify::{ResidualReport, Verdict};
use serde::Serialize;
use serde_json::Value;

use crate::sampling::SampleSummary;

pub const TOOL_NAME: &str = "finsler";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Number of worst points listed per check.
pub const WORST_POINTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResidual {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub verdict: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
    pub evaluated: usize,
    pub skipped: usize,
    /// Reported for context only; does not enter the run verdict.
    pub informational: bool,
    pub worst_points: Vec<PointResidual>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_skip_reason: Option<String>,
}

impl CheckReport {
    pub fn from_residuals(report: &ResidualReport, informational: bool) -> CheckReport {
        CheckReport {
            name: report.name.clone(),
            verdict: report.verdict.as_str(),
            max_residual: report.max_residual,
            tolerance: report.tolerance,
            evaluated: report.per_point.len(),
            skipped: report.skipped.len(),
            informational,
            worst_points: report
                .worst(WORST_POINTS)
                .into_iter()
                .map(|(p, r)| PointResidual { x: p.x, y: p.y, residual: r })
                .collect(),
            first_skip_reason: report.skipped.first().map(|(_, r)| r.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: Tool,
    pub command: Value,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleSummary>,
    pub checks: Vec<CheckReport>,
    /// Command-specific results.
    pub details: Value,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl RunReport {
    pub fn new(command: Value, seed: u64) -> RunReport {
        RunReport {
            tool: Tool { name: TOOL_NAME, version: TOOL_VERSION },
            command,
            seed,
            sample: None,
            checks: Vec::new(),
            details: Value::Null,
            verdict: Verdict::Pass.as_str(),
            timing: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

pub fn verdict_from_str(s: &str) -> Verdict {
    match s {
        "pass" => Verdict::Pass,
        "fail" => Verdict::Fail,
        _ => Verdict::Inconclusive,
    }
}

pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Inconclusive => 2,
    }
}
