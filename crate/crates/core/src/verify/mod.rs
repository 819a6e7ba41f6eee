//! Residual checkers for the three metric conditions: local dual flatness,
//! projective relatedness to the m-th root metric, and conformality.
//!
//! Every condition is a pointwise identity. Verdicts aggregate residuals
//! over a caller-supplied sample with a deterministic max reduction.

mod conformal;
mod dual_flat;
mod projective;

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::Result;
use crate::math;
use crate::tensor::EvalPoint;

pub use conformal::{conformal_check, ConformalReport};
pub use dual_flat::{dual_flat_residual, reduced_dual_flat_residual, dual_flat_conditions, DualFlatConditions, ThetaRecovery, IRREDUCIBILITY_DISCLAIMER};
pub use projective::{
    delta_k, spray_gap_residual, split_diagnostics, nondegeneracy_value, pair_condition_residual, projective_check, Interpretation, SplitDiagnostics,
    PairTerms, ProjectiveCheck, RankOnePair,
};

/// Default tolerance for identity residuals (already scale-normalized).
pub const IDENTITY_TOL: f64 = 1e-8;
/// Default tolerance for checks on constructed families.
pub const FAMILY_TOL: f64 = 1e-6;

/// A residual vector together with the magnitude of the terms it compares.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub value: Vec<f64>,
    pub scale: f64,
}

impl Residual {
    pub(crate) fn new(value: Vec<f64>, terms: &[&[f64]]) -> Residual {
        let scale = terms.iter().fold(0.0, |acc: f64, t| acc.max(math::max_abs(t)));
        Residual { value, scale }
    }

    pub fn max_abs(&self) -> f64 {
        math::max_abs(&self.value)
    }

    /// `max |value| / max(1, scale)`
    pub fn norm(&self) -> f64 {
        self.max_abs() / self.scale.max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    /// The more severe of two verdicts (fail > inconclusive > pass).
    pub fn worst(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub name: String,
    pub per_point: Vec<(EvalPoint, f64)>,
    /// Points where the preconditions failed, with the reason.
    pub skipped: Vec<(EvalPoint, String)>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

fn cmp_points(a: &EvalPoint, b: &EvalPoint) -> Ordering {
    let key = |p: &EvalPoint| p.x.iter().chain(&p.y).copied().collect::<Vec<f64>>();
    key(a).partial_cmp(&key(b)).unwrap_or(Ordering::Equal)
}

fn sanitize(r: f64) -> f64 {
    if r.is_nan() {
        f64::INFINITY
    } else {
        r
    }
}

impl ResidualReport {
    /// Aggregates per-point outcomes. The verdict is inconclusive when more
    /// than half the points failed their preconditions (or there were none),
    /// otherwise pass iff the max residual is within `tolerance`.
    pub fn from_results(name: &str, tolerance: f64, results: Vec<(EvalPoint, Result<f64>)>) -> ResidualReport {
        let (ok, bad): (Vec<_>, Vec<_>) = results.into_iter().partition(|(_, r)| r.is_ok());
        let per_point: Vec<(EvalPoint, f64)> =
            ok.into_iter().map(|(p, r)| (p, sanitize(r.expect("partitioned")))).collect();
        let skipped: Vec<(EvalPoint, String)> =
            bad.into_iter().map(|(p, r)| (p, r.err().expect("partitioned").to_string())).collect();
        ResidualReport::assemble(name, tolerance, per_point, skipped)
    }

    pub fn assemble(
        name: &str,
        tolerance: f64,
        per_point: Vec<(EvalPoint, f64)>,
        skipped: Vec<(EvalPoint, String)>,
    ) -> ResidualReport {
        let max_residual = per_point.iter().fold(0.0, |acc: f64, (_, r)| acc.max(*r));
        let total = per_point.len() + skipped.len();
        let verdict = if per_point.is_empty() || 2 * skipped.len() > total {
            Verdict::Inconclusive
        } else if max_residual <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        ResidualReport { name: name.to_string(), per_point, skipped, max_residual, tolerance, verdict }
    }

    /// The `k` largest residuals, ties broken by lexicographic point order.
    pub fn worst(&self, k: usize) -> Vec<(EvalPoint, f64)> {
        let mut sorted = self.per_point.clone();
        sorted.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| cmp_points(&a.0, &b.0)));
        sorted.truncate(k);
        sorted
    }
}
