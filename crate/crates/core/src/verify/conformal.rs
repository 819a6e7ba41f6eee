use alloc::vec::Vec;

use super::Verdict;
use crate::error::{check_dim, Result};
use crate::math;
use crate::metric::{riemannian_score, MetricSpec};
use crate::tensor::EvalPoint;

/// Outcome of comparing `F̄` and `F̃` for a conformal change `F̄ = e^{α(x)} F̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalReport {
    pub is_conformal: bool,
    /// `α(x) = ln(F̄/F̃)`, `None` where no sample was admissible.
    pub alpha_per_x: Vec<(Vec<f64>, Option<f64>)>,
    /// Per-`x` relative spread `(max ρ - min ρ)/mean ρ` of `ρ = F̄/F̃` over `y`.
    pub variation: Vec<(Vec<f64>, f64)>,
    pub max_variation: f64,
    /// Largest Cartan torsion entry of `F̄` and of `F̃` over the sample.
    pub cartan_scores: (f64, f64),
    /// Mismatch between `(e^{2α} b̃_ij - b̄_ij)/(1 - e^{2α})` and the fundamental
    /// tensor of `A^{2/m}`; only evaluated for a non-isometric conformal pair
    /// sharing `A`.
    pub m4_residual: Option<f64>,
    pub isometry: bool,
    /// Whether both metrics turned out Riemannian, when the change is a non-isometric conformal one.
    pub rigidity_holds: Option<bool>,
    pub skipped: usize,
    pub evaluated: usize,
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// Samples `ρ = F̄/F̃` on `sample_x × sample_y` and, for a non-isometric
/// conformal change, tests that both metrics are Riemannian.
///
/// The verdict passes when the metrics are not conformal, when the change is
/// an isometry, or when the rigidity conclusion holds.
pub fn conformal_check(
    bar: &MetricSpec,
    tilde: &MetricSpec,
    sample_x: &[Vec<f64>],
    sample_y: &[Vec<f64>],
    tolerance: f64,
) -> Result<ConformalReport> {
    let n = bar.dimension();
    check_dim(n, tilde.dimension())?;
    let mut alpha_per_x = Vec::new();
    let mut variation = Vec::new();
    let mut good_points: Vec<(EvalPoint, f64)> = Vec::new();
    let mut skipped = 0usize;
    for x in sample_x {
        check_dim(n, x.len())?;
        let lb = bar.local(x)?;
        let lt = tilde.local(x)?;
        let mut ratios = Vec::new();
        for y in sample_y {
            let pt = EvalPoint::new(x.clone(), y.clone())?;
            match lb.f2(y).and_then(|fb| lt.f2(y).map(|ft| math::sqrt(fb / ft))) {
                Ok(r) => {
                    ratios.push(r);
                    good_points.push((pt, r));
                }
                Err(_) => skipped += 1,
            }
        }
        if ratios.is_empty() {
            alpha_per_x.push((x.clone(), None));
            continue;
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let hi = ratios.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b));
        let lo = ratios.iter().fold(f64::INFINITY, |a, b| a.min(*b));
        variation.push((x.clone(), (hi - lo) / mean));
        alpha_per_x.push((x.clone(), Some(math::ln(mean))));
    }
    let evaluated = good_points.len();
    let inconclusive = evaluated == 0 || 2 * skipped > evaluated + skipped;

    let max_variation = variation.iter().fold(0.0, |a: f64, (_, v)| a.max(*v));
    let is_conformal = !inconclusive && max_variation <= tolerance;

    let mut cartan = (0.0f64, 0.0f64);
    for (pt, _) in &good_points {
        cartan.0 = cartan.0.max(riemannian_score(bar, pt)?);
        cartan.1 = cartan.1.max(riemannian_score(tilde, pt)?);
    }

    let max_alpha = alpha_per_x.iter().filter_map(|(_, a)| *a).fold(0.0, |acc: f64, a| acc.max(math::abs(a)));
    let isometry = max_alpha <= tolerance;

    let mut m4_residual = None;
    let mut rigidity_holds = None;
    if is_conformal && !isometry {
        if bar.a() == tilde.a() {
            let root = bar.root();
            let mut worst: f64 = 0.0;
            for (pt, rho) in &good_points {
                let e2a = rho * rho;
                if math::abs(1.0 - e2a) <= tolerance {
                    continue;
                }
                let bb = bar.b_matrix(&pt.x);
                let bt = tilde.b_matrix(&pt.x);
                let g = root.local(&pt.x)?.fundamental_tensor(&pt.y)?;
                let rec = bt.scale(e2a).sub(&bb).scale(1.0 / (1.0 - e2a));
                worst = worst.max(rec.sub(&g).max_abs() / g.max_abs().max(1.0));
            }
            m4_residual = Some(worst);
        }
        let riemannian = cartan.0 <= tolerance && cartan.1 <= tolerance;
        rigidity_holds = Some(riemannian && m4_residual.map_or(true, |r| r <= tolerance));
    }

    let verdict = if inconclusive {
        Verdict::Inconclusive
    } else if rigidity_holds == Some(false) {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    Ok(ConformalReport {
        is_conformal,
        alpha_per_x,
        variation,
        max_variation,
        cartan_scores: cartan,
        m4_residual,
        isometry,
        rigidity_holds,
        skipped,
        evaluated,
        tolerance,
        verdict,
    })
}
