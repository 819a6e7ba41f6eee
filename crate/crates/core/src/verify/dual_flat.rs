use alloc::vec::Vec;

use super::{Residual, ResidualReport};
use crate::error::{check_dim, Result};
use crate::jet::JetLayout;
use crate::math;
use crate::metric::MetricSpec;
use crate::spray::dual_flat_forms;
use crate::tensor::EvalPoint;

/// Attached to every dual-flatness report: the residual checks cannot
/// decide irreducibility of `A`, they only record the caller's assertion.
pub const IRREDUCIBILITY_DISCLAIMER: &str =
    "irreducibility of A is asserted by the caller and not verified numerically";

/// `R_l = (F²)_{x^k y^l} y^k - 2 (F²)_{x^l}`.
pub fn dual_flat_residual(spec: &MetricSpec, pt: &EvalPoint) -> Result<Residual> {
    let forms = dual_flat_forms(spec, pt)?;
    let twice: Vec<f64> = forms.rhs.iter().map(|v| 2.0 * v).collect();
    let value = forms.lhs.iter().zip(&twice).map(|(a, b)| a - b).collect();
    Ok(Residual::new(value, &[&forms.lhs, &twice]))
}

/// `A_{x^l} - (1/2A)[(2/m-1) A_0 A_l + A A_{0l} + (m/2) A^{(2m-2)/m}(B_{0l} - 2B_{x^l})]`.
///
/// Equal to `-(m/4) A^{1-2/m}` times [`dual_flat_residual`], so the two vanish together.
pub fn reduced_dual_flat_residual(spec: &MetricSpec, pt: &EvalPoint) -> Result<Residual> {
    check_dim(spec.dimension(), pt.dimension())?;
    let local = spec.local(&pt.x)?;
    let (a, _) = local.admissible_values(&pt.y)?;
    let blk = local.blocks(&pt.y)?;
    let m = spec.m() as f64;
    let pw = math::powf(a, (2.0 * m - 2.0) / m);
    let n = spec.dimension();
    let bracket: Vec<f64> = (0..n)
        .map(|l| {
            ((2.0 / m - 1.0) * blk.a_0 * blk.a_grad[l]
                + a * blk.a_0l[l]
                + 0.5 * m * pw * (blk.b_0l[l] - 2.0 * blk.b_dx[l]))
                / (2.0 * a)
        })
        .collect();
    let value = (0..n).map(|l| blk.a_dx[l] - bracket[l]).collect();
    Ok(Residual::new(value, &[&blk.a_dx, &bracket]))
}

/// Recovered 1-form `θ = θ_l(x) y^l` with `θ = A_0/A`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaRecovery {
    /// `(x, θ_l)` averaged over the admissible `y` samples at each `x`.
    pub theta_l: Vec<(Vec<f64>, Vec<f64>)>,
    /// Largest deviation of the pointwise `θ_l` from its per-`x` mean.
    pub linearity_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualFlatConditions {
    pub b_condition: ResidualReport,
    pub theta: ThetaRecovery,
    pub a_condition: ResidualReport,
    pub irreducible_asserted: bool,
}

impl DualFlatConditions {
    pub fn verdict(&self) -> super::Verdict {
        self.b_condition.verdict.worst(self.a_condition.verdict)
    }
}

/// Checks `B_{0l} = 2B_{x^l}` and `A_{x^l} = (1/3m)[m A θ_l + 2 θ A_l]` over
/// the grid `sample_x × sample_y`, recovering `θ` from `A_0 = θ A`.
///
/// Points where `F` is inadmissible are skipped; the verdicts become
/// inconclusive when more than half the grid is skipped.
pub fn dual_flat_conditions(
    spec: &MetricSpec,
    sample_x: &[Vec<f64>],
    sample_y: &[Vec<f64>],
    tolerance: f64,
    irreducible_asserted: bool,
) -> Result<DualFlatConditions> {
    let n = spec.dimension();
    let m = spec.m() as f64;
    let layout = JetLayout::new(n, 1);
    let mut b_condition = Vec::new();
    let mut b_skipped = Vec::new();
    let mut a_condition = Vec::new();
    let mut a_skipped = Vec::new();
    let mut theta_l = Vec::new();
    let mut linearity: f64 = 0.0;

    for x in sample_x {
        check_dim(n, x.len())?;
        let local = spec.local(x)?;
        let mut good = Vec::new();
        for y in sample_y {
            let pt = EvalPoint::new(x.clone(), y.clone())?;
            let outcome = local.admissible_values(y).and_then(|(a, _)| {
                let blk = local.blocks(y)?;
                let jb = local.jet_blocks(&layout, y)?;
                let theta = &jb.a_0 * &jb.a.recip()?;
                let tl = (0..n).map(|l| theta.derivative(&[l])).collect::<Result<Vec<f64>>>()?;
                Ok((a, blk, tl))
            });
            match outcome {
                Ok(v) => good.push((pt, v)),
                Err(e) => {
                    b_skipped.push((pt.clone(), alloc::string::ToString::to_string(&e)));
                    a_skipped.push((pt, alloc::string::ToString::to_string(&e)));
                }
            }
        }
        if good.is_empty() {
            continue;
        }
        let mut mean = alloc::vec![0.0; n];
        for (_, (_, _, tl)) in &good {
            for l in 0..n {
                mean[l] += tl[l];
            }
        }
        for v in &mut mean {
            *v /= good.len() as f64;
        }
        let mean_scale = math::max_abs(&mean).max(1.0);
        for (pt, (a, blk, tl)) in good {
            let dev = tl.iter().zip(&mean).fold(0.0, |acc: f64, (p, q)| acc.max(math::abs(p - q)));
            linearity = linearity.max(dev / mean_scale);

            let twice: Vec<f64> = blk.b_dx.iter().map(|v| 2.0 * v).collect();
            let r1: Vec<f64> = blk.b_0l.iter().zip(&twice).map(|(p, q)| p - q).collect();
            b_condition.push((pt.clone(), Residual::new(r1, &[&blk.b_0l, &twice]).norm()));

            let theta: f64 = mean.iter().zip(&pt.y).map(|(t, y)| t * y).sum();
            let rhs: Vec<f64> =
                (0..n).map(|l| (m * a * mean[l] + 2.0 * theta * blk.a_grad[l]) / (3.0 * m)).collect();
            let r2: Vec<f64> = blk.a_dx.iter().zip(&rhs).map(|(p, q)| p - q).collect();
            a_condition.push((pt, Residual::new(r2, &[&blk.a_dx, &rhs]).norm()));
        }
        theta_l.push((x.clone(), mean));
    }

    Ok(DualFlatConditions {
        b_condition: ResidualReport::assemble("b-condition", tolerance, b_condition, b_skipped),
        theta: ThetaRecovery { theta_l, linearity_residual: linearity },
        a_condition: ResidualReport::assemble("a-condition", tolerance, a_condition, a_skipped),
        irreducible_asserted,
    })
}
