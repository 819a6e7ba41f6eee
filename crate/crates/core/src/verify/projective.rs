use alloc::vec::Vec;

use super::Residual;
use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::math;
use crate::metric::{MetricKind, MetricSpec, RANK_ONE_UPDATE_TOL};
use crate::spray::{local_dual_flat_forms, spray_coefficients};
use crate::tensor::EvalPoint;

/// Which metric raises the index of `d` in `d^k = g^{lk} d_l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpretation {
    /// `g` is the fundamental tensor of the m-th root metric `F`.
    #[default]
    Root,
    /// `g` is the fundamental tensor of the generalized metric `F̄`.
    Bar,
}

impl Interpretation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Interpretation::Root => "paper",
            Interpretation::Bar => "gbar",
        }
    }
}

/// `F̄ = (A^{2/m} + c_i d_j y^i y^j)^{1/2}` together with `F = A^{1/m}`.
#[derive(Debug, Clone, Copy)]
pub struct RankOnePair<'a> {
    bar: &'a MetricSpec,
    root: &'a MetricSpec,
}

impl<'a> RankOnePair<'a> {
    pub fn new(bar: &'a MetricSpec, root: &'a MetricSpec) -> Result<RankOnePair<'a>> {
        if !matches!(bar.kind(), MetricKind::GeneralizedRank1 { .. }) {
            return Err(Error::WrongKind("first metric of the pair must be a rank-one generalized m-th root metric"));
        }
        if !matches!(root.kind(), MetricKind::MRoot { .. }) {
            return Err(Error::WrongKind("second metric of the pair must be an m-th root metric"));
        }
        if bar.a() != root.a() {
            return Err(Error::WrongKind("the pair must share the same form A"));
        }
        Ok(RankOnePair { bar, root })
    }

    pub fn bar(&self) -> &MetricSpec {
        self.bar
    }

    pub fn root(&self) -> &MetricSpec {
        self.root
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Pointwise ingredients shared by the pair conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTerms {
    pub m: f64,
    pub a: f64,
    pub a_grad: Vec<f64>,
    pub a_inv: Matrix,
    /// `Δ_k`
    pub delta: Vec<f64>,
    /// `𝔅_l = B_{0l} - B_{x^l}`
    pub frak_b: Vec<f64>,
    /// `𝔉_l = (F²)_{x^k y^l} y^k - (F²)_{x^l}` for the m-th root metric.
    pub frak_f: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    /// `d^k`
    pub d_up: Vec<f64>,
}

impl PairTerms {
    pub fn compute(pair: &RankOnePair<'_>, pt: &EvalPoint, interpretation: Interpretation) -> Result<PairTerms> {
        let n = pair.root.dimension();
        check_dim(n, pt.dimension())?;
        let root = pair.root.local(&pt.x)?;
        let bar = pair.bar.local(&pt.x)?;
        let (a, _) = root.admissible_values(&pt.y)?;
        bar.admissible_values(&pt.y)?;
        let rb = root.blocks(&pt.y)?;
        let bb = bar.blocks(&pt.y)?;
        let a_inv = rb.a_hess.invert()?.inverse;
        let g = match interpretation {
            Interpretation::Root => root.fundamental_tensor(&pt.y)?,
            Interpretation::Bar => bar.fundamental_tensor(&pt.y)?,
        };
        let g_inv = g.invert()?.inverse;
        let form = pair.bar.rank_one().expect("validated rank-one pair");
        let c = form.c_at(&pt.x);
        let d = form.d_at(&pt.x);
        let d_up = g_inv.mul_vec(&d);
        let frak_f = local_dual_flat_forms(&root, &pt.y)?.spray_bracket();
        let frak_b = (0..n).map(|l| bb.b_0l[l] - bb.b_dx[l]).collect();
        let m = pair.root.m() as f64;
        let q = 2.0 / m;
        let pre = math::powf(a, q - 2.0) / m;
        let delta = (0..n)
            .map(|k| pre * ((q - 1.0) * rb.a_grad[k] * rb.a_0 + a * rb.a_0l[k] - a * rb.a_dx[k]))
            .collect();
        Ok(PairTerms { m, a, a_grad: rb.a_grad, a_inv, delta, frak_b, frak_f, c, d, d_up })
    }

    /// `1 + c_k d^k`
    pub fn denominator(&self) -> f64 {
        1.0 + dot(&self.c, &self.d_up)
    }
}

/// `Δ_k = (A^{2/m-2}/m)[(2/m-1) A_k A_0 + A A_{0k} - A A_{x^k}]`, computed from `A` alone.
pub fn delta_k(spec: &MetricSpec, pt: &EvalPoint) -> Result<Vec<f64>> {
    check_dim(spec.dimension(), pt.dimension())?;
    let local = spec.root().local(&pt.x)?;
    let (a, _) = local.admissible_values(&pt.y)?;
    let blk = local.blocks(&pt.y)?;
    let m = spec.m() as f64;
    let q = 2.0 / m;
    let pre = math::powf(a, q - 2.0) / m;
    Ok((0..spec.dimension())
        .map(|k| pre * ((q - 1.0) * blk.a_grad[k] * blk.a_0 + a * blk.a_0l[k] - a * blk.a_dx[k]))
        .collect())
}

/// `(1 + c_k d^k) A^{ij} 𝔅_j - d^k[2Δ_k + 𝔅_k] A^{ij} c_j`.
pub fn pair_condition_residual(pair: &RankOnePair<'_>, pt: &EvalPoint, interpretation: Interpretation) -> Result<Residual> {
    let t = PairTerms::compute(pair, pt, interpretation)?;
    let ab = t.a_inv.mul_vec(&t.frak_b);
    let ac = t.a_inv.mul_vec(&t.c);
    let s: f64 = (0..t.c.len()).map(|k| t.d_up[k] * (2.0 * t.delta[k] + t.frak_b[k])).sum();
    let first: Vec<f64> = ab.iter().map(|v| t.denominator() * v).collect();
    let second: Vec<f64> = ac.iter().map(|v| s * v).collect();
    let value = first.iter().zip(&second).map(|(p, q)| p - q).collect();
    Ok(Residual::new(value, &[&first, &second]))
}

/// `m A^{(m-2)/m} A^{il} 𝔅_l - [4Υ + k d^l 𝔅_l] 𝒜^i` with `k = 1/(1 + c_m d^m)`,
/// `Υ = (k/4) d^j 𝔉_j` and `𝒜^i = m A^{(m-2)/m} A^{ij} c_j`.
pub fn spray_gap_residual(pair: &RankOnePair<'_>, pt: &EvalPoint, interpretation: Interpretation) -> Result<Residual> {
    let t = PairTerms::compute(pair, pt, interpretation)?;
    let denominator = t.denominator();
    if !(math::abs(denominator) > RANK_ONE_UPDATE_TOL) {
        return Err(Error::DegeneratePair { denominator });
    }
    let k = 1.0 / denominator;
    let upsilon = 0.25 * k * dot(&t.d_up, &t.frak_f);
    let pre = t.m * math::powf(t.a, (t.m - 2.0) / t.m);
    let first: Vec<f64> = t.a_inv.mul_vec(&t.frak_b).iter().map(|v| pre * v).collect();
    let coef = 4.0 * upsilon + k * dot(&t.d_up, &t.frak_b);
    let second: Vec<f64> = t.a_inv.mul_vec(&t.c).iter().map(|v| coef * pre * v).collect();
    let value = first.iter().zip(&second).map(|(p, q)| p - q).collect();
    Ok(Residual::new(value, &[&first, &second]))
}

/// `2 A^{2/m-2} (d^i c_i) d^j[(2/m-1) A_j A_0 + A A_{0j} - A A_{x^j}] - m d^i 𝔅_i`.
pub fn nondegeneracy_value(pair: &RankOnePair<'_>, pt: &EvalPoint, interpretation: Interpretation) -> Result<f64> {
    let t = PairTerms::compute(pair, pt, interpretation)?;
    // the bracket equals m A^{2-2/m} Δ_j
    let q = 2.0 / t.m;
    let bracket: Vec<f64> = t.delta.iter().map(|v| t.m * math::powf(t.a, 2.0 - q) * v).collect();
    Ok(2.0 * math::powf(t.a, q - 2.0) * dot(&t.d_up, &t.c) * dot(&t.d_up, &bracket) - t.m * dot(&t.d_up, &t.frak_b))
}

/// The split of the pair condition into four componentwise identities.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitDiagnostics {
    /// `(d^l 𝔉_l) A^{ip} c_p - A^{il} 𝔅_l`
    pub lifted_f: Residual,
    /// `(d^j c_j) A^{il} 𝔅_l - (d^l 𝔅_l) A^{ij} c_j`
    pub lifted_b: Residual,
    /// `𝔅_s - (d^l 𝔉_l) c_s`
    pub lowered_f: Residual,
    /// `(d^j c_j) 𝔅_s - (d^l 𝔅_l) c_s`
    pub lowered_b: Residual,
}

pub fn split_diagnostics(
    pair: &RankOnePair<'_>,
    pt: &EvalPoint,
    interpretation: Interpretation,
) -> Result<SplitDiagnostics> {
    let t = PairTerms::compute(pair, pt, interpretation)?;
    let df = dot(&t.d_up, &t.frak_f);
    let db = dot(&t.d_up, &t.frak_b);
    let dc = dot(&t.d_up, &t.c);
    let ab = t.a_inv.mul_vec(&t.frak_b);
    let ac = t.a_inv.mul_vec(&t.c);
    let diff = |u: &[f64], su: f64, v: &[f64], sv: f64| {
        let p: Vec<f64> = u.iter().map(|x| su * x).collect();
        let q: Vec<f64> = v.iter().map(|x| sv * x).collect();
        let value = p.iter().zip(&q).map(|(a, b)| a - b).collect();
        Residual::new(value, &[&p, &q])
    };
    Ok(SplitDiagnostics {
        lifted_f: diff(&ac, df, &ab, 1.0),
        lifted_b: diff(&ab, dc, &ac, db),
        lowered_f: diff(&t.frak_b, 1.0, &t.c, df),
        lowered_b: diff(&t.frak_b, dc, &t.c, db),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveCheck {
    pub is_projective: bool,
    /// Least-squares `P` in `Ḡ^i - G^i ≈ P y^i`.
    pub p: f64,
    /// `max_{i<j} |Δ^i y^j - Δ^j y^i|` over `max(1, |Ḡ|, |G|)·|y|`.
    pub cross_residual: f64,
    pub difference: Vec<f64>,
}

/// Compares the sprays of two metrics at a point.
pub fn projective_check(spec1: &MetricSpec, spec2: &MetricSpec, pt: &EvalPoint, tolerance: f64) -> Result<ProjectiveCheck> {
    check_dim(spec1.dimension(), spec2.dimension())?;
    let g1 = spray_coefficients(spec1, pt)?;
    let g2 = spray_coefficients(spec2, pt)?;
    let diff: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| a - b).collect();
    let y = &pt.y;
    let n = y.len();
    let mut cross: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            cross = cross.max(math::abs(diff[i] * y[j] - diff[j] * y[i]));
        }
    }
    let scale = math::max_abs(&g1).max(math::max_abs(&g2)).max(1.0) * math::max_abs(y);
    let cross_residual = cross / scale;
    let p = dot(&diff, y) / dot(y, y);
    if !cross_residual.is_finite() || !p.is_finite() {
        return Err(Error::NonFinite("projective comparison"));
    }
    Ok(ProjectiveCheck { is_projective: cross_residual <= tolerance, p, cross_residual, difference: diff })
}
