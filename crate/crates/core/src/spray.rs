//! Spray coefficients and the Berwald, mean Berwald and Douglas curvatures.
//!
//! `G^i = ¼ g^{il}[(F²)_{x^k y^l} y^k - (F²)_{x^l}]` is evaluated in jet
//! arithmetic in the `y` slot, including the inverse of `g`, so that its
//! `y`-derivatives up to fourth order come out exact to rounding.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Result};
use crate::jet::{Jet, JetLayout};
use crate::linalg::{invert_jet_matrix, Matrix, Tensor4};
use crate::math;
use crate::metric::{LocalMetric, MetricSpec};
use crate::tensor::EvalPoint;

/// The two sides of the dual-flatness identity at a point:
/// `lhs_l = (F²)_{x^k y^l} y^k` and `rhs_l = (F²)_{x^l}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFlatForms {
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl DualFlatForms {
    /// `lhs_l - rhs_l`, the bracket that drives the spray.
    pub fn spray_bracket(&self) -> Vec<f64> {
        self.lhs.iter().zip(&self.rhs).map(|(a, b)| a - b).collect()
    }
}

pub fn dual_flat_forms(spec: &MetricSpec, pt: &EvalPoint) -> Result<DualFlatForms> {
    check_dim(spec.dimension(), pt.dimension())?;
    let local = spec.local(&pt.x)?;
    local_dual_flat_forms(&local, &pt.y)
}

pub(crate) fn local_dual_flat_forms(local: &LocalMetric, y: &[f64]) -> Result<DualFlatForms> {
    let (a, _) = local.admissible_values(y)?;
    let blk = local.blocks(y)?;
    let m = local.m as f64;
    let q = 2.0 / m;
    let pre = q * math::powf(a, q - 1.0);
    let n = local.n;
    let lhs = (0..n)
        .map(|l| pre * ((q - 1.0) * blk.a_grad[l] * blk.a_0 / a + blk.a_0l[l]) + blk.b_0l[l])
        .collect();
    let rhs = (0..n).map(|l| pre * blk.a_dx[l] + blk.b_dx[l]).collect();
    Ok(DualFlatForms { lhs, rhs })
}

/// `G^i` as jets of the given order in the `y` variables.
pub fn spray_jet(spec: &MetricSpec, pt: &EvalPoint, order: usize) -> Result<Vec<Jet>> {
    check_dim(spec.dimension(), pt.dimension())?;
    let local = spec.local(&pt.x)?;
    local_spray_jet(&local, &pt.y, order)
}

pub(crate) fn local_spray_jet(local: &LocalMetric, y: &[f64], order: usize) -> Result<Vec<Jet>> {
    local.admissible_values(y)?;
    let n = local.n;
    let m = local.m as f64;
    let q = 2.0 / m;
    let layout = JetLayout::new(n, order);
    let jb = local.jet_blocks(&layout, y)?;
    let a_p1 = jb.a.powf(q - 1.0)?;
    let a_p2 = jb.a.powf(q - 2.0)?;
    // (2/m)[(2/m - 1) A^{2/m-2} A_l A_0 + A^{2/m-1}(A_{0l} - A_{x^l})] + B_{0l} - B_{x^l}
    let first = &(&a_p2 * &jb.a_0) * (q * (q - 1.0));
    let bracket: Vec<Jet> = (0..n)
        .map(|l| {
            let t1 = &first * &jb.a_grad[l];
            let t2 = &(&a_p1 * &(&jb.a_0l[l] - &jb.a_dx[l])) * q;
            &(&t1 + &t2) + &(&jb.b_0l[l] - &jb.b_dx[l])
        })
        .collect();
    let pre = &a_p2 * (1.0 / (m * m));
    let ma = &jb.a * m;
    let g: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let inner = &(&ma * &jb.a_hess[i][j]) + &(&(&jb.a_grad[i] * &jb.a_grad[j]) * (2.0 - m));
                    &(&pre * &inner) + local.b_mat[(i, j)]
                })
                .collect()
        })
        .collect();
    let ginv = invert_jet_matrix(&g)?;
    Ok((0..n)
        .map(|i| {
            let mut acc = Jet::constant(&layout, 0.0);
            for l in 0..n {
                acc = &acc + &(&ginv[i][l] * &bracket[l]);
            }
            acc.scale(0.25)
        })
        .collect())
}

/// `G^i(x, y)`.
pub fn spray_coefficients(spec: &MetricSpec, pt: &EvalPoint) -> Result<Vec<f64>> {
    Ok(spray_jet(spec, pt, 0)?.iter().map(Jet::value).collect())
}

pub(crate) fn local_spray(local: &LocalMetric, y: &[f64]) -> Result<Vec<f64>> {
    Ok(local_spray_jet(local, y, 0)?.iter().map(Jet::value).collect())
}

fn berwald_from(g: &[Jet]) -> Result<Tensor4> {
    let n = g.len();
    let mut out = Tensor4::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    out.set(i, j, k, l, g[i].derivative(&[j, k, l])?);
                }
            }
        }
    }
    Ok(out)
}

fn mean_from(berwald: &Tensor4) -> Matrix {
    let n = berwald.dim();
    Matrix::from_fn(n, |j, k| 0.5 * (0..n).map(|m| berwald.get(m, j, k, m)).sum::<f64>())
}

/// `B^i_jkl = ∂³G^i/∂y^j∂y^k∂y^l`.
pub fn berwald_curvature(spec: &MetricSpec, pt: &EvalPoint) -> Result<Tensor4> {
    berwald_from(&spray_jet(spec, pt, 3)?)
}

/// `E_jk = ½ B^m_jkm`.
pub fn mean_berwald(spec: &MetricSpec, pt: &EvalPoint) -> Result<Matrix> {
    Ok(mean_from(&berwald_curvature(spec, pt)?))
}

/// `D^i_jkl = B^i_jkl - 2/(n+1) {E_jk δ^i_l + E_jl δ^i_k + E_kl δ^i_j + E_{jk,l} y^i}`.
pub fn douglas_curvature(spec: &MetricSpec, pt: &EvalPoint) -> Result<Tensor4> {
    Ok(SprayEval::evaluate(spec, pt)?.d_curv)
}

/// Spray and all curvatures at one point, from a single order-4 jet pass.
#[derive(Debug, Clone, PartialEq)]
pub struct SprayEval {
    pub at: EvalPoint,
    pub g: Vec<f64>,
    pub b_curv: Tensor4,
    pub e_curv: Matrix,
    pub d_curv: Tensor4,
}

impl SprayEval {
    pub fn evaluate(spec: &MetricSpec, pt: &EvalPoint) -> Result<SprayEval> {
        let jets = spray_jet(spec, pt, 4)?;
        let n = spec.dimension();
        let b_curv = berwald_from(&jets)?;
        let e_curv = mean_from(&b_curv);
        // E_{jk,l} = ½ Σ_m ∂⁴G^m / ∂y^j∂y^k∂y^m∂y^l
        let mut e_dl = vec![0.0; n * n * n];
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s = 0.0;
                    for (m, gm) in jets.iter().enumerate() {
                        s += gm.derivative(&[j, k, m, l])?;
                    }
                    e_dl[(j * n + k) * n + l] = 0.5 * s;
                }
            }
        }
        let factor = 2.0 / (n as f64 + 1.0);
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let mut d_curv = Tensor4::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let trace = e_curv[(j, k)] * delta(i, l)
                            + e_curv[(j, l)] * delta(i, k)
                            + e_curv[(k, l)] * delta(i, j)
                            + e_dl[(j * n + k) * n + l] * pt.y[i];
                        d_curv.set(i, j, k, l, b_curv.get(i, j, k, l) - factor * trace);
                    }
                }
            }
        }
        Ok(SprayEval { at: pt.clone(), g: jets.iter().map(Jet::value).collect(), b_curv, e_curv, d_curv })
    }
}
