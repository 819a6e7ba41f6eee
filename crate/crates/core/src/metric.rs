//! Metric-level quantities of `F = (A^{2/m} + B)^{1/2}`: the value, the
//! fundamental tensor and its inverses, lowered `y`, and the Cartan torsion.

use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::jet::{Jet, JetLayout};
use crate::linalg::{Inverse, Matrix, Tensor3};
use crate::math;
use crate::poly::Poly;
use crate::tensor::{quadratic_poly, EvalPoint, QuadraticForm, QuadraticFormField, RankOneForm, SymmetricTensorField};

/// Tolerance on `|1 + A^{pq} C_p D_q|` below which the rank-one update is
/// rejected.
pub const RANK_ONE_UPDATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum MetricKind {
    /// `F = A^{1/m}`
    MRoot { a: SymmetricTensorField },
    /// `F = (A^{2/m} + b_ij y^i y^j)^{1/2}`
    GeneralizedMRoot { a: SymmetricTensorField, b: QuadraticFormField },
    /// `F = (A^{2/m} + c_i d_j y^i y^j)^{1/2}`
    GeneralizedRank1 { a: SymmetricTensorField, form: RankOneForm },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    kind: MetricKind,
    pseudo_finsler_ok: bool,
}

impl MetricSpec {
    pub fn new(kind: MetricKind) -> Result<MetricSpec> {
        let (a, b_dim) = match &kind {
            MetricKind::MRoot { a } => (a, None),
            MetricKind::GeneralizedMRoot { a, b } => (a, Some(b.dimension())),
            MetricKind::GeneralizedRank1 { a, form } => (a, Some(form.dimension())),
        };
        if a.order() < 2 {
            return Err(Error::InvalidOrder(a.order()));
        }
        if let Some(n) = b_dim {
            check_dim(a.dimension(), n)?;
        }
        Ok(MetricSpec { kind, pseudo_finsler_ok: false })
    }

    pub fn mroot(a: SymmetricTensorField) -> Result<MetricSpec> {
        MetricSpec::new(MetricKind::MRoot { a })
    }

    pub fn generalized(a: SymmetricTensorField, b: QuadraticFormField) -> Result<MetricSpec> {
        MetricSpec::new(MetricKind::GeneralizedMRoot { a, b })
    }

    pub fn generalized_rank1(a: SymmetricTensorField, form: RankOneForm) -> Result<MetricSpec> {
        MetricSpec::new(MetricKind::GeneralizedRank1 { a, form })
    }

    /// Accept indefinite fundamental tensors (pseudo-Finsler metrics).
    pub fn with_pseudo_finsler_ok(mut self, ok: bool) -> MetricSpec {
        self.pseudo_finsler_ok = ok;
        self
    }

    pub fn pseudo_finsler_ok(&self) -> bool {
        self.pseudo_finsler_ok
    }

    pub fn kind(&self) -> &MetricKind {
        &self.kind
    }

    pub fn a(&self) -> &SymmetricTensorField {
        match &self.kind {
            MetricKind::MRoot { a } | MetricKind::GeneralizedMRoot { a, .. } | MetricKind::GeneralizedRank1 { a, .. } => a,
        }
    }

    pub fn b(&self) -> Option<&dyn QuadraticForm> {
        match &self.kind {
            MetricKind::MRoot { .. } => None,
            MetricKind::GeneralizedMRoot { b, .. } => Some(b),
            MetricKind::GeneralizedRank1 { form, .. } => Some(form),
        }
    }

    pub fn rank_one(&self) -> Option<&RankOneForm> {
        match &self.kind {
            MetricKind::GeneralizedRank1 { form, .. } => Some(form),
            _ => None,
        }
    }

    /// The m-th root metric `A^{1/m}` sharing this metric's `A`.
    pub fn root(&self) -> MetricSpec {
        MetricSpec { kind: MetricKind::MRoot { a: self.a().clone() }, pseudo_finsler_ok: self.pseudo_finsler_ok }
    }

    pub fn m(&self) -> usize {
        self.a().order()
    }

    pub fn dimension(&self) -> usize {
        self.a().dimension()
    }

    /// True when neither `A` nor `B` depends on `x`.
    pub fn is_constant(&self) -> bool {
        self.a().is_constant() && self.b().map_or(true, |b| b.is_constant())
    }

    /// `b_ij(x)`, zero for m-th root metrics.
    pub fn b_matrix(&self, x: &[f64]) -> Matrix {
        match self.b() {
            Some(b) => b.matrix_at(x),
            None => Matrix::zeros(self.dimension()),
        }
    }

    /// Restricts every coefficient field to the fixed base point `x`.
    pub fn local(&self, x: &[f64]) -> Result<LocalMetric> {
        LocalMetric::new(self, x)
    }

    /// `F^2` with jet-valued `x` and `y`.
    pub fn f2_jet(&self, xs: &[Jet], ys: &[Jet]) -> Result<Jet> {
        let a = self.a().eval_jet(xs, ys)?;
        let mut f2 = a.powf(2.0 / self.m() as f64)?;
        if let Some(b) = self.b() {
            f2 = &f2 + &b.eval_jet(xs, ys)?;
        }
        Ok(f2)
    }
}

/// All `y`-polynomials needed at one base point `x`.
#[derive(Debug, Clone)]
pub struct LocalMetric {
    pub(crate) x: Vec<f64>,
    pub(crate) n: usize,
    pub(crate) m: usize,
    pub(crate) a: Poly,
    pub(crate) a_grad: Vec<Poly>,
    pub(crate) a_hess: Vec<Vec<Poly>>,
    pub(crate) a_dx: Vec<Poly>,
    pub(crate) a_0: Poly,
    pub(crate) a_0l: Vec<Poly>,
    pub(crate) b_mat: Matrix,
    pub(crate) b: Poly,
    pub(crate) b_dx: Vec<Poly>,
    pub(crate) b_0l: Vec<Poly>,
}

/// The derivative blocks of `A` and `B` at a single `(x, y)`.
#[derive(Debug, Clone)]
pub struct Blocks {
    pub a: f64,
    pub a_grad: Vec<f64>,
    pub a_hess: Matrix,
    pub a_dx: Vec<f64>,
    pub a_0: f64,
    pub a_0l: Vec<f64>,
    pub b: f64,
    pub b_mat: Matrix,
    pub b_dx: Vec<f64>,
    pub b_0l: Vec<f64>,
}

/// `Σ_k y^k ∂_{y^l} p_k`
fn contract_then_diff(parts: &[Poly], n: usize) -> Vec<Poly> {
    (0..n)
        .map(|l| {
            let mut acc = Poly::zero(n);
            for (k, p) in parts.iter().enumerate() {
                acc = &acc + &p.diff_unchecked(l).mul_var(k);
            }
            acc
        })
        .collect()
}

impl LocalMetric {
    fn new(spec: &MetricSpec, x: &[f64]) -> Result<LocalMetric> {
        let n = spec.dimension();
        check_dim(n, x.len())?;
        let at = spec.a();
        let a = at.restrict(x)?;
        let a_grad: Vec<Poly> = (0..n).map(|i| a.diff_unchecked(i)).collect();
        let a_hess = a_grad.iter().map(|g| (0..n).map(|j| g.diff_unchecked(j)).collect()).collect();
        let a_dx = (0..n).map(|l| at.restrict_dx(x, l)).collect::<Result<Vec<_>>>()?;
        let mut a_0 = Poly::zero(n);
        for (k, p) in a_dx.iter().enumerate() {
            a_0 = &a_0 + &p.mul_var(k);
        }
        let a_0l = contract_then_diff(&a_dx, n);
        let (b_mat, b_dx): (Matrix, Vec<Poly>) = match spec.b() {
            Some(b) => (b.matrix_at(x), (0..n).map(|l| b.restrict_dx(x, l)).collect()),
            None => (Matrix::zeros(n), (0..n).map(|_| Poly::zero(n)).collect()),
        };
        let b = quadratic_poly(&b_mat);
        let b_0l = contract_then_diff(&b_dx, n);
        Ok(LocalMetric { x: x.to_vec(), n, m: spec.m(), a, a_grad, a_hess, a_dx, a_0, a_0l, b_mat, b, b_dx, b_0l })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn blocks(&self, y: &[f64]) -> Result<Blocks> {
        check_dim(self.n, y.len())?;
        let ev = |p: &Poly| p.eval_at(y);
        Ok(Blocks {
            a: ev(&self.a),
            a_grad: self.a_grad.iter().map(ev).collect(),
            a_hess: Matrix::from_fn(self.n, |i, j| self.a_hess[i][j].eval_at(y)),
            a_dx: self.a_dx.iter().map(ev).collect(),
            a_0: ev(&self.a_0),
            a_0l: self.a_0l.iter().map(ev).collect(),
            b: ev(&self.b),
            b_mat: self.b_mat.clone(),
            b_dx: self.b_dx.iter().map(ev).collect(),
            b_0l: self.b_0l.iter().map(ev).collect(),
        })
    }

    /// `(A, F^2)` after checking `y ≠ 0`, `A > 0` and `F^2 > 0`.
    pub fn admissible_values(&self, y: &[f64]) -> Result<(f64, f64)> {
        check_dim(self.n, y.len())?;
        let a = self.a.eval_at(y);
        let b = self.b.eval_at(y);
        if y.iter().all(|v| *v == 0.0) {
            return Err(Error::InadmissiblePoint { reason: "y = 0", a_value: a, f2_value: 0.0 });
        }
        if !(a > 0.0) {
            return Err(Error::InadmissiblePoint { reason: "A <= 0", a_value: a, f2_value: f64::NAN });
        }
        let f2 = math::powf(a, 2.0 / self.m as f64) + b;
        if !(f2 > 0.0) {
            return Err(Error::InadmissiblePoint { reason: "A^(2/m) + B <= 0", a_value: a, f2_value: f2 });
        }
        Ok((a, f2))
    }

    pub fn f2(&self, y: &[f64]) -> Result<f64> {
        self.admissible_values(y).map(|(_, f2)| f2)
    }

    /// `g_ij = (A^{2/m-2}/m^2)[m A A_ij + (2-m) A_i A_j] + b_ij`.
    pub fn fundamental_tensor(&self, y: &[f64]) -> Result<Matrix> {
        let (a, _) = self.admissible_values(y)?;
        let blk = self.blocks(y)?;
        let m = self.m as f64;
        let pre = math::powf(a, 2.0 / m - 2.0) / (m * m);
        Ok(Matrix::from_fn(self.n, |i, j| {
            pre * (m * a * blk.a_hess[(i, j)] + (2.0 - m) * blk.a_grad[i] * blk.a_grad[j]) + blk.b_mat[(i, j)]
        }))
    }

    /// Jets of the derivative blocks, seeded at `y` in the first `n` variables.
    pub(crate) fn jet_blocks(&self, layout: &alloc::sync::Arc<JetLayout>, y: &[f64]) -> Result<JetBlocks> {
        let ys = Jet::seed(layout, y, 0);
        let ev = |p: &Poly| p.eval_jet(&ys);
        Ok(JetBlocks {
            a: ev(&self.a)?,
            a_grad: self.a_grad.iter().map(ev).collect::<Result<_>>()?,
            a_hess: self.a_hess.iter().map(|r| r.iter().map(ev).collect::<Result<_>>()).collect::<Result<_>>()?,
            a_dx: self.a_dx.iter().map(ev).collect::<Result<_>>()?,
            a_0: ev(&self.a_0)?,
            a_0l: self.a_0l.iter().map(ev).collect::<Result<_>>()?,
            b: ev(&self.b)?,
            b_dx: self.b_dx.iter().map(ev).collect::<Result<_>>()?,
            b_0l: self.b_0l.iter().map(ev).collect::<Result<_>>()?,
        })
    }
}

pub(crate) struct JetBlocks {
    pub a: Jet,
    pub a_grad: Vec<Jet>,
    pub a_hess: Vec<Vec<Jet>>,
    pub a_dx: Vec<Jet>,
    pub a_0: Jet,
    pub a_0l: Vec<Jet>,
    pub b: Jet,
    pub b_dx: Vec<Jet>,
    pub b_0l: Vec<Jet>,
}

fn local_at(spec: &MetricSpec, pt: &EvalPoint) -> Result<LocalMetric> {
    check_dim(spec.dimension(), pt.dimension())?;
    spec.local(&pt.x)
}

/// `F(x, y)`.
pub fn metric_value(spec: &MetricSpec, pt: &EvalPoint) -> Result<f64> {
    let local = local_at(spec, pt)?;
    let (a, f2) = local.admissible_values(&pt.y)?;
    Ok(match spec.kind() {
        MetricKind::MRoot { .. } => math::powf(a, 1.0 / spec.m() as f64),
        _ => math::sqrt(f2),
    })
}

/// Closed-form fundamental tensor `g_ij`.
pub fn fundamental_tensor(spec: &MetricSpec, pt: &EvalPoint) -> Result<Matrix> {
    local_at(spec, pt)?.fundamental_tensor(&pt.y)
}

/// `½ ∂²F²/∂y^i∂y^j` by central differences with one Richardson level;
/// an oracle for [`fundamental_tensor`].
pub fn hessian_f2_numeric(spec: &MetricSpec, pt: &EvalPoint) -> Result<Matrix> {
    let local = local_at(spec, pt)?;
    local.admissible_values(&pt.y)?;
    let n = spec.dimension();
    let scale = math::max_abs(&pt.y).max(f64::MIN_POSITIVE);
    let h = 1e-4 * scale;
    let f = |y: &[f64]| local.f2(y).map_err(|_| Error::OracleFailure("F^2 undefined inside the stencil"));
    let second = |i: usize, j: usize, h: f64| -> Result<f64> {
        let mut total = 0.0;
        for (si, sj, w) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
            let mut y = pt.y.clone();
            y[i] += si * h;
            y[j] += sj * h;
            total += w * f(&y)?;
        }
        Ok(total / (4.0 * h * h))
    };
    let mut out = Matrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let coarse = second(i, j, h)?;
            let fine = second(i, j, 0.5 * h)?;
            let v = 0.5 * (4.0 * fine - coarse) / 3.0;
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

/// `A^{ij}`, the inverse of the `y`-Hessian `A_ij`.
pub fn inverse_a(hess: &Matrix) -> Result<Inverse> {
    hess.invert()
}

/// Closed-form inverse for m-th root metrics:
/// `g^{ij} = A^{-2/m}[m A A^{ij} + ((m-2)/(m-1)) y^i y^j]`.
pub fn inverse_g_mroot(spec: &MetricSpec, pt: &EvalPoint) -> Result<Matrix> {
    if !matches!(spec.kind(), MetricKind::MRoot { .. }) {
        return Err(Error::WrongKind("closed-form inverse needs an m-th root metric"));
    }
    let local = local_at(spec, pt)?;
    let (a, _) = local.admissible_values(&pt.y)?;
    let blk = local.blocks(&pt.y)?;
    let ainv = inverse_a(&blk.a_hess)?.inverse;
    let m = spec.m() as f64;
    let pre = math::powf(a, -2.0 / m);
    let y = &pt.y;
    Ok(Matrix::from_fn(spec.dimension(), |i, j| {
        pre * (m * a * ainv[(i, j)] + (m - 2.0) / (m - 1.0) * y[i] * y[j])
    }))
}

/// Inverse of `A_ij + C_i D_j` from `A^{ij}`:
/// `A^{ij} - (A^{-1}C)^i (D A^{-1})^j / (1 + D_p A^{pq} C_q)`.
pub fn rank1_update_inverse(ainv: &Matrix, c: &[f64], d: &[f64]) -> Result<Matrix> {
    let n = ainv.dim();
    check_dim(n, c.len())?;
    check_dim(n, d.len())?;
    let u = ainv.mul_vec(c);
    let v = ainv.transpose().mul_vec(d);
    let denominator = 1.0 + d.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>();
    if !(math::abs(denominator) > RANK_ONE_UPDATE_TOL) {
        return Err(Error::DegenerateUpdate { denominator });
    }
    Ok(Matrix::from_fn(n, |i, j| ainv[(i, j)] - u[i] * v[j] / denominator))
}

/// `C_ijk = ¼ ∂³F²/∂y^i∂y^j∂y^k`, from order-3 jets of `F²`.
pub fn cartan_torsion(spec: &MetricSpec, pt: &EvalPoint) -> Result<Tensor3> {
    let local = local_at(spec, pt)?;
    local.admissible_values(&pt.y)?;
    let n = spec.dimension();
    let layout = JetLayout::new(n, 3);
    let jb = local.jet_blocks(&layout, &pt.y)?;
    let f2 = &jb.a.powf(2.0 / spec.m() as f64)? + &jb.b;
    let mut out = Tensor3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.set(i, j, k, 0.25 * f2.derivative(&[i, j, k])?);
            }
        }
    }
    Ok(out)
}

/// `max |C_ijk|`; zero exactly for Riemannian metrics.
pub fn riemannian_score(spec: &MetricSpec, pt: &EvalPoint) -> Result<f64> {
    Ok(cartan_torsion(spec, pt)?.max_abs())
}

/// Everything metric-level at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricEval {
    pub at: EvalPoint,
    pub a_value: f64,
    pub b_value: f64,
    pub f_value: f64,
    pub g: Matrix,
    pub g_inv: Matrix,
    /// `y_i = g_ij y^j`
    pub y_low: Vec<f64>,
    pub positive_definite: bool,
    /// Point is in the domain and `g` is positive definite, or indefinite
    /// with `pseudo_finsler_ok` set.
    pub admissible: bool,
    pub condition: f64,
}

impl MetricEval {
    pub fn evaluate(spec: &MetricSpec, pt: &EvalPoint) -> Result<MetricEval> {
        let local = local_at(spec, pt)?;
        let (a, f2) = local.admissible_values(&pt.y)?;
        let b = local.b.eval_at(&pt.y);
        let g = local.fundamental_tensor(&pt.y)?;
        let inv = g.invert()?;
        let positive_definite = g.is_positive_definite();
        let f_value = match spec.kind() {
            MetricKind::MRoot { .. } => math::powf(a, 1.0 / spec.m() as f64),
            _ => math::sqrt(f2),
        };
        Ok(MetricEval {
            at: pt.clone(),
            a_value: a,
            b_value: b,
            f_value,
            y_low: g.mul_vec(&pt.y),
            g,
            g_inv: inv.inverse,
            positive_definite,
            admissible: positive_definite || spec.pseudo_finsler_ok(),
            condition: inv.condition,
        })
    }
}
