//! Coefficient fields: the degree-`m` form `A` and the quadratic form `B`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::jet::Jet;
use crate::linalg::{Matrix, Tensor3};
use crate::poly::Poly;

/// A point `(x, y)` of the tangent bundle.
///
/// `y = 0` is representable; operations that need the slit tangent bundle
/// reject it themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl EvalPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<EvalPoint> {
        check_dim(x.len(), y.len())?;
        if x.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        Ok(EvalPoint { x, y })
    }

    pub fn dimension(&self) -> usize {
        self.x.len()
    }

    pub fn y_is_zero(&self) -> bool {
        self.y.iter().all(|v| *v == 0.0)
    }

    /// Same `x`, `y` replaced.
    pub fn with_y(&self, y: Vec<f64>) -> EvalPoint {
        EvalPoint { x: self.x.clone(), y }
    }
}

/// `x`-derivative block of `A` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct XDerivs {
    /// `A_{x^l}`
    pub dx: Vec<f64>,
    /// `A_0 = A_{x^k} y^k`
    pub zero: f64,
    /// `A_{0l} = A_{x^k y^l} y^k`
    pub zero_l: Vec<f64>,
}

/// Degree-`m` form `A = a_{i1..im}(x) y^{i1}..y^{im}`.
///
/// Terms are keyed by sorted multi-indices and hold the coefficient of the
/// corresponding monomial of `A` as a polynomial in `y`; the fully symmetric
/// array is that coefficient divided by the multinomial count of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTensorField {
    dimension: usize,
    order: usize,
    terms: BTreeMap<Vec<usize>, Poly>,
}

impl SymmetricTensorField {
    /// Indices are 0-based and may be given in any order; repeated
    /// multi-indices are summed.
    pub fn new<I>(dimension: usize, order: usize, terms: I) -> Result<SymmetricTensorField>
    where
        I: IntoIterator<Item = (Vec<usize>, Poly)>,
    {
        if order < 2 {
            return Err(Error::InvalidOrder(order));
        }
        let mut merged: BTreeMap<Vec<usize>, Poly> = BTreeMap::new();
        for (mut index, coeff) in terms {
            if index.len() != order {
                return Err(Error::InvalidIndex(format!(
                    "index {index:?} has length {}, expected {order}",
                    index.len()
                )));
            }
            if let Some(bad) = index.iter().find(|&&i| i >= dimension) {
                return Err(Error::InvalidIndex(format!("entry {bad} out of range for dimension {dimension}")));
            }
            check_dim(dimension, coeff.dimension())?;
            index.sort_unstable();
            let slot = merged.entry(index).or_insert_with(|| Poly::zero(dimension));
            *slot = &*slot + &coeff;
        }
        merged.retain(|_, p| !p.is_empty());
        Ok(SymmetricTensorField { dimension, order, terms: merged })
    }

    /// Constant-coefficient field from `(index, value)` pairs.
    pub fn constant<I>(dimension: usize, order: usize, terms: I) -> Result<SymmetricTensorField>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        SymmetricTensorField::new(
            dimension,
            order,
            terms.into_iter().map(|(i, v)| (i, Poly::constant(dimension, v))),
        )
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &Poly)> + '_ {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// True when no coefficient depends on `x`.
    pub fn is_constant(&self) -> bool {
        self.terms.values().all(|p| p.degree() == 0)
    }

    /// `a_{i1..im}(x)` of the fully symmetric array.
    pub fn symmetric_component(&self, index: &[usize], x: &[f64]) -> Result<f64> {
        check_dim(self.dimension, x.len())?;
        let mut key = index.to_vec();
        key.sort_unstable();
        Ok(match self.terms.get(&key) {
            Some(p) => p.eval_at(x) / multinomial(&key),
            None => 0.0,
        })
    }

    fn exponents(&self, index: &[usize]) -> Vec<u32> {
        let mut e = vec![0u32; self.dimension];
        for &i in index {
            e[i] += 1;
        }
        e
    }

    /// `A(x, ·)` as a polynomial in `y`.
    pub fn restrict(&self, x: &[f64]) -> Result<Poly> {
        check_dim(self.dimension, x.len())?;
        Poly::from_terms(self.dimension, self.terms.iter().map(|(k, p)| (self.exponents(k), p.eval_at(x))))
    }

    /// `A_{x^axis}(x, ·)` as a polynomial in `y`.
    pub fn restrict_dx(&self, x: &[f64], axis: usize) -> Result<Poly> {
        check_dim(self.dimension, x.len())?;
        if axis >= self.dimension {
            return Err(Error::AxisOutOfRange { axis, dimension: self.dimension });
        }
        Poly::from_terms(
            self.dimension,
            self.terms.iter().map(|(k, p)| (self.exponents(k), p.eval_partial_at(axis, x))),
        )
    }

    fn check(&self, pt: &EvalPoint) -> Result<()> {
        check_dim(self.dimension, pt.dimension())
    }

    pub fn eval(&self, pt: &EvalPoint) -> Result<f64> {
        self.check(pt)?;
        Ok(self.restrict(&pt.x)?.eval_at(&pt.y))
    }

    /// `A_i`
    pub fn grad_y(&self, pt: &EvalPoint) -> Result<Vec<f64>> {
        self.check(pt)?;
        let a = self.restrict(&pt.x)?;
        Ok((0..self.dimension).map(|i| a.eval_partial_at(i, &pt.y)).collect())
    }

    /// `A_ij`
    pub fn hess_y(&self, pt: &EvalPoint) -> Result<Matrix> {
        self.check(pt)?;
        let a = self.restrict(&pt.x)?;
        let grads: Vec<Poly> = (0..self.dimension).map(|i| a.diff_unchecked(i)).collect();
        Ok(Matrix::from_fn(self.dimension, |i, j| grads[i].eval_partial_at(j, &pt.y)))
    }

    /// `A_ijk`
    pub fn third_y(&self, pt: &EvalPoint) -> Result<Tensor3> {
        self.check(pt)?;
        let n = self.dimension;
        let a = self.restrict(&pt.x)?;
        let mut out = Tensor3::zeros(n);
        for i in 0..n {
            let ai = a.diff_unchecked(i);
            for j in 0..n {
                let aij = ai.diff_unchecked(j);
                for k in 0..n {
                    out.set(i, j, k, aij.eval_partial_at(k, &pt.y));
                }
            }
        }
        Ok(out)
    }

    pub fn x_derivs(&self, pt: &EvalPoint) -> Result<XDerivs> {
        self.check(pt)?;
        let n = self.dimension;
        let dx_polys = (0..n).map(|l| self.restrict_dx(&pt.x, l)).collect::<Result<Vec<_>>>()?;
        let dx: Vec<f64> = dx_polys.iter().map(|p| p.eval_at(&pt.y)).collect();
        let zero = dx.iter().zip(&pt.y).map(|(a, y)| a * y).sum();
        let zero_l = (0..n)
            .map(|l| (0..n).map(|k| pt.y[k] * dx_polys[k].eval_partial_at(l, &pt.y)).sum())
            .collect();
        Ok(XDerivs { dx, zero, zero_l })
    }

    /// `A` evaluated with jet-valued `x` and `y` (used by oracles that
    /// differentiate in both slots).
    pub fn eval_jet(&self, xs: &[Jet], ys: &[Jet]) -> Result<Jet> {
        check_dim(self.dimension, xs.len())?;
        check_dim(self.dimension, ys.len())?;
        let mut acc = xs[0].lift(0.0);
        for (index, coeff) in &self.terms {
            let mut term = coeff.eval_jet(xs)?;
            for &i in index {
                term = &term * &ys[i];
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }
}

/// `m! / Π counts!` for a sorted multi-index.
pub fn multinomial(sorted: &[usize]) -> f64 {
    let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
    let mut denom = 1.0;
    let mut run = 1;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            denom *= fact(run);
            run = 1;
        }
    }
    if !sorted.is_empty() {
        denom *= fact(run);
    }
    fact(sorted.len()) / denom
}

/// `B`-derivative block at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct BDerivs {
    pub value: f64,
    /// `B_i`
    pub grad: Vec<f64>,
    /// `B_ij = 2 b_ij`
    pub hess: Matrix,
    /// `B_{x^l}`
    pub dx: Vec<f64>,
    /// `B_0 = B_{x^k} y^k`
    pub zero: f64,
    /// `B_{0l} = B_{x^k y^l} y^k`
    pub zero_l: Vec<f64>,
}

/// Common interface of the two ways a quadratic form `B = b_ij(x) y^i y^j`
/// can be given.
pub trait QuadraticForm {
    fn dimension(&self) -> usize;

    /// `b_ij(x)`
    fn matrix_at(&self, x: &[f64]) -> Matrix;

    /// `∂b_ij/∂x^axis` at `x`.
    fn matrix_dx_at(&self, x: &[f64], axis: usize) -> Matrix;

    fn is_constant(&self) -> bool;

    fn derivs(&self, pt: &EvalPoint) -> Result<BDerivs> {
        let n = self.dimension();
        check_dim(n, pt.dimension())?;
        let b = self.matrix_at(&pt.x);
        let by = b.mul_vec(&pt.y);
        let value = by.iter().zip(&pt.y).map(|(a, y)| a * y).sum();
        let grad = by.iter().map(|v| 2.0 * v).collect();
        let hess = b.scale(2.0);
        let dmats: Vec<Matrix> = (0..n).map(|l| self.matrix_dx_at(&pt.x, l)).collect();
        let dx: Vec<f64> = dmats.iter().map(|m| m.bilinear(&pt.y, &pt.y)).collect();
        let zero = dx.iter().zip(&pt.y).map(|(a, y)| a * y).sum();
        let mut zero_l = vec![0.0; n];
        for (k, dk) in dmats.iter().enumerate() {
            let row = dk.mul_vec(&pt.y);
            for l in 0..n {
                zero_l[l] += 2.0 * pt.y[k] * row[l];
            }
        }
        Ok(BDerivs { value, grad, hess, dx, zero, zero_l })
    }

    /// `B(x, ·)` as a polynomial in `y`.
    fn restrict(&self, x: &[f64]) -> Poly {
        quadratic_poly(&self.matrix_at(x))
    }

    /// `B_{x^axis}(x, ·)` as a polynomial in `y`.
    fn restrict_dx(&self, x: &[f64], axis: usize) -> Poly {
        quadratic_poly(&self.matrix_dx_at(x, axis))
    }

    /// `B` with jet-valued `x` and `y`.
    fn eval_jet(&self, xs: &[Jet], ys: &[Jet]) -> Result<Jet>;
}

/// `Σ b_ij y^i y^j` for a numeric symmetric matrix.
pub(crate) fn quadratic_poly(b: &Matrix) -> Poly {
    let n = b.dim();
    let terms = (0..n).flat_map(|i| {
        (0..n).map(move |j| {
            let mut e = vec![0u32; n];
            e[i] += 1;
            e[j] += 1;
            (e, b[(i, j)])
        })
    });
    Poly::from_terms(n, terms).expect("exponent vectors have length n")
}

/// `B = b_ij(x) y^i y^j` with an explicit symmetric coefficient matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFormField {
    dimension: usize,
    entries: Vec<Vec<Poly>>,
}

impl QuadraticFormField {
    /// Rejects non-square input and any `b_ij != b_ji`.
    pub fn new(entries: Vec<Vec<Poly>>) -> Result<QuadraticFormField> {
        let n = entries.len();
        for row in &entries {
            check_dim(n, row.len())?;
            for p in row {
                check_dim(n, p.dimension())?;
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if entries[i][j] != entries[j][i] {
                    return Err(Error::AsymmetricForm { i, j });
                }
            }
        }
        Ok(QuadraticFormField { dimension: n, entries })
    }

    pub fn constant(b: &Matrix) -> Result<QuadraticFormField> {
        let n = b.dim();
        QuadraticFormField::new(
            (0..n).map(|i| (0..n).map(|j| Poly::constant(n, b[(i, j)])).collect()).collect(),
        )
    }

    pub fn entries(&self) -> &[Vec<Poly>] {
        &self.entries
    }
}

impl QuadraticForm for QuadraticFormField {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn matrix_at(&self, x: &[f64]) -> Matrix {
        Matrix::from_fn(self.dimension, |i, j| self.entries[i][j].eval_at(x))
    }

    fn matrix_dx_at(&self, x: &[f64], axis: usize) -> Matrix {
        Matrix::from_fn(self.dimension, |i, j| self.entries[i][j].eval_partial_at(axis, x))
    }

    fn is_constant(&self) -> bool {
        self.entries.iter().flatten().all(|p| p.degree() == 0)
    }

    fn eval_jet(&self, xs: &[Jet], ys: &[Jet]) -> Result<Jet> {
        let n = self.dimension;
        check_dim(n, xs.len())?;
        check_dim(n, ys.len())?;
        let mut acc = xs[0].lift(0.0);
        for i in 0..n {
            for j in 0..n {
                if self.entries[i][j].is_empty() {
                    continue;
                }
                let b = self.entries[i][j].eval_jet(xs)?;
                acc = &acc + &(&b * &(&ys[i] * &ys[j]));
            }
        }
        Ok(acc)
    }
}

/// Relative tolerance on the coefficients of `c_i d_j - c_j d_i`.
pub const RANK_ONE_TOL: f64 = 1e-12;

/// `B = c_i(x) d_j(x) y^i y^j` with `c_i d_j = c_j d_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneForm {
    c: Vec<Poly>,
    d: Vec<Poly>,
}

impl RankOneForm {
    pub fn new(c: Vec<Poly>, d: Vec<Poly>) -> Result<RankOneForm> {
        let n = c.len();
        check_dim(n, d.len())?;
        for p in c.iter().chain(&d) {
            check_dim(n, p.dimension())?;
        }
        for i in 0..n {
            for j in i + 1..n {
                let lhs = &c[i] * &d[j];
                let rhs = &c[j] * &d[i];
                if !lhs.approx_eq(&rhs, RANK_ONE_TOL) {
                    return Err(Error::InvalidRankOne { i, j });
                }
            }
        }
        Ok(RankOneForm { c, d })
    }

    pub fn c(&self) -> &[Poly] {
        &self.c
    }

    pub fn d(&self) -> &[Poly] {
        &self.d
    }

    pub fn c_at(&self, x: &[f64]) -> Vec<f64> {
        self.c.iter().map(|p| p.eval_at(x)).collect()
    }

    pub fn d_at(&self, x: &[f64]) -> Vec<f64> {
        self.d.iter().map(|p| p.eval_at(x)).collect()
    }
}

impl QuadraticForm for RankOneForm {
    fn dimension(&self) -> usize {
        self.c.len()
    }

    fn matrix_at(&self, x: &[f64]) -> Matrix {
        let c = self.c_at(x);
        let d = self.d_at(x);
        Matrix::from_fn(c.len(), |i, j| 0.5 * (c[i] * d[j] + c[j] * d[i]))
    }

    fn matrix_dx_at(&self, x: &[f64], axis: usize) -> Matrix {
        let c = self.c_at(x);
        let d = self.d_at(x);
        let dc: Vec<f64> = self.c.iter().map(|p| p.eval_partial_at(axis, x)).collect();
        let dd: Vec<f64> = self.d.iter().map(|p| p.eval_partial_at(axis, x)).collect();
        Matrix::from_fn(c.len(), |i, j| {
            0.5 * (dc[i] * d[j] + c[i] * dd[j] + dc[j] * d[i] + c[j] * dd[i])
        })
    }

    fn is_constant(&self) -> bool {
        self.c.iter().chain(&self.d).all(|p| p.degree() == 0)
    }

    fn eval_jet(&self, xs: &[Jet], ys: &[Jet]) -> Result<Jet> {
        let n = self.c.len();
        check_dim(n, xs.len())?;
        check_dim(n, ys.len())?;
        let mut cy = xs[0].lift(0.0);
        let mut dy = xs[0].lift(0.0);
        for i in 0..n {
            cy = &cy + &(&self.c[i].eval_jet(xs)? * &ys[i]);
            dy = &dy + &(&self.d[i].eval_jet(xs)? * &ys[i]);
        }
        Ok(&cy * &dy)
    }
}
