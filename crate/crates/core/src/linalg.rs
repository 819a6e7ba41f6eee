//! Small dense linear algebra: square matrices, LU with partial pivoting,
//! and order-3/4 arrays. Sizes are desk-scale (n ≤ 8).

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::math;

/// Relative pivot threshold below which a matrix is declared singular.
pub const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Matrix {
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Matrix {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Panics unless `rows` is square.
    pub fn from_rows(rows: &[Vec<f64>]) -> Matrix {
        let n = rows.len();
        Matrix::from_fn(n, |i, j| {
            assert_eq!(rows[i].len(), n, "matrix rows must be square");
            rows[i][j]
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n);
        Matrix::from_fn(self.n, |i, j| (0..self.n).map(|k| self[(i, k)] * rhs[(k, j)]).sum())
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.n, v.len());
        (0..self.n).map(|i| (0..self.n).map(|k| self[(i, k)] * v[k]).sum()).collect()
    }

    /// `u^T M v`.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(self.mul_vec(v)).map(|(a, b)| a * b).sum()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self[(i, j)] - rhs[(i, j)])
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self[(i, j)] + rhs[(i, j)])
    }

    pub fn scale(&self, factor: f64) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().map(|v| v * factor).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        math::max_abs(&self.data)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| math::abs(self[(i, j)])).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn lu(&self) -> Result<Lu> {
        Lu::factor(self)
    }

    /// Dense inverse via LU, with a 1-norm condition estimate.
    pub fn invert(&self) -> Result<Inverse> {
        let lu = self.lu()?;
        let inverse = lu.inverse();
        let condition = self.norm1() * inverse.norm1();
        if !inverse.is_finite() {
            return Err(Error::Singular { condition: f64::INFINITY });
        }
        Ok(Inverse { inverse, condition })
    }

    /// Cholesky-based positive-definiteness test of the symmetric part.
    pub fn is_positive_definite(&self) -> bool {
        let n = self.n;
        let mut l = Matrix::zeros(n);
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for j in 0..n {
            let mut d = 0.5 * (self[(j, j)] + self[(j, j)]);
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if d <= SINGULAR_TOL * scale {
                return false;
            }
            let d = math::sqrt(d);
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = 0.5 * (self[(i, j)] + self[(j, i)]);
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        true
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inverse {
    pub inverse: Matrix,
    pub condition: f64,
}

/// `P A = L U` with unit-diagonal `L` stored below the diagonal.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(a: &Matrix) -> Result<Lu> {
        let n = a.n;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        if n == 0 {
            return Ok(Lu { lu, perm });
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Singular { condition: f64::INFINITY });
        }
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, math::abs(lu[(i, k)])))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= SINGULAR_TOL * scale {
                return Err(Error::Singular { condition: scale / pivot.max(f64::MIN_POSITIVE) });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            for i in k + 1..n {
                let factor = lu[(i, k)] / lu[(k, k)];
                lu[(i, k)] = factor;
                for j in k + 1..n {
                    let v = lu[(k, j)];
                    lu[(i, j)] -= factor * v;
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.lu[(i, k)] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] -= self.lu[(i, k)] * x[k];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.lu.n;
        let mut inv = Matrix::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// Inverts a matrix of jets. The constant part is inverted by LU; higher
/// Taylor orders follow from the Neumann series of the (nilpotent)
/// perturbation: `(M0 + H)^{-1} = Σ_k (-M0^{-1} H)^k M0^{-1}`.
pub fn invert_jet_matrix(m: &[Vec<Jet>]) -> Result<Vec<Vec<Jet>>> {
    let n = m.len();
    let layout = m
        .first()
        .and_then(|r| r.first())
        .map(|j| j.layout().clone())
        .ok_or(Error::Jet("empty jet matrix"))?;
    let base = Matrix::from_fn(n, |i, j| m[i][j].value());
    let base_inv = base.invert()?.inverse;
    let x0: Vec<Vec<Jet>> = (0..n)
        .map(|i| (0..n).map(|j| Jet::constant(&layout, base_inv[(i, j)])).collect())
        .collect();
    let h: Vec<Vec<Jet>> = m
        .iter()
        .map(|row| row.iter().map(|e| e + (-e.value())).collect())
        .collect();
    // step = -X0 H
    let step = jet_matmul(&x0, &h).into_iter().map(|r| r.iter().map(|e| -e).collect()).collect::<Vec<Vec<Jet>>>();
    let mut term = x0.clone();
    let mut acc = x0;
    for _ in 1..=layout.order() {
        term = jet_matmul(&step, &term);
        for i in 0..n {
            for j in 0..n {
                acc[i][j] = &acc[i][j] + &term[i][j];
            }
        }
    }
    Ok(acc)
}

pub(crate) fn jet_matmul(a: &[Vec<Jet>], b: &[Vec<Jet>]) -> Vec<Vec<Jet>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = &a[i][0] * &b[0][j];
                    for k in 1..n {
                        acc = &acc + &(&a[i][k] * &b[k][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Dense order-3 array `T[i][j][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Tensor3 {
        Tensor3 { n, data: vec![0.0; n * n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.data[(i * self.n + j) * self.n + k] = v;
    }

    pub fn max_abs(&self) -> f64 {
        math::max_abs(&self.data)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Dense order-4 array `T[i][j][k][l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Tensor4 {
        Tensor4 { n, data: vec![0.0; n * n * n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn at(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.at(i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let at = self.at(i, j, k, l);
        self.data[at] = v;
    }

    pub fn max_abs(&self) -> f64 {
        math::max_abs(&self.data)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}
