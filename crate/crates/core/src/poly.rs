//! Sparse multivariate polynomials with real coefficients.
//!
//! The same type houses both the `x`-dependence of tensor coefficients and,
//! after restricting to a fixed `x`, the forms `A(y)`, `B(y)` and all of
//! their `y`-derivatives.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{check_dim, Error, Result};
use crate::jet::Jet;
use crate::math;

/// A polynomial in `dimension` variables, kept in canonical form: one entry
/// per exponent vector, no zero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    dimension: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Poly {
    pub fn zero(dimension: usize) -> Self {
        Poly { dimension, terms: BTreeMap::new() }
    }

    pub fn constant(dimension: usize, value: f64) -> Self {
        let mut p = Poly::zero(dimension);
        p.push(vec![0; dimension], value);
        p
    }

    /// The coordinate function `x_axis`.
    pub fn variable(dimension: usize, axis: usize) -> Result<Self> {
        if axis >= dimension {
            return Err(Error::AxisOutOfRange { axis, dimension });
        }
        let mut powers = vec![0; dimension];
        powers[axis] = 1;
        Ok(Poly::monomial_unchecked(powers, 1.0))
    }

    pub fn monomial(powers: Vec<u32>, value: f64) -> Result<Self> {
        if powers.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        Ok(Poly::monomial_unchecked(powers, value))
    }

    fn monomial_unchecked(powers: Vec<u32>, value: f64) -> Self {
        let mut p = Poly::zero(powers.len());
        p.push(powers, value);
        p
    }

    /// Builds a polynomial from possibly repeated monomials, merging equal
    /// exponent vectors and dropping zeros.
    pub fn from_terms<I>(dimension: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        let mut p = Poly::zero(dimension);
        for (powers, value) in terms {
            check_dim(dimension, powers.len())?;
            p.push(powers, value);
        }
        Ok(p)
    }

    fn push(&mut self, powers: Vec<u32>, value: f64) {
        if value == 0.0 {
            return;
        }
        let entry = self.terms.entry(powers).or_insert(0.0);
        *entry += value;
        if *entry == 0.0 {
            self.terms.retain(|_, v| *v != 0.0);
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> + '_ {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial reports 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|k| k.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dimension, x.len())?;
        Ok(self.eval_at(x))
    }

    pub(crate) fn eval_at(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dimension);
        self.terms
            .iter()
            .map(|(powers, value)| {
                powers
                    .iter()
                    .zip(x)
                    .fold(*value, |acc, (&e, &xi)| acc * math::powi(xi, e))
            })
            .sum()
    }

    /// `∂p/∂x_axis` evaluated at `x` without building the derivative.
    pub(crate) fn eval_partial_at(&self, axis: usize, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (powers, value) in &self.terms {
            let e = powers[axis];
            if e == 0 {
                continue;
            }
            let mut term = *value * f64::from(e);
            for (k, (&ek, &xk)) in powers.iter().zip(x).enumerate() {
                let ek = if k == axis { ek - 1 } else { ek };
                term *= math::powi(xk, ek);
            }
            total += term;
        }
        total
    }

    /// Exact formal partial derivative.
    pub fn diff(&self, axis: usize) -> Result<Poly> {
        if axis >= self.dimension {
            return Err(Error::AxisOutOfRange { axis, dimension: self.dimension });
        }
        let mut out = Poly::zero(self.dimension);
        for (powers, value) in &self.terms {
            let e = powers[axis];
            if e == 0 {
                continue;
            }
            let mut lowered = powers.clone();
            lowered[axis] = e - 1;
            out.push(lowered, value * f64::from(e));
        }
        Ok(out)
    }

    pub(crate) fn diff_unchecked(&self, axis: usize) -> Poly {
        self.diff(axis).expect("axis checked by caller")
    }

    /// Multiplies by the coordinate `x_axis`.
    pub fn mul_var(&self, axis: usize) -> Poly {
        let mut out = Poly::zero(self.dimension);
        for (powers, value) in &self.terms {
            let mut raised = powers.clone();
            raised[axis] += 1;
            out.push(raised, *value);
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Poly {
        let mut out = Poly::zero(self.dimension);
        for (powers, value) in &self.terms {
            out.push(powers.clone(), value * factor);
        }
        out
    }

    /// Maximum coefficient magnitude.
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, v| acc.max(math::abs(*v)))
    }

    /// True when every coefficient of `self - other` is within
    /// `rel_tol * max(1, max coefficient of either side)`.
    pub fn approx_eq(&self, other: &Poly, rel_tol: f64) -> bool {
        if self.dimension != other.dimension {
            return false;
        }
        let scale = self.max_coeff().max(other.max_coeff()).max(1.0);
        (self - other).max_coeff() <= rel_tol * scale
    }

    /// Evaluates the polynomial on jet arguments.
    pub fn eval_jet(&self, vars: &[Jet]) -> Result<Jet> {
        check_dim(self.dimension, vars.len())?;
        let layout = vars
            .first()
            .map(|j| j.layout().clone())
            .ok_or(Error::Jet("polynomial in zero variables"))?;
        let max_pow: Vec<u32> = (0..self.dimension)
            .map(|k| self.terms.keys().map(|p| p[k]).max().unwrap_or(0))
            .collect();
        // powers[k][e] = vars[k]^e
        let powers: Vec<Vec<Jet>> = vars
            .iter()
            .zip(&max_pow)
            .map(|(v, &top)| {
                let mut list = Vec::with_capacity(top as usize + 1);
                list.push(Jet::constant(&layout, 1.0));
                for e in 1..=top as usize {
                    let next = &list[e - 1] * v;
                    list.push(next);
                }
                list
            })
            .collect();
        let mut acc = Jet::constant(&layout, 0.0);
        for (exps, value) in &self.terms {
            let mut term = Jet::constant(&layout, *value);
            for (k, &e) in exps.iter().enumerate() {
                if e > 0 {
                    term = &term * &powers[k][e as usize];
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.dimension, rhs.dimension, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (powers, value) in &rhs.terms {
            out.push(powers.clone(), *value);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.dimension, rhs.dimension, "polynomial dimension mismatch");
        let mut out = Poly::zero(self.dimension);
        for (pa, va) in &self.terms {
            for (pb, vb) in &rhs.terms {
                let powers = pa.iter().zip(pb).map(|(a, b)| a + b).collect();
                out.push(powers, va * vb);
            }
        }
        out
    }
}
