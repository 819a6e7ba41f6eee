//! Truncated multivariate Taylor jets.
//!
//! A [`Jet`] holds the Taylor coefficients of a scalar function of `vars`
//! perturbation variables around a base point, truncated at total degree
//! `order`. Arithmetic on jets is exact for polynomials and reproduces every
//! partial derivative up to `order` of smooth compositions to rounding
//! error. Coefficients are stored in Taylor form, so
//! `∂^α f = α! · coeff(α)`.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::math;

/// Monomial enumeration and multiplication table shared by all jets of
/// one `(vars, order)` space.
#[derive(Debug)]
pub struct JetLayout {
    vars: usize,
    order: usize,
    exps: Vec<Vec<u8>>,
    index: BTreeMap<Vec<u8>, usize>,
    /// `(i, j, k)` with `exps[i] + exps[j] == exps[k]` and total degree ≤ order.
    products: Vec<(u32, u32, u32)>,
    /// `α!` for every monomial.
    factorials: Vec<f64>,
}

impl JetLayout {
    pub fn new(vars: usize, order: usize) -> Arc<JetLayout> {
        let mut exps: Vec<Vec<u8>> = Vec::new();
        for degree in 0..=order {
            let mut current = vec![0u8; vars];
            enumerate_degree(vars, degree, 0, &mut current, &mut exps);
        }
        let index: BTreeMap<Vec<u8>, usize> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let degree = |e: &[u8]| e.iter().map(|&v| usize::from(v)).sum::<usize>();
        let mut products = Vec::new();
        for (i, a) in exps.iter().enumerate() {
            let da = degree(a);
            for (j, b) in exps.iter().enumerate() {
                if da + degree(b) > order {
                    continue;
                }
                let sum: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                products.push((i as u32, j as u32, index[&sum] as u32));
            }
        }
        let factorials = exps
            .iter()
            .map(|e| e.iter().map(|&k| factorial(usize::from(k))).product())
            .collect();
        Arc::new(JetLayout { vars, order, exps, index, products, factorials })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    /// Position of the monomial with the given exponent vector.
    pub fn position(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).copied()
    }
}

fn enumerate_degree(vars: usize, remaining: usize, slot: usize, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if vars == 0 {
        if remaining == 0 {
            out.push(current.clone());
        }
        return;
    }
    if slot == vars - 1 {
        current[slot] = remaining as u8;
        out.push(current.clone());
        current[slot] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        current[slot] = k as u8;
        enumerate_degree(vars, remaining - k, slot + 1, current, out);
    }
    current[slot] = 0;
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

#[derive(Debug, Clone)]
pub struct Jet {
    layout: Arc<JetLayout>,
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(layout: &Arc<JetLayout>, value: f64) -> Jet {
        let mut coeffs = vec![0.0; layout.len()];
        coeffs[0] = value;
        Jet { layout: layout.clone(), coeffs }
    }

    /// `value + δ_var`.
    pub fn variable(layout: &Arc<JetLayout>, value: f64, var: usize) -> Jet {
        let mut j = Jet::constant(layout, value);
        if layout.order >= 1 {
            let mut e = vec![0u8; layout.vars];
            e[var] = 1;
            j.coeffs[layout.index[&e]] = 1.0;
        }
        j
    }

    /// One seeded jet per base-point component, variable `offset + k` for
    /// component `k`.
    pub fn seed(layout: &Arc<JetLayout>, point: &[f64], offset: usize) -> Vec<Jet> {
        point
            .iter()
            .enumerate()
            .map(|(k, &v)| Jet::variable(layout, v, offset + k))
            .collect()
    }

    pub fn layout(&self) -> &Arc<JetLayout> {
        &self.layout
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Lifts a real constant into this jet's space.
    pub fn lift(&self, value: f64) -> Jet {
        Jet::constant(&self.layout, value)
    }

    /// Partial derivative with respect to the listed variables (repetition
    /// allowed, order irrelevant).
    pub fn derivative(&self, vars: &[usize]) -> Result<f64> {
        if vars.len() > self.layout.order {
            return Err(Error::Jet("derivative order exceeds jet order"));
        }
        let mut e = vec![0u8; self.layout.vars];
        for &v in vars {
            if v >= self.layout.vars {
                return Err(Error::Jet("derivative variable out of range"));
            }
            e[v] += 1;
        }
        let k = self.layout.index[&e];
        Ok(self.coeffs[k] * self.layout.factorials[k])
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        math::max_abs(&self.coeffs)
    }

    pub fn scale(&self, factor: f64) -> Jet {
        Jet {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// The jet minus its constant term.
    fn perturbation(&self) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] = 0.0;
        out
    }

    /// `f^p` for real `p`; the constant term must be positive.
    pub fn powf(&self, p: f64) -> Result<Jet> {
        let f0 = self.value();
        if !(f0 > 0.0) {
            return Err(Error::Jet("fractional power of a non-positive jet"));
        }
        let u = self.perturbation().scale(1.0 / f0);
        let mut term = self.lift(1.0);
        let mut acc = self.lift(1.0);
        for k in 1..=self.layout.order {
            term = (&term * &u).scale((p - (k as f64) + 1.0) / k as f64);
            acc = &acc + &term;
        }
        Ok(acc.scale(math::powf(f0, p)))
    }

    /// `1/f`; the constant term must be non-zero.
    pub fn recip(&self) -> Result<Jet> {
        let f0 = self.value();
        if f0 == 0.0 || !f0.is_finite() {
            return Err(Error::Jet("reciprocal of a jet with zero constant term"));
        }
        let u = self.perturbation().scale(-1.0 / f0);
        let mut term = self.lift(1.0);
        let mut acc = self.lift(1.0);
        for _ in 1..=self.layout.order {
            term = &term * &u;
            acc = &acc + &term;
        }
        Ok(acc.scale(1.0 / f0))
    }

    pub fn sqrt(&self) -> Result<Jet> {
        self.powf(0.5)
    }
}

fn same_layout(a: &Jet, b: &Jet) {
    debug_assert!(Arc::ptr_eq(&a.layout, &b.layout) || a.layout.len() == b.layout.len());
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        same_layout(self, rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        Jet { layout: self.layout.clone(), coeffs }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        same_layout(self, rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        Jet { layout: self.layout.clone(), coeffs }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        same_layout(self, rhs);
        let mut coeffs = vec![0.0; self.coeffs.len()];
        for &(i, j, k) in &self.layout.products {
            coeffs[k as usize] += self.coeffs[i as usize] * rhs.coeffs[j as usize];
        }
        Jet { layout: self.layout.clone(), coeffs }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        &self + &rhs
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += rhs;
        out
    }
}
