//! Example metrics shipped with the engine, addressable by name.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::metric::MetricSpec;
use crate::poly::Poly;
use crate::tensor::{QuadraticFormField, RankOneForm, SymmetricTensorField};

/// A named example: one or more metrics keyed by role, plus the sampling
/// box on which its properties are meant to be checked.
#[derive(Debug, Clone, PartialEq)]
pub struct Builtin {
    pub name: &'static str,
    pub description: &'static str,
    /// `(role, metric)`; the first entry is the primary metric.
    pub metrics: Vec<(&'static str, MetricSpec)>,
    pub x_box: (f64, f64),
    pub y_box: (f64, f64),
}

impl Builtin {
    pub fn primary(&self) -> &MetricSpec {
        &self.metrics[0].1
    }

    pub fn metric(&self, role: &str) -> Option<&MetricSpec> {
        self.metrics.iter().find(|(r, _)| *r == role).map(|(_, m)| m)
    }

    pub fn roles(&self) -> Vec<&'static str> {
        self.metrics.iter().map(|(r, _)| *r).collect()
    }
}

pub const NAMES: &[&str] =
    &["euclidean", "berwald-moor", "cubic", "riemann-poly", "conformal-pair", "dual-flat-exp", "dual-flat-broken"];

pub fn builtin(name: &str) -> Option<Builtin> {
    Some(match name {
        "euclidean" => Builtin {
            name: "euclidean",
            description: "m = 2, F = |y| in three dimensions",
            metrics: vec![("F", MetricSpec::mroot(euclidean_a(3)).expect("builtin"))],
            x_box: DEFAULT_X_BOX,
            y_box: DEFAULT_Y_BOX,
        },
        "berwald-moor" => Builtin {
            name: "berwald-moor",
            description: "m = 4, F = (y1 y2 y3 y4)^(1/4); bar adds B = |y|^2/4",
            metrics: vec![("F", berwald_moor()), ("bar", berwald_moor_bar())],
            x_box: DEFAULT_X_BOX,
            y_box: DEFAULT_Y_BOX,
        },
        "cubic" => Builtin {
            name: "cubic",
            description: "m = 3 diagonal cubic with x-dependent coefficients; bar and bar-zero are rank-one generalizations",
            metrics: vec![("F", MetricSpec::mroot(cubic_a()).expect("builtin")), ("bar", cubic_rank1(1.0)), ("bar-zero", cubic_rank1(0.0))],
            x_box: DEFAULT_X_BOX,
            y_box: DEFAULT_Y_BOX,
        },
        "riemann-poly" => Builtin {
            name: "riemann-poly",
            description: "m = 2 Riemannian metric in two dimensions with polynomial coefficients",
            metrics: vec![("F", riemann_poly())],
            x_box: DEFAULT_X_BOX,
            y_box: DEFAULT_Y_BOX,
        },
        "conformal-pair" => {
            let (bar, root) = conformal_pair(CONFORMAL_ALPHA);
            Builtin {
                name: "conformal-pair",
                description: "m = 2, bar = e^(alpha0) root with alpha0 = 0.3",
                metrics: vec![("bar", bar), ("root", root)],
                x_box: DEFAULT_X_BOX,
                y_box: DEFAULT_Y_BOX,
            }
        }
        "dual-flat-exp" => Builtin {
            name: "dual-flat-exp",
            description: "m = 3, A = p(c.x)(c.y)^3 with p the degree-6 Taylor polynomial of exp, B = |y|^2",
            metrics: vec![("F", dual_flat_exp())],
            x_box: (-0.1, 0.1),
            y_box: DEFAULT_Y_BOX,
        },
        "dual-flat-broken" => Builtin {
            name: "dual-flat-broken",
            description: "m = 2, A = |y|^2, B = x2 (y1)^2, not locally dually flat",
            metrics: vec![("F", dual_flat_broken(1))],
            x_box: DEFAULT_X_BOX,
            y_box: DEFAULT_Y_BOX,
        },
        _ => return None,
    })
}

pub const DEFAULT_X_BOX: (f64, f64) = (-0.25, 0.25);
pub const DEFAULT_Y_BOX: (f64, f64) = (0.5, 1.5);
pub const CONFORMAL_ALPHA: f64 = 0.3;
/// `c` of the truncated-exponential family.
pub const EXP_DIRECTION: [f64; 3] = [1.0, 0.5, 0.25];

fn var(n: usize, i: usize) -> Poly {
    Poly::variable(n, i).expect("axis in range")
}

fn cst(n: usize, v: f64) -> Poly {
    Poly::constant(n, v)
}

/// `a_ij y^i y^j` as a symmetric tensor field.
pub fn quadratic_a(a: &[Vec<Poly>]) -> SymmetricTensorField {
    let n = a.len();
    let mut terms = Vec::new();
    for i in 0..n {
        for j in i..n {
            let factor = if i == j { 1.0 } else { 2.0 };
            terms.push((vec![i, j], a[i][j].scale(factor)));
        }
    }
    SymmetricTensorField::new(n, 2, terms).expect("builtin")
}

pub fn euclidean_a(n: usize) -> SymmetricTensorField {
    SymmetricTensorField::constant(n, 2, (0..n).map(|i| (vec![i, i], 1.0))).expect("builtin")
}

pub fn berwald_moor() -> MetricSpec {
    let a = SymmetricTensorField::constant(4, 4, vec![(vec![0, 1, 2, 3], 1.0)]).expect("builtin");
    MetricSpec::mroot(a).expect("builtin").with_pseudo_finsler_ok(true)
}

pub fn berwald_moor_bar() -> MetricSpec {
    let a = berwald_moor().a().clone();
    let b = QuadraticFormField::constant(&Matrix::identity(4).scale(0.25)).expect("builtin");
    MetricSpec::generalized(a, b).expect("builtin").with_pseudo_finsler_ok(true)
}

/// `A = a1 (y1)^3 + a2 (y2)^3 + a3 (y3)^3` with
/// `a1 = 1 + x2/2`, `a2 = 1 + 0.4 x1 x3`, `a3 = 1.5 + (x1)^2 - 0.3 x2`.
pub fn cubic_a() -> SymmetricTensorField {
    let n = 3;
    let a1 = &cst(n, 1.0) + &var(n, 1).scale(0.5);
    let a2 = &cst(n, 1.0) + &(&var(n, 0) * &var(n, 2)).scale(0.4);
    let a3 = &(&cst(n, 1.5) + &(&var(n, 0) * &var(n, 0))) - &var(n, 1).scale(0.3);
    SymmetricTensorField::new(n, 3, vec![(vec![0, 0, 0], a1), (vec![1, 1, 1], a2), (vec![2, 2, 2], a3)])
        .expect("builtin")
}

/// `c = d = scale·(0.3 + x2, 0.2, x1/2)`.
pub fn cubic_form(scale: f64) -> Vec<Poly> {
    let n = 3;
    vec![
        (&cst(n, 0.3) + &var(n, 1)).scale(scale),
        cst(n, 0.2 * scale),
        var(n, 0).scale(0.5 * scale),
    ]
}

pub fn cubic_rank1(scale: f64) -> MetricSpec {
    let c = cubic_form(scale);
    MetricSpec::generalized_rank1(cubic_a(), RankOneForm::new(c.clone(), c).expect("builtin")).expect("builtin")
}

/// `a = [[1 + 0.3 (x2)^2, 0.1 x1 x2], [0.1 x1 x2, 1 + 0.3 (x1)^2]]`.
pub fn riemann_poly() -> MetricSpec {
    let n = 2;
    let x1 = var(n, 0);
    let x2 = var(n, 1);
    let off = (&x1 * &x2).scale(0.1);
    let a = vec![
        vec![&cst(n, 1.0) + &(&x2 * &x2).scale(0.3), off.clone()],
        vec![off, &cst(n, 1.0) + &(&x1 * &x1).scale(0.3)],
    ];
    MetricSpec::mroot(quadratic_a(&a)).expect("builtin")
}

fn conformal_a() -> Vec<Vec<Poly>> {
    let n = 3;
    let x = |i| var(n, i);
    vec![
        vec![&cst(n, 1.0) + &(&x(0) * &x(0)).scale(0.2), x(2).scale(0.1), cst(n, 0.0)],
        vec![x(2).scale(0.1), &cst(n, 1.0) + &(&x(1) * &x(1)).scale(0.1), x(0).scale(0.05)],
        vec![cst(n, 0.0), x(0).scale(0.05), &cst(n, 1.2) + &x(1).scale(0.1)],
    ]
}

/// `(bar, root)` with `root = (a_ij y^i y^j)^{1/2}` and
/// `bar² = root² + (e^{2 alpha0} - 1) a_ij y^i y^j`, so `bar = e^{alpha0} root`.
pub fn conformal_pair(alpha0: f64) -> (MetricSpec, MetricSpec) {
    let a = conformal_a();
    let s = crate::math::exp(2.0 * alpha0) - 1.0;
    let b = a.iter().map(|row| row.iter().map(|p| p.scale(s)).collect()).collect();
    let bar = MetricSpec::generalized(quadratic_a(&a), QuadraticFormField::new(b).expect("builtin")).expect("builtin");
    let root = MetricSpec::mroot(quadratic_a(&a)).expect("builtin");
    (bar, root)
}

/// `Σ_{k ≤ 6} t^k / k!` evaluated at `t = c·x`.
pub fn truncated_exp(c: &[f64]) -> Poly {
    let n = c.len();
    let t = c.iter().enumerate().fold(Poly::zero(n), |acc, (i, ci)| &acc + &var(n, i).scale(*ci));
    let mut term = cst(n, 1.0);
    let mut sum = cst(n, 1.0);
    for k in 1..=6 {
        term = (&term * &t).scale(1.0 / k as f64);
        sum = &sum + &term;
    }
    sum
}

/// `A = p(c·x)(c·y)^3`, `B = |y|^2` with `c` = [`EXP_DIRECTION`].
pub fn dual_flat_exp() -> MetricSpec {
    dual_flat_exp_with(&EXP_DIRECTION)
}

pub fn dual_flat_exp_with(c: &[f64]) -> MetricSpec {
    let n = c.len();
    let p = truncated_exp(c);
    let mut terms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                terms.push((vec![i, j, k], p.scale(c[i] * c[j] * c[k])));
            }
        }
    }
    let a = SymmetricTensorField::new(n, 3, terms).expect("builtin");
    let b = QuadraticFormField::constant(&Matrix::identity(n)).expect("builtin");
    MetricSpec::generalized(a, b).expect("builtin")
}

/// `A = |y|^2`, `B = x_axis (y1)^2` in three dimensions; dually flat only for `axis = 0`.
pub fn dual_flat_broken(axis: usize) -> MetricSpec {
    let n = 3;
    let mut b = vec![vec![Poly::zero(n); n]; n];
    b[0][0] = var(n, axis);
    MetricSpec::generalized(euclidean_a(n), QuadraticFormField::new(b).expect("builtin")).expect("builtin")
}
