//! Finite-difference oracles and seeded sampling shared by the integration suites.
#![allow(dead_code)]

use finsler_core::metric::metric_value;
use finsler_core::{EvalPoint, Matrix, MetricSpec, Tensor4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, n: usize, (lo, hi): (f64, f64)) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// `count` points with `x` and `y` drawn from the boxes, keeping only those
/// where `F` is admissible.
pub fn admissible_points(
    spec: &MetricSpec,
    count: usize,
    seed: u64,
    x_box: (f64, f64),
    y_box: (f64, f64),
) -> Vec<EvalPoint> {
    let n = spec.dimension();
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        assert!(tries < 100 * count.max(1), "sampling box is mostly inadmissible");
        let pt = EvalPoint::new(uniform(&mut r, n, x_box), uniform(&mut r, n, y_box)).unwrap();
        if metric_value(spec, &pt).is_ok() {
            out.push(pt);
        }
    }
    out
}

pub fn f2(spec: &MetricSpec, x: &[f64], y: &[f64]) -> f64 {
    let f = metric_value(spec, &EvalPoint::new(x.to_vec(), y.to_vec()).unwrap()).unwrap();
    f * f
}

/// Relative size of the step for a given coordinate vector.
fn step(v: &[f64], rel: f64) -> f64 {
    rel * v.iter().fold(1.0f64, |a, b| a.max(b.abs()))
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// `(F²)_{y^l}` by central differences.
pub fn fd_dy(spec: &MetricSpec, x: &[f64], y: &[f64], l: usize) -> f64 {
    let d = |h: f64| {
        let (mut p, mut m) = (y.to_vec(), y.to_vec());
        p[l] += h;
        m[l] -= h;
        (f2(spec, x, &p) - f2(spec, x, &m)) / (2.0 * h)
    };
    let h = step(y, 1e-4);
    richardson(d(h), d(0.5 * h))
}

/// `(F²)_{x^l}` by central differences.
pub fn fd_dx(spec: &MetricSpec, x: &[f64], y: &[f64], l: usize) -> f64 {
    let d = |h: f64| {
        let (mut p, mut m) = (x.to_vec(), x.to_vec());
        p[l] += h;
        m[l] -= h;
        (f2(spec, &p, y) - f2(spec, &m, y)) / (2.0 * h)
    };
    let h = 1e-4;
    richardson(d(h), d(0.5 * h))
}

/// `(F²)_{x^k y^l}` by the four-point mixed stencil.
pub fn fd_dxdy(spec: &MetricSpec, x: &[f64], y: &[f64], k: usize, l: usize) -> f64 {
    let d = |hx: f64, hy: f64| {
        let mut total = 0.0;
        for (sx, sy, w) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
            let mut xp = x.to_vec();
            let mut yp = y.to_vec();
            xp[k] += sx * hx;
            yp[l] += sy * hy;
            total += w * f2(spec, &xp, &yp);
        }
        total / (4.0 * hx * hy)
    };
    let hy = step(y, 1e-4);
    richardson(d(1e-4, hy), d(0.5e-4, 0.5 * hy))
}

/// `½ (F²)_{y^i y^j}` by central differences.
pub fn fd_g(spec: &MetricSpec, x: &[f64], y: &[f64]) -> Matrix {
    let n = y.len();
    let h0 = step(y, 1e-4);
    let d = |i: usize, j: usize, h: f64| {
        let mut total = 0.0;
        for (si, sj, w) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
            let mut yp = y.to_vec();
            yp[i] += si * h;
            yp[j] += sj * h;
            total += w * f2(spec, x, &yp);
        }
        total / (4.0 * h * h)
    };
    Matrix::from_fn(n, |i, j| 0.5 * richardson(d(i, j, h0), d(i, j, 0.5 * h0)))
}

/// `G^i = ¼ g^{il}[(F²)_{x^k y^l} y^k - (F²)_{x^l}]` with every derivative differenced.
pub fn fd_spray(spec: &MetricSpec, pt: &EvalPoint) -> Vec<f64> {
    let (x, y) = (&pt.x, &pt.y);
    let n = y.len();
    let ginv = fd_g(spec, x, y).invert().unwrap().inverse;
    let bracket: Vec<f64> = (0..n)
        .map(|l| (0..n).map(|k| fd_dxdy(spec, x, y, k, l) * y[k]).sum::<f64>() - fd_dx(spec, x, y, l))
        .collect();
    (0..n).map(|i| 0.25 * (0..n).map(|l| ginv[(i, l)] * bracket[l]).sum::<f64>()).collect()
}

/// Mixed third `y`-derivatives of `f` by the eight-point sign stencil with one Richardson level.
pub fn fd_third<F: Fn(&[f64]) -> Vec<f64>>(f: F, y: &[f64], h: f64) -> Tensor4 {
    let n = y.len();
    let mut out = Tensor4::zeros(n);
    let signs = [-1.0, 1.0];
    for j in 0..n {
        for k in j..n {
            for l in k..n {
                let d = |h: f64| {
                    let mut acc = vec![0.0; n];
                    for s1 in signs {
                        for s2 in signs {
                            for s3 in signs {
                                let mut yp = y.to_vec();
                                yp[j] += s1 * h;
                                yp[k] += s2 * h;
                                yp[l] += s3 * h;
                                let v = f(&yp);
                                for i in 0..n {
                                    acc[i] += s1 * s2 * s3 * v[i];
                                }
                            }
                        }
                    }
                    acc.iter().map(|a| a / (8.0 * h * h * h)).collect::<Vec<f64>>()
                };
                let (c, fi) = (d(h), d(0.5 * h));
                for i in 0..n {
                    let v = richardson(c[i], fi[i]);
                    for (a, b, e) in [(j, k, l), (j, l, k), (k, j, l), (k, l, j), (l, j, k), (l, k, j)] {
                        out.set(i, a, b, e, v);
                    }
                }
            }
        }
    }
    out
}

/// `½ Γ^i_jk y^j y^k` with `Γ` built from differenced components of `a_ij(x)`.
pub fn christoffel_spray(spec: &MetricSpec, pt: &EvalPoint) -> Vec<f64> {
    let n = pt.dimension();
    let a = spec.a();
    let comp = |x: &[f64], i: usize, j: usize| a.symmetric_component(&[i, j], x).unwrap();
    let da = |k: usize, i: usize, j: usize| {
        let h = 1e-5;
        let (mut p, mut m) = (pt.x.clone(), pt.x.clone());
        p[k] += h;
        m[k] -= h;
        (comp(&p, i, j) - comp(&m, i, j)) / (2.0 * h)
    };
    let ainv = Matrix::from_fn(n, |i, j| comp(&pt.x, i, j)).invert().unwrap().inverse;
    let y = &pt.y;
    (0..n)
        .map(|i| {
            let mut s = 0.0;
            for l in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let gamma_l = 0.5 * (da(j, l, k) + da(k, l, j) - da(l, j, k));
                        s += ainv[(i, l)] * gamma_l * y[j] * y[k];
                    }
                }
            }
            0.5 * s
        })
        .collect()
}

pub fn max_rel_err(got: &[f64], want: &[f64]) -> f64 {
    let scale = want.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    got.iter().zip(want).fold(0.0f64, |a, (p, q)| a.max((p - q).abs())) / scale
}
