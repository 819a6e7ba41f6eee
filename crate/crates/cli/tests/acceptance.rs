//! The acceptance gate: one line per criterion, non-zero exit if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::Command;

use common::{admissible_points, christoffel_spray, fd_spray, fd_third, max_rel_err};
use finsler_core::builtins::{self, builtin, CONFORMAL_ALPHA, NAMES};
use finsler_core::metric::{fundamental_tensor, hessian_f2_numeric, inverse_a, inverse_g_mroot, metric_value, rank1_update_inverse};
use finsler_core::spray::{dual_flat_forms, spray_coefficients, SprayEval};
use finsler_core::verify::{
    conformal_check, delta_k, dual_flat_conditions, dual_flat_residual, nondegeneracy_value, pair_condition_residual,
    projective_check, spray_gap_residual, Interpretation, RankOnePair, Verdict,
};
use finsler_core::{geodesic_integrate, EvalPoint, Jet, JetLayout, Matrix, MetricKind, MetricSpec};
use serde_json::Value;

const X_BOX: (f64, f64) = (-0.25, 0.25);
const Y_BOX: (f64, f64) = (0.5, 1.5);

struct Line {
    pass: bool,
    detail: String,
}

fn line(pass: bool, detail: impl Into<String>) -> Line {
    Line { pass, detail: detail.into() }
}

fn all_metrics() -> Vec<(String, MetricSpec, (f64, f64))> {
    let mut out = Vec::new();
    for name in NAMES {
        let b = builtin(name).unwrap();
        for (role, m) in &b.metrics {
            out.push((format!("{name}/{role}"), m.clone(), b.x_box));
        }
    }
    out
}

fn a_hessian_invertible(spec: &MetricSpec, pt: &EvalPoint) -> bool {
    inverse_a(&spec.a().hess_y(pt).unwrap()).is_ok()
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff.abs() / scale.abs().max(1.0)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_finsler"))
}

fn run_json(args: &[&str], no_parallel: bool) -> (i32, String) {
    let mut cmd = bin();
    cmd.args(args);
    if no_parallel {
        cmd.env("FINSLER_NO_PARALLEL", "1");
    } else {
        cmd.env_remove("FINSLER_NO_PARALLEL");
    }
    let out = cmd.output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn check_by_name<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap()
}

/// Homogeneity identities of `A`, the fundamental tensor contractions and `y_i = g_ij y^j`.
fn criterion_1() -> Line {
    let mut worst = 0.0f64;
    let mut points = 0;
    let mut inverse_skipped = Vec::new();
    for (name, spec, x_box) in all_metrics() {
        let m = spec.m() as f64;
        let n = spec.dimension();
        let mroot = matches!(spec.kind(), MetricKind::MRoot { .. });
        let pts = admissible_points(&spec, 500, 101, x_box, Y_BOX);
        let skip_inverse = !a_hessian_invertible(&spec, &pts[0]);
        if skip_inverse {
            inverse_skipped.push(name.clone());
        }
        for pt in &pts {
            points += 1;
            let y = &pt.y;
            let a = spec.a().eval(pt).unwrap();
            let ga = spec.a().grad_y(pt).unwrap();
            let ha = spec.a().hess_y(pt).unwrap();
            let euler: f64 = (0..n).map(|i| y[i] * ga[i]).sum();
            worst = worst.max(rel(euler - m * a, m * a));
            for j in 0..n {
                let s: f64 = (0..n).map(|i| y[i] * ha[(i, j)]).sum();
                worst = worst.max(rel(s - (m - 1.0) * ga[j], ga[j]));
            }
            if !skip_inverse {
                let hinv = inverse_a(&ha).unwrap().inverse;
                worst = worst.max(hinv.mul(&ha).sub(&Matrix::identity(n)).max_abs());
                for j in 0..n {
                    let t: f64 = (0..n).map(|i| hinv[(i, j)] * ga[i]).sum();
                    worst = worst.max(rel(t - y[j] / (m - 1.0), y[j]));
                }
                worst = worst.max(rel(hinv.bilinear(&ga, &ga) - m * a / (m - 1.0), m * a));
            }
            let g = fundamental_tensor(&spec, pt).unwrap();
            let f = metric_value(&spec, pt).unwrap();
            worst = worst.max(rel(g.bilinear(y, y) - f * f, f * f));
            if mroot {
                let low = g.mul_vec(y);
                for i in 0..n {
                    // ½ ∂F²/∂y^i = (1/m) A^{2/m-1} A_i
                    let yi = a.powf(2.0 / m - 1.0) * ga[i] / m;
                    worst = worst.max(rel(low[i] - yi, yi));
                }
            }
        }
    }
    line(
        worst <= 1e-9,
        format!(
            "identity suite: max scaled residual {worst:.2e} <= 1e-9 over {points} points; A^ij identities skipped where A_ij is singular: {}",
            inverse_skipped.join(", ")
        ),
    )
}

/// Closed-form fundamental tensor against the differenced Hessian, plus the Berwald-Moór golden values.
fn criterion_2() -> Line {
    let mut worst = 0.0f64;
    for (_, spec, x_box) in all_metrics() {
        for pt in admissible_points(&spec, 100, 102, x_box, Y_BOX) {
            let g = fundamental_tensor(&spec, &pt).unwrap();
            let num = hessian_f2_numeric(&spec, &pt).unwrap();
            worst = worst.max(g.sub(&num).max_abs() / g.max_abs());
        }
    }
    let bm = builtins::berwald_moor();
    let pt = EvalPoint::new(vec![0.4, -0.2, 0.1, 0.3], vec![1.0; 4]).unwrap();
    let g = fundamental_tensor(&bm, &pt).unwrap();
    let num = hessian_f2_numeric(&bm, &pt).unwrap();
    let closed = (g[(0, 0)] + 0.125).abs().max((g[(0, 1)] - 0.125).abs());
    let oracle = (num[(0, 0)] + 0.125).abs().max((num[(0, 1)] - 0.125).abs());
    line(
        worst <= 1e-5 && closed <= 1e-9 && oracle <= 1e-6,
        format!("fundamental tensor vs differenced Hessian: max rel err {worst:.2e} <= 1e-5; Berwald-Moór g_11, g_12 golden err {closed:.1e} (closed) / {oracle:.1e} (oracle)"),
    )
}

/// Closed-form inverse, rank-one update and its degeneracy threshold.
fn criterion_3() -> Line {
    let mut closed_err = 0.0f64;
    for (_, spec, x_box) in all_metrics() {
        if !matches!(spec.kind(), MetricKind::MRoot { .. }) {
            continue;
        }
        for pt in admissible_points(&spec, 100, 103, x_box, Y_BOX) {
            if !a_hessian_invertible(&spec, &pt) {
                continue;
            }
            let closed = inverse_g_mroot(&spec, &pt).unwrap();
            let dense = fundamental_tensor(&spec, &pt).unwrap().invert().unwrap().inverse;
            closed_err = closed_err.max(closed.sub(&dense).max_abs() / dense.max_abs().max(1.0));
        }
    }
    let mut r = common::rng(303);
    let mut update_err = 0.0f64;
    for k in 0..100 {
        let n = 2 + k % 3;
        let l = Matrix::from_fn(n, |i, j| if i >= j { common::uniform(&mut r, 1, (-0.5, 0.5))[0] + if i == j { 1.5 } else { 0.0 } } else { 0.0 });
        let a = l.mul(&l.transpose());
        let ainv = a.invert().unwrap().inverse;
        let c = common::uniform(&mut r, n, (-1.0, 1.0));
        let lambda = common::uniform(&mut r, 1, (-1.0, 1.0))[0];
        // D = λC keeps C_i D_j symmetric
        let d: Vec<f64> = c.iter().map(|v| lambda * v).collect();
        let dense = Matrix::from_fn(n, |i, j| a[(i, j)] + c[i] * d[j]).invert().unwrap().inverse;
        let fast = rank1_update_inverse(&ainv, &c, &d).unwrap();
        update_err = update_err.max(fast.sub(&dense).max_abs() / dense.max_abs().max(1.0));
    }
    let mut threshold_ok = true;
    let mut probes = 0;
    let ainv = Matrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]);
    let c = [0.6, -0.3];
    let q = ainv.bilinear(&c, &c);
    for target in [0.0, 1e-13, -1e-13, 9e-13, -9e-13, 1.1e-12, -1.1e-12, 1e-11, 0.5, -2.0] {
        let lambda = (target - 1.0) / q;
        let d = [lambda * c[0], lambda * c[1]];
        let u = ainv.mul_vec(&c);
        let denom = 1.0 + d[0] * u[0] + d[1] * u[1];
        let rejected = rank1_update_inverse(&ainv, &c, &d).is_err();
        threshold_ok &= rejected == (denom.abs() <= 1e-12);
        probes += 1;
    }
    line(
        closed_err <= 1e-9 && update_err <= 1e-9 && threshold_ok,
        format!("closed-form inverse err {closed_err:.2e}, rank-one update err {update_err:.2e} over 100 pairs (<= 1e-9); degeneracy decision matches |1+A^pq C_p D_q| <= 1e-12 on {probes}/{probes} probes: {threshold_ok}"),
    )
}

/// `2Δ_k` against `(F²)_{x^j y^k} y^j - (F²)_{x^k}`, the latter from the forms and from a joint `(x, y)` jet.
fn criterion_4() -> Line {
    let spec = builtin("cubic").unwrap().primary().clone();
    let n = spec.dimension();
    let layout = JetLayout::new(2 * n, 2);
    let mut worst_forms = 0.0f64;
    let mut worst_jet = 0.0f64;
    for pt in admissible_points(&spec, 200, 104, X_BOX, Y_BOX) {
        let delta = delta_k(&spec, &pt).unwrap();
        let forms = dual_flat_forms(&spec, &pt).unwrap();
        let xs: Vec<Jet> = Jet::seed(&layout, &pt.x, 0);
        let ys: Vec<Jet> = Jet::seed(&layout, &pt.y, n);
        let f2 = spec.f2_jet(&xs, &ys).unwrap();
        for k in 0..n {
            let mixed: f64 = (0..n).map(|j| f2.derivative(&[j, n + k]).unwrap() * pt.y[j]).sum();
            let dx = f2.derivative(&[k]).unwrap();
            let scale = mixed.abs().max(dx.abs());
            worst_jet = worst_jet.max(rel(2.0 * delta[k] - (mixed - dx), scale));
            worst_forms = worst_forms.max(rel(2.0 * delta[k] - (forms.lhs[k] - forms.rhs[k]), scale));
        }
    }
    line(
        worst_forms <= 1e-9 && worst_jet <= 1e-9,
        format!("2 delta_k vs F^2 bracket on 200 cubic points: {worst_forms:.2e} (forms), {worst_jet:.2e} (joint jet) <= 1e-9"),
    )
}

/// Constant coefficients pass through the CLI; the exponential family co-vanishes; a broken spec fails.
fn criterion_5() -> Line {
    let mut a_ok = true;
    let mut a_max = 0.0f64;
    for (spec, metric) in [("builtin:euclidean", "F"), ("builtin:berwald-moor", "F"), ("builtin:berwald-moor", "bar")] {
        let (code, out) = run_json(&["--spec", spec, "--tol", "1e-12", "check", "dual-flat", "--metric", metric], false);
        let report: Value = serde_json::from_str(&out).unwrap();
        let max = check_by_name(&report, "definition")["max_residual"].as_f64().unwrap();
        a_max = a_max.max(max);
        a_ok &= code == 0 && max <= 1e-12;
    }

    let spec = builtins::dual_flat_exp();
    let mut r = common::rng(105);
    let xs: Vec<Vec<f64>> = (0..10).map(|_| common::uniform(&mut r, 3, (-0.1, 0.1))).collect();
    let ys: Vec<Vec<f64>> = (0..20).map(|_| common::uniform(&mut r, 3, Y_BOX)).collect();
    let cond = dual_flat_conditions(&spec, &xs, &ys, 1e-6, false).unwrap();
    let mut def_max = 0.0f64;
    for x in &xs {
        for y in &ys {
            let pt = EvalPoint::new(x.clone(), y.clone()).unwrap();
            def_max = def_max.max(dual_flat_residual(&spec, &pt).unwrap().norm());
        }
    }
    let b_ok = cond.b_condition.max_residual <= 1e-6
        && cond.a_condition.max_residual <= 1e-6
        && def_max <= 1e-6
        && cond.verdict() == Verdict::Pass;

    let (code, out) = run_json(&["--spec", "builtin:dual-flat-broken", "check", "dual-flat"], false);
    let report: Value = serde_json::from_str(&out).unwrap();
    let broken = check_by_name(&report, "definition")["max_residual"].as_f64().unwrap();
    let literal = builtins::dual_flat_broken(0);
    let literal_max = admissible_points(&literal, 50, 106, X_BOX, Y_BOX)
        .iter()
        .map(|p| dual_flat_residual(&literal, p).unwrap().norm())
        .fold(0.0, f64::max);
    let c_ok = code == 1 && broken > 1e-2;
    line(
        a_ok && b_ok && c_ok,
        format!(
            "(a) constant specs max {a_max:.1e} <= 1e-12; (b) exp family b/a/definition residuals {:.1e}/{:.1e}/{def_max:.1e} <= 1e-6; (c) B = x2 (y1)^2 max {broken:.2e} > 1e-2 (B = x1 (y1)^2 as written is dually flat: {literal_max:.1e})",
            cond.b_condition.max_residual, cond.a_condition.max_residual
        ),
    )
}

/// Projective comparison, zero forms, the spray-gap implication and the rigidity sweep.
fn criterion_6() -> Line {
    let mut a_ok = true;
    for (_, spec, x_box) in all_metrics() {
        for pt in admissible_points(&spec, 20, 107, x_box, Y_BOX) {
            let c = projective_check(&spec, &spec, &pt, 1e-12).unwrap();
            a_ok &= c.is_projective && c.p == 0.0 && c.cross_residual <= 1e-12;
        }
    }

    let (code, out) = run_json(&["--spec", "builtin:cubic", "check", "projective", "--metric", "bar-zero"], false);
    let report: Value = serde_json::from_str(&out).unwrap();
    let p_range = report["details"]["p_range"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect::<Vec<_>>();
    let b_ok = code == 0 && p_range.iter().all(|p| *p == 0.0);

    let root = builtin("cubic").unwrap().primary().clone();
    let constant_a = finsler_core::SymmetricTensorField::constant(
        3,
        3,
        vec![(vec![0, 0, 0], 1.0), (vec![1, 1, 1], 1.2), (vec![2, 2, 2], 0.8), (vec![0, 1, 2], 0.1)],
    )
    .unwrap();
    let cst: Vec<finsler_core::Poly> = [0.3, -0.2, 0.1].iter().map(|v| finsler_core::Poly::constant(3, *v)).collect();
    let constant_pair = (
        MetricSpec::generalized_rank1(constant_a.clone(), finsler_core::RankOneForm::new(cst.clone(), cst).unwrap()).unwrap(),
        MetricSpec::mroot(constant_a).unwrap(),
    );
    let family = vec![
        constant_pair,
        (builtins::cubic_rank1(0.0), root.clone()),
        (builtins::cubic_rank1(0.01), root.clone()),
        (builtins::cubic_rank1(1.0), root.clone()),
    ];
    let (mut qualifying, mut implied, mut total) = (0, 0, 0);
    for (bar, f) in &family {
        let pair = RankOnePair::new(bar, f).unwrap();
        for pt in admissible_points(bar, 50, 108, X_BOX, Y_BOX) {
            total += 1;
            if spray_gap_residual(&pair, &pt, Interpretation::Root).unwrap().norm() <= 1e-8 {
                qualifying += 1;
                if projective_check(bar, f, &pt, 1e-8).unwrap().is_projective {
                    implied += 1;
                }
            }
        }
    }
    let c_ok = qualifying > 0 && implied == qualifying;

    let tol = 1e-8;
    let mut satisfying = Vec::new();
    let mut sweep = Vec::new();
    for s in [0.0, 0.25, 0.5, 1.0, 2.0] {
        let bar = builtins::cubic_rank1(s);
        let pair = RankOnePair::new(&bar, &root).unwrap();
        let pts = admissible_points(&bar, 40, 109, X_BOX, Y_BOX);
        let cond_max = pts
            .iter()
            .map(|p| pair_condition_residual(&pair, p, Interpretation::Root).unwrap().norm())
            .fold(0.0, f64::max);
        let pp_min = pts
            .iter()
            .map(|p| nondegeneracy_value(&pair, p, Interpretation::Root).unwrap().abs())
            .fold(f64::INFINITY, f64::min);
        if cond_max <= tol && pp_min > 0.01 {
            satisfying.push(s);
        }
        sweep.push(format!("s={s}: cond {cond_max:.1e}, |pp| min {pp_min:.1e}"));
    }
    let d_ok = satisfying.iter().all(|s| *s == 0.0);
    line(
        a_ok && b_ok && c_ok && d_ok,
        format!(
            "(a) self-comparison exact: {a_ok}; (b) zero form via CLI exit {code}, P range {p_range:?}; (c) gap <= 1e-8 at {qualifying}/{total} points, projective at {implied}/{qualifying}; (d) members meeting both conditions {satisfying:?} [{}]",
            sweep.join("; ")
        ),
    )
}

/// The constructed conformal pair is a Riemannian homothety; Berwald-Moór is not conformal to its root.
fn criterion_7() -> Line {
    let (bar, root) = builtins::conformal_pair(CONFORMAL_ALPHA);
    let mut r = common::rng(110);
    let xs: Vec<Vec<f64>> = (0..10).map(|_| common::uniform(&mut r, 3, X_BOX)).collect();
    let ys: Vec<Vec<f64>> = (0..24).map(|_| common::uniform(&mut r, 3, Y_BOX)).collect();
    let rep = conformal_check(&bar, &root, &xs, &ys, 1e-9).unwrap();
    let alpha_err = rep.alpha_per_x.iter().map(|(_, a)| (a.unwrap() - CONFORMAL_ALPHA).abs()).fold(0.0, f64::max);
    let m4 = rep.m4_residual.unwrap_or(f64::INFINITY);
    let ok1 = rep.is_conformal && alpha_err <= 1e-9 && rep.cartan_scores.0 <= 1e-10 && rep.cartan_scores.1 <= 1e-10 && m4 <= 1e-9;
    let ys4: Vec<Vec<f64>> = (0..24).map(|_| common::uniform(&mut r, 4, Y_BOX)).collect();
    let xs4: Vec<Vec<f64>> = (0..5).map(|_| common::uniform(&mut r, 4, X_BOX)).collect();
    let bm = conformal_check(&builtins::berwald_moor_bar(), &builtins::berwald_moor(), &xs4, &ys4, 1e-9).unwrap();
    line(
        ok1 && !bm.is_conformal,
        format!(
            "conformal pair: alpha err {alpha_err:.1e} <= 1e-9, Cartan scores {:.1e}/{:.1e} <= 1e-10, reconstruction {m4:.1e} <= 1e-9; Berwald-Moór pair conformal: {} (variation {:.2e})",
            rep.cartan_scores.0, rep.cartan_scores.1, bm.is_conformal, bm.max_variation
        ),
    )
}

fn third_derivative_errors(spec: &MetricSpec, pt: &EvalPoint) -> (f64, f64) {
    let eval = SprayEval::evaluate(spec, pt).unwrap();
    let h = 1e-2 * pt.y.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let fd = fd_third(|y: &[f64]| spray_coefficients(spec, &pt.with_y(y.to_vec())).unwrap(), &pt.y, h);
    let n = pt.dimension();
    let b_err = eval.b_curv.as_slice().iter().zip(fd.as_slice()).fold(0.0f64, |a, (p, q)| a.max((p - q).abs()))
        / eval.b_curv.max_abs().max(1.0);
    let mut e_err = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            let e = 0.5 * (0..n).map(|m| fd.get(m, j, k, m)).sum::<f64>();
            e_err = e_err.max((e - eval.e_curv[(j, k)]).abs());
        }
    }
    (b_err, e_err / eval.e_curv.max_abs().max(1.0))
}

/// Jets against finite differences for `G`, `B`, `E`, and the vanishing cases.
fn criterion_8() -> Line {
    let rp = builtins::riemann_poly();
    let (mut g_err, mut b_err, mut e_err, mut chr_err) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for pt in admissible_points(&rp, 50, 111, X_BOX, Y_BOX) {
        let g = spray_coefficients(&rp, &pt).unwrap();
        g_err = g_err.max(max_rel_err(&g, &fd_spray(&rp, &pt)));
        chr_err = chr_err.max(max_rel_err(&g, &christoffel_spray(&rp, &pt)));
        let (b, e) = third_derivative_errors(&rp, &pt);
        b_err = b_err.max(b);
        e_err = e_err.max(e);
    }
    let cubic = builtin("cubic").unwrap().primary().clone();
    let (mut cg, mut cb, mut ce) = (0.0f64, 0.0f64, 0.0f64);
    for pt in admissible_points(&cubic, 10, 112, X_BOX, (0.7, 1.3)) {
        cg = cg.max(max_rel_err(&spray_coefficients(&cubic, &pt).unwrap(), &fd_spray(&cubic, &pt)));
        let (b, e) = third_derivative_errors(&cubic, &pt);
        cb = cb.max(b);
        ce = ce.max(e);
    }
    let mut const_max = 0.0f64;
    for spec in [builtin("euclidean").unwrap().primary().clone(), builtins::berwald_moor(), builtins::berwald_moor_bar()] {
        for pt in admissible_points(&spec, 20, 113, X_BOX, Y_BOX) {
            let s = SprayEval::evaluate(&spec, &pt).unwrap();
            const_max = const_max.max(s.b_curv.max_abs()).max(s.e_curv.max_abs()).max(s.d_curv.max_abs());
        }
    }
    let mut quad_max = 0.0f64;
    let (cbar, croot) = builtins::conformal_pair(CONFORMAL_ALPHA);
    for spec in [rp.clone(), cbar, croot, builtins::dual_flat_broken(1)] {
        for pt in admissible_points(&spec, 20, 114, X_BOX, Y_BOX) {
            let s = SprayEval::evaluate(&spec, &pt).unwrap();
            quad_max = quad_max.max(s.e_curv.max_abs()).max(s.d_curv.max_abs());
        }
    }
    let pass = g_err <= 1e-5 && b_err <= 1e-5 && e_err <= 1e-5 && cg <= 1e-5 && cb <= 1e-5 && ce <= 1e-5 && const_max <= 1e-10 && quad_max <= 1e-8;
    line(
        pass,
        format!(
            "riemann-poly G/B/E vs differences {g_err:.1e}/{b_err:.1e}/{e_err:.1e} (Christoffel {chr_err:.1e}); cubic m=3 {cg:.1e}/{cb:.1e}/{ce:.1e}; all <= 1e-5; constant B,E,D max {const_max:.1e} <= 1e-10; m=2 E,D max {quad_max:.1e} <= 1e-8"
        ),
    )
}

/// Drift at the fine step, fourth-order convergence, straight lines for constant coefficients.
fn criterion_9() -> Line {
    let rp = builtins::riemann_poly();
    let (x0, y0) = ([0.1, -0.1], [1.0, 0.5]);
    let fine = geodesic_integrate(&rp, &x0, &y0, 1.0, 1e-3).unwrap();
    // the ratio is read at steps where truncation error dominates rounding
    let d1 = geodesic_integrate(&rp, &x0, &y0, 1.0, 0.1).unwrap().energy_drift;
    let d2 = geodesic_integrate(&rp, &x0, &y0, 1.0, 0.05).unwrap().energy_drift;
    let ratio = d1 / d2;
    let mut dev = 0.0f64;
    for spec in [builtin("euclidean").unwrap().primary().clone(), builtins::berwald_moor()] {
        let n = spec.dimension();
        let xs: Vec<f64> = (0..n).map(|i| 0.05 * i as f64).collect();
        let ys: Vec<f64> = (0..n).map(|i| 0.8 + 0.1 * i as f64).collect();
        let t = geodesic_integrate(&spec, &xs, &ys, 1.0, 1e-3).unwrap();
        for (time, (x, y)) in t.times.iter().zip(&t.states) {
            for i in 0..n {
                dev = dev.max((x[i] - (xs[i] + time * ys[i])).abs()).max((y[i] - ys[i]).abs());
            }
        }
    }
    line(
        fine.completed() && fine.energy_drift <= 1e-6 && (12.0..=20.0).contains(&ratio) && dev <= 1e-12,
        format!(
            "drift {:.1e} <= 1e-6 at step 1e-3; drift ratio {ratio:.2} in [12, 20] for steps 0.1 -> 0.05; straight-line deviation {dev:.1e} <= 1e-12",
            fine.energy_drift
        ),
    )
}

/// Identical invocations give byte-identical JSON, serial or parallel.
fn criterion_10() -> Line {
    let runs: [&[&str]; 3] = [
        &["--spec", "builtin:cubic", "--seed", "7", "check", "projective"],
        &["--spec", "builtin:dual-flat-exp", "check", "dual-flat"],
        &["--spec", "builtin:conformal-pair", "check", "conformal"],
    ];
    let mut identical = true;
    let mut bytes = 0;
    for args in runs {
        let outputs: Vec<(i32, String)> = [false, false, true, true].iter().map(|np| run_json(args, *np)).collect();
        identical &= outputs.iter().all(|o| o == &outputs[0]) && !outputs[0].1.is_empty();
        bytes += outputs[0].1.len();
    }
    line(identical, format!("3 commands x 4 runs (parallel and FINSLER_NO_PARALLEL=1) byte-identical: {identical} ({bytes} bytes per run set)"))
}

fn main() {
    let criteria: [(&str, fn() -> Line); 10] = [
        ("identities", criterion_1),
        ("fundamental tensor", criterion_2),
        ("inverses", criterion_3),
        ("delta consistency", criterion_4),
        ("dual flatness", criterion_5),
        ("projective", criterion_6),
        ("conformal rigidity", criterion_7),
        ("curvature engine", criterion_8),
        ("geodesics", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let l = f();
        if !l.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<20} {}  {} ({:.1}s)",
            i + 1,
            name,
            if l.pass { "PASS" } else { "FAIL" },
            l.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
