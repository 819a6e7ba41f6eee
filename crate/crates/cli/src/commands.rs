use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use finsler_core::builtins::{self, DEFAULT_X_BOX, DEFAULT_Y_BOX};
use finsler_core::metric::riemannian_score;
use finsler_core::verify::{
    conformal_check, dual_flat_conditions, dual_flat_residual, nondegeneracy_value, pair_condition_residual,
    projective_check, reduced_dual_flat_residual, split_diagnostics, spray_gap_residual, Interpretation, RankOnePair,
    ResidualReport, Verdict, IDENTITY_TOL, IRREDUCIBILITY_DISCLAIMER,
};
use finsler_core::{geodesic_integrate, EvalPoint, MetricEval, MetricKind, MetricSpec, SprayEval};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{BuiltinAction, CheckKind, Cli, Command, GlobalOpts};
use crate::report::{exit_code, CheckReport, RunReport, Timing};
use crate::sampling::{SampleBoxes, Sampler};
use crate::specfile::{self, SpecFile};

/// Directions sampled per position in grid-based checks.
pub const Y_PER_X: usize = 20;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl fmt::Display) -> CliError {
        CliError { code: 3, message: message.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<finsler_core::Error> for CliError {
    fn from(e: finsler_core::Error) -> CliError {
        CliError::usage(e)
    }
}

pub fn parallel_enabled() -> bool {
    std::env::var("FINSLER_NO_PARALLEL").map(|v| v.trim() != "1").unwrap_or(true)
}

/// Evaluates `f` at every point, in parallel unless disabled; output order follows input order.
pub fn map_points<T, F>(points: &[EvalPoint], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&EvalPoint) -> T + Sync + Send,
{
    if parallel_enabled() {
        points.par_iter().map(f).collect()
    } else {
        points.iter().map(f).collect()
    }
}

/// Metrics of a loaded spec, in declaration order for builtins and name order for files.
pub struct Loaded {
    pub source: String,
    pub metrics: Vec<(String, MetricSpec)>,
    pub boxes: SampleBoxes,
}

impl Loaded {
    pub fn get(&self, name: &str) -> Result<&MetricSpec, CliError> {
        self.metrics.iter().find(|(n, _)| n == name).map(|(_, m)| m).ok_or_else(|| {
            let names: Vec<&str> = self.metrics.iter().map(|(n, _)| n.as_str()).collect();
            CliError::usage(format!("no metric named {name:?} in {} (available: {})", self.source, names.join(", ")))
        })
    }

    fn has(&self, name: &str) -> bool {
        self.metrics.iter().any(|(n, _)| n == name)
    }

    fn primary_name(&self) -> &str {
        if self.has("F") {
            "F"
        } else {
            &self.metrics[0].0
        }
    }

    fn pick(&self, given: &Option<String>, defaults: &[&str], what: &str) -> Result<String, CliError> {
        if let Some(g) = given {
            self.get(g)?;
            return Ok(g.clone());
        }
        defaults
            .iter()
            .find(|d| self.has(d))
            .map(|d| d.to_string())
            .ok_or_else(|| CliError::usage(format!("{what}: pass --metric/--against (tried {})", defaults.join(", "))))
    }
}

pub fn load(spec: &Option<String>, global: &GlobalOpts) -> Result<Loaded, CliError> {
    let source = spec.clone().ok_or_else(|| CliError::usage("--spec PATH or --spec builtin:NAME is required"))?;
    let (metrics, x_box, y_box) = if let Some(name) = source.strip_prefix("builtin:") {
        let b = builtins::builtin(name).ok_or_else(|| {
            CliError::usage(format!("unknown builtin {name:?} (available: {})", builtins::NAMES.join(", ")))
        })?;
        let metrics = b.metrics.iter().map(|(r, m)| (r.to_string(), m.clone())).collect();
        (metrics, b.x_box, b.y_box)
    } else {
        let file = specfile::parse_spec(Path::new(&source)).map_err(|e| CliError::usage(format!("{source}: {e}")))?;
        let metrics = file.metric_specs().map_err(|e| CliError::usage(format!("{source}: {e}")))?;
        (metrics, DEFAULT_X_BOX, DEFAULT_Y_BOX)
    };
    let pair = |v: &Option<Vec<f64>>, default: (f64, f64), flag: &str| -> Result<(f64, f64), CliError> {
        match v {
            None => Ok(default),
            Some(v) if v.len() == 2 && v[0] <= v[1] && v.iter().all(|x| x.is_finite()) => Ok((v[0], v[1])),
            Some(_) => Err(CliError::usage(format!("{flag} needs finite LO <= HI"))),
        }
    };
    let boxes = SampleBoxes { x_box: pair(&global.x_box, x_box, "--box")?, y_box: pair(&global.ybox, y_box, "--ybox")? };
    Ok(Loaded { source, metrics, boxes })
}

/// What a command produced: the report, text for stdout, and the process exit code.
pub struct Outcome {
    pub report: Option<RunReport>,
    pub stdout: String,
    pub code: i32,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let g = &cli.global;
    if g.samples == 0 {
        return Err(CliError::usage("--samples must be positive"));
    }
    if let Some(t) = g.tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(CliError::usage("--tol must be a finite non-negative number"));
        }
    }
    let start = Instant::now();
    let mut outcome = match &cli.command {
        Command::Builtin { action } => return builtin_cmd(action),
        Command::Eval { metric, x, y } => cmd_eval(g, metric, x, y)?,
        Command::Check { kind, metric, against } => cmd_check(g, *kind, metric, against)?,
        Command::Geodesic { metric, x0, y0, t_end, step, out } => {
            cmd_geodesic(g, metric, x0, y0, *t_end, *step, out.as_deref())?
        }
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    eprintln!("elapsed: {elapsed_ms:.1} ms");
    if let Some(report) = outcome.report.as_mut() {
        if g.timing {
            report.timing = Some(Timing { elapsed_ms });
        }
        let text = report.to_json();
        match &g.json {
            Some(path) => {
                fs::write(path, &text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
                outcome.stdout.push_str(&format!("verdict: {}\n", report.verdict));
            }
            None => outcome.stdout.push_str(&text),
        }
    }
    Ok(outcome)
}

fn builtin_cmd(action: &BuiltinAction) -> Result<Outcome, CliError> {
    let stdout = match action {
        BuiltinAction::List => {
            let mut s = String::new();
            for name in builtins::NAMES {
                let b = builtins::builtin(name).expect("listed builtin");
                s.push_str(&format!("{name:<18} [{}] {}\n", b.roles().join(", "), b.description));
            }
            s
        }
        BuiltinAction::Show { name } => {
            let b = builtins::builtin(name).ok_or_else(|| CliError::usage(format!("unknown builtin {name:?}")))?;
            let mut s = SpecFile::from_metrics(b.metrics.iter().map(|(r, m)| (*r, m))).to_json_pretty();
            s.push('\n');
            s
        }
    };
    Ok(Outcome { report: None, stdout, code: 0 })
}

fn tolerance(g: &GlobalOpts) -> f64 {
    g.tol.unwrap_or(IDENTITY_TOL)
}

fn base_command(g: &GlobalOpts, loaded: &Loaded, name: &str) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("name".into(), json!(name));
    m.insert("spec".into(), json!(loaded.source));
    m.insert("tol".into(), json!(tolerance(g)));
    m.insert("box".into(), json!([loaded.boxes.x_box.0, loaded.boxes.x_box.1]));
    m.insert("ybox".into(), json!([loaded.boxes.y_box.0, loaded.boxes.y_box.1]));
    m
}

fn point(x: &[f64], y: &[f64]) -> Result<EvalPoint, CliError> {
    EvalPoint::new(x.to_vec(), y.to_vec()).map_err(CliError::from)
}

fn cmd_eval(g: &GlobalOpts, metric: &Option<String>, x: &[f64], y: &[f64]) -> Result<Outcome, CliError> {
    let loaded = load(&g.spec, g)?;
    let name = loaded.pick(metric, &[loaded.primary_name()], "eval")?;
    let spec = loaded.get(&name)?;
    if x.len() != spec.dimension() || y.len() != spec.dimension() {
        return Err(CliError::usage(format!("metric {name:?} has dimension {}", spec.dimension())));
    }
    let pt = point(x, y)?;
    let ev = MetricEval::evaluate(spec, &pt)?;
    let sp = SprayEval::evaluate(spec, &pt)?;
    let mut command = base_command(g, &loaded, "eval");
    command.insert("metric".into(), json!(name));
    command.insert("x".into(), json!(x));
    command.insert("y".into(), json!(y));
    let mut report = RunReport::new(Value::Object(command), g.seed);
    report.details = json!({
        "F": ev.f_value,
        "A": ev.a_value,
        "B": ev.b_value,
        "g": ev.g.to_rows(),
        "g_inv": ev.g_inv.to_rows(),
        "y_low": ev.y_low,
        "positive_definite": ev.positive_definite,
        "admissible": ev.admissible,
        "condition": ev.condition,
        "cartan_score": riemannian_score(spec, &pt)?,
        "G": sp.g,
        "berwald_max": sp.b_curv.max_abs(),
        "mean_berwald_max": sp.e_curv.max_abs(),
        "douglas_max": sp.d_curv.max_abs(),
    });
    let verdict = if ev.admissible { Verdict::Pass } else { Verdict::Fail };
    report.verdict = verdict.as_str();
    Ok(Outcome { report: Some(report), stdout: String::new(), code: exit_code(verdict) })
}

fn residual_report<F>(name: &str, tol: f64, points: &[EvalPoint], f: F) -> ResidualReport
where
    F: Fn(&EvalPoint) -> finsler_core::Result<f64> + Sync + Send,
{
    let results = map_points(points, |p| (p.clone(), f(p)));
    ResidualReport::from_results(name, tol, results)
}

fn finish(mut report: RunReport, normative: Verdict, exhausted: bool) -> Outcome {
    let verdict = if exhausted { normative.worst(Verdict::Inconclusive) } else { normative };
    report.verdict = verdict.as_str();
    Outcome { report: Some(report), stdout: String::new(), code: exit_code(verdict) }
}

fn cmd_check(g: &GlobalOpts, kind: CheckKind, metric: &Option<String>, against: &Option<String>) -> Result<Outcome, CliError> {
    let loaded = load(&g.spec, g)?;
    let mut command = base_command(g, &loaded, "check");
    command.insert("check".into(), json!(kind.as_str()));
    command.insert("samples".into(), json!(g.samples));
    match kind {
        CheckKind::DualFlat => check_dual_flat(g, &loaded, metric, command),
        CheckKind::Projective => check_projective(g, &loaded, metric, against, command),
        CheckKind::Conformal => check_conformal(g, &loaded, metric, against, command),
    }
}

fn grid_size(samples: usize) -> usize {
    samples.div_ceil(Y_PER_X).max(1)
}

fn check_dual_flat(
    g: &GlobalOpts,
    loaded: &Loaded,
    metric: &Option<String>,
    mut command: serde_json::Map<String, Value>,
) -> Result<Outcome, CliError> {
    let tol = tolerance(g);
    let name = loaded.pick(metric, &[loaded.primary_name()], "dual-flat")?;
    let spec = loaded.get(&name)?;
    command.insert("metric".into(), json!(name));
    command.insert("assume_irreducible".into(), json!(g.assume_irreducible));
    let mut sampler = Sampler::new(g.seed, loaded.boxes, spec.dimension());
    let (points, summary) = sampler.points(&[spec], g.samples);
    let definition = residual_report("definition", tol, &points, |p| dual_flat_residual(spec, p).map(|r| r.norm()));
    let reduced = residual_report("reduced", tol, &points, |p| reduced_dual_flat_residual(spec, p).map(|r| r.norm()));
    let (xs, ys) = sampler.grid(grid_size(g.samples), Y_PER_X);
    let cond = dual_flat_conditions(spec, &xs, &ys, tol, g.assume_irreducible)?;

    let mut normative = definition.verdict;
    if g.assume_irreducible {
        normative = normative.worst(cond.verdict());
    }
    let exhausted = summary.exhausted;
    let mut report = RunReport::new(Value::Object(command), g.seed);
    report.sample = Some(summary);
    report.checks = vec![
        CheckReport::from_residuals(&definition, false),
        CheckReport::from_residuals(&reduced, true),
        CheckReport::from_residuals(&cond.b_condition, !g.assume_irreducible),
        CheckReport::from_residuals(&cond.a_condition, !g.assume_irreducible),
    ];
    report.details = json!({
        "theta": cond.theta.theta_l.iter().map(|(x, t)| json!({"x": x, "theta_l": t})).collect::<Vec<_>>(),
        "linearity_residual": cond.theta.linearity_residual,
        "irreducible_asserted": cond.irreducible_asserted,
        "disclaimer": IRREDUCIBILITY_DISCLAIMER,
    });
    Ok(finish(report, normative, exhausted))
}

fn is_rank_one_pair(bar: &MetricSpec, root: &MetricSpec) -> bool {
    matches!(bar.kind(), MetricKind::GeneralizedRank1 { .. })
        && matches!(root.kind(), MetricKind::MRoot { .. })
        && bar.a() == root.a()
}

fn check_projective(
    g: &GlobalOpts,
    loaded: &Loaded,
    metric: &Option<String>,
    against: &Option<String>,
    mut command: serde_json::Map<String, Value>,
) -> Result<Outcome, CliError> {
    let tol = tolerance(g);
    let bar_name = loaded.pick(metric, &["bar"], "projective check needs a pair")?;
    let root_name = loaded.pick(against, &["F", "root"], "projective check needs a pair")?;
    let bar = loaded.get(&bar_name)?;
    let root = loaded.get(&root_name)?;
    if bar.dimension() != root.dimension() {
        return Err(CliError::usage("the two metrics have different dimensions"));
    }
    let interpretation: Interpretation = g.interpretation.into();
    command.insert("metric".into(), json!(bar_name));
    command.insert("against".into(), json!(root_name));
    command.insert("interpretation".into(), json!(interpretation.as_str()));
    let mut sampler = Sampler::new(g.seed, loaded.boxes, bar.dimension());
    let (points, summary) = sampler.points(&[bar, root], g.samples);
    let checks = map_points(&points, |p| projective_check(bar, root, p, tol));
    let projective = ResidualReport::from_results(
        "projective",
        tol,
        points.iter().cloned().zip(checks.iter().map(|c| c.as_ref().map(|c| c.cross_residual).map_err(Clone::clone))).collect(),
    );
    let ps: Vec<f64> = checks.iter().filter_map(|c| c.as_ref().ok().map(|c| c.p)).collect();
    let p_min = ps.iter().cloned().fold(f64::INFINITY, f64::min);
    let p_max = ps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let mut report = RunReport::new(Value::Object(command), g.seed);
    report.checks.push(CheckReport::from_residuals(&projective, false));
    let mut details = serde_json::Map::new();
    details.insert("p_range".into(), if ps.is_empty() { Value::Null } else { json!([p_min, p_max]) });
    details.insert("rank_one_pair".into(), json!(is_rank_one_pair(bar, root)));
    if is_rank_one_pair(bar, root) {
        let pair = RankOnePair::new(bar, root)?;
        let cond = residual_report("pair-condition", tol, &points, |p| {
            pair_condition_residual(&pair, p, interpretation).map(|r| r.norm())
        });
        let gap = residual_report("spray-gap", tol, &points, |p| spray_gap_residual(&pair, p, interpretation).map(|r| r.norm()));
        let split = residual_report("split-diagnostics", tol, &points, |p| {
            split_diagnostics(&pair, p, interpretation).map(|d| {
                [d.lifted_f.norm(), d.lifted_b.norm(), d.lowered_f.norm(), d.lowered_b.norm()]
                    .into_iter()
                    .fold(0.0, f64::max)
            })
        });
        let nondeg: Vec<f64> = map_points(&points, |p| nondegeneracy_value(&pair, p, interpretation))
            .into_iter()
            .filter_map(Result::ok)
            .map(f64::abs)
            .collect();
        let small_gap = gap.per_point.iter().filter(|(_, r)| *r <= tol).count();
        let projective_given_gap = gap
            .per_point
            .iter()
            .zip(&points)
            .filter(|((_, r), _)| *r <= tol)
            .filter(|((p, _), _)| projective.per_point.iter().any(|(q, c)| q == p && *c <= tol))
            .count();
        details.insert(
            "nondegeneracy_abs_range".into(),
            if nondeg.is_empty() {
                Value::Null
            } else {
                json!([nondeg.iter().cloned().fold(f64::INFINITY, f64::min), nondeg.iter().cloned().fold(0.0, f64::max)])
            },
        );
        details.insert("gap_within_tol".into(), json!(small_gap));
        details.insert("projective_where_gap_within_tol".into(), json!(projective_given_gap));
        report.checks.push(CheckReport::from_residuals(&cond, true));
        report.checks.push(CheckReport::from_residuals(&gap, true));
        report.checks.push(CheckReport::from_residuals(&split, true));
    }
    report.details = Value::Object(details);
    let exhausted = summary.exhausted;
    report.sample = Some(summary);
    Ok(finish(report, projective.verdict, exhausted))
}

fn check_conformal(
    g: &GlobalOpts,
    loaded: &Loaded,
    metric: &Option<String>,
    against: &Option<String>,
    mut command: serde_json::Map<String, Value>,
) -> Result<Outcome, CliError> {
    let tol = tolerance(g);
    let bar_name = loaded.pick(metric, &["bar"], "conformal check needs a pair")?;
    let tilde_name = loaded.pick(against, &["root", "F"], "conformal check needs a pair")?;
    let bar = loaded.get(&bar_name)?;
    let tilde = loaded.get(&tilde_name)?;
    if bar.dimension() != tilde.dimension() {
        return Err(CliError::usage("the two metrics have different dimensions"));
    }
    command.insert("metric".into(), json!(bar_name));
    command.insert("against".into(), json!(tilde_name));
    let mut sampler = Sampler::new(g.seed, loaded.boxes, bar.dimension());
    let (xs, ys) = sampler.grid(grid_size(g.samples), Y_PER_X);
    let rep = conformal_check(bar, tilde, &xs, &ys, tol)?;
    let mut report = RunReport::new(Value::Object(command), g.seed);
    report.checks.push(CheckReport {
        name: "ratio-variation".into(),
        verdict: if rep.verdict == Verdict::Inconclusive { "inconclusive" } else if rep.is_conformal { "pass" } else { "fail" },
        max_residual: rep.max_variation,
        tolerance: tol,
        evaluated: rep.evaluated,
        skipped: rep.skipped,
        informational: true,
        worst_points: Vec::new(),
        first_skip_reason: None,
    });
    report.details = json!({
        "is_conformal": rep.is_conformal,
        "isometry": rep.isometry,
        "alpha_per_x": rep.alpha_per_x.iter().map(|(x, a)| json!({"x": x, "alpha": a})).collect::<Vec<_>>(),
        "cartan_scores": [rep.cartan_scores.0, rep.cartan_scores.1],
        "reconstruction_residual": rep.m4_residual,
        "rigidity_holds": rep.rigidity_holds,
        "grid": {"positions": xs.len(), "directions": ys.len()},
    });
    Ok(finish(report, rep.verdict, false))
}

#[allow(clippy::too_many_arguments)]
fn cmd_geodesic(
    g: &GlobalOpts,
    metric: &Option<String>,
    x0: &[f64],
    y0: &[f64],
    t_end: f64,
    step: f64,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let loaded = load(&g.spec, g)?;
    let name = loaded.pick(metric, &[loaded.primary_name()], "geodesic")?;
    let spec = loaded.get(&name)?;
    if x0.len() != spec.dimension() || y0.len() != spec.dimension() {
        return Err(CliError::usage(format!("metric {name:?} has dimension {}", spec.dimension())));
    }
    if !(step > 0.0 && step.is_finite() && t_end >= 0.0 && t_end.is_finite()) {
        return Err(CliError::usage("--step must be positive and --t-end non-negative"));
    }
    let trace = geodesic_integrate(spec, x0, y0, t_end, step)?;
    let n = spec.dimension();
    let mut csv = String::from("t");
    for i in 1..=n {
        csv.push_str(&format!(",x{i}"));
    }
    for i in 1..=n {
        csv.push_str(&format!(",y{i}"));
    }
    csv.push_str(",F\n");
    for ((t, (x, y)), f) in trace.times.iter().zip(&trace.states).zip(&trace.f_values) {
        csv.push_str(&t.to_string());
        for v in x.iter().chain(y) {
            csv.push(',');
            csv.push_str(&v.to_string());
        }
        csv.push(',');
        csv.push_str(&f.to_string());
        csv.push('\n');
    }
    let mut command = base_command(g, &loaded, "geodesic");
    command.remove("box");
    command.remove("ybox");
    command.remove("tol");
    command.insert("metric".into(), json!(name));
    command.insert("x0".into(), json!(x0));
    command.insert("y0".into(), json!(y0));
    command.insert("t_end".into(), json!(t_end));
    command.insert("step".into(), json!(step));
    let (fx, fy) = trace.final_state();
    let mut report = RunReport::new(Value::Object(command), g.seed);
    report.details = json!({
        "steps": trace.times.len() - 1,
        "final_t": trace.times.last(),
        "final_x": fx,
        "final_y": fy,
        "f_initial": trace.f_values.first(),
        "energy_drift": trace.energy_drift,
        "completed": trace.completed(),
        "abort_reason": trace.abort_reason,
    });
    let verdict = if trace.completed() { Verdict::Pass } else { Verdict::Fail };
    report.verdict = verdict.as_str();
    let mut stdout = String::new();
    match out {
        Some(path) => fs::write(path, &csv).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?,
        None => {
            stdout = csv;
            if g.json.is_none() {
                // keep stdout pure CSV; the summary goes to stderr
                let _ = std::io::stderr().write_all(report.to_json().as_bytes());
                return Ok(Outcome { report: None, stdout, code: exit_code(verdict) });
            }
        }
    }
    Ok(Outcome { report: Some(report), stdout, code: exit_code(verdict) })
}
