use std::path::PathBuf;
use std::process::{Command, Output};

use finsler_cli::specfile::{parse_str, ATerm, Kind, MetricDef, SpecFile, Term};
use proptest::prelude::*;

fn finsler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finsler")).args(args).output().expect("binary runs")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("finsler-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(finsler(&["--help"]).status.code(), Some(0));
    assert_eq!(finsler(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(finsler(&["--bogus"]).status.code(), Some(3));
    assert_eq!(finsler(&["--spec", "builtin:cubic", "geodesic"]).status.code(), Some(3));
    assert_eq!(finsler(&["--spec", "builtin:nope", "check", "dual-flat"]).status.code(), Some(3));
}

#[test]
fn verdicts_map_to_exit_codes() {
    assert_eq!(finsler(&["--spec", "builtin:dual-flat-exp", "check", "dual-flat"]).status.code(), Some(0));
    assert_eq!(finsler(&["--spec", "builtin:dual-flat-broken", "check", "dual-flat"]).status.code(), Some(1));
}

#[test]
fn bad_spec_reports_json_path() {
    let asym = r#"{"schema_version":"1","dimension":2,"metrics":{"G":{"kind":"generalized","m":3,
        "A":[{"index":[1,1,1],"coeff":[{"powers":[0,0],"value":1.0}]},{"index":[2,2,2],"coeff":[{"powers":[0,0],"value":1.0}]}],
        "B":[[[],[{"powers":[0,0],"value":0.5}]],[[],[]]]}}}"#;
    let path = scratch("asym.json", asym);
    let out = finsler(&["--spec", path.to_str().unwrap(), "check", "dual-flat"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("metrics.G.B[0][1]"), "{}", stderr(&out));

    let unknown = r#"{"schema_version":"1","dimension":2,"metrics":{"G":{"kind":"mroot","m":2,"A":[],"extra":1}}}"#;
    let path = scratch("unknown.json", unknown);
    let out = finsler(&["--spec", path.to_str().unwrap(), "check", "dual-flat"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("metrics.G"), "{}", stderr(&out));
}

#[test]
fn builtin_show_round_trips_through_file() {
    for name in ["cubic", "berwald-moor", "conformal-pair"] {
        let out = finsler(&["builtin", "show", name]);
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        let parsed = parse_str(&text).unwrap();
        assert_eq!(parsed.to_json_pretty().trim_end(), text.trim_end());
        let path = scratch(&format!("{name}.json"), &text);
        let from_file = finsler(&["--spec", path.to_str().unwrap(), "--samples", "40", "check", "dual-flat"]);
        let from_builtin = finsler(&["--spec", &format!("builtin:{name}"), "--samples", "40", "--box", "-0.25", "0.25", "check", "dual-flat"]);
        assert_eq!(from_file.status.code(), from_builtin.status.code(), "{name}");
    }
}

#[test]
fn builtin_list_names_every_builtin() {
    let out = finsler(&["builtin", "list"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in finsler_core::builtins::NAMES {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn json_report_goes_to_file() {
    let dir = std::env::temp_dir().join(format!("finsler-cli-json-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = finsler(&["--spec", "builtin:cubic", "--json", path.to_str().unwrap(), "check", "projective", "--metric", "bar-zero"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("verdict: pass"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["verdict"], "pass");
    assert!(report.get("timing").is_none());
}

#[test]
fn geodesic_csv_has_state_columns() {
    let dir = std::env::temp_dir().join(format!("finsler-cli-geo-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("trace.csv");
    let out = finsler(&[
        "--spec", "builtin:riemann-poly", "geodesic", "--x0", "0.1,-0.1", "--y0", "1,0.5", "--step", "0.1", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x1,x2,y1,y2,F"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r.split(',').count() == 6));
}

#[test]
fn geodesic_abort_exits_one() {
    let out = finsler(&["--spec", "builtin:dual-flat-broken", "geodesic", "--x0", "0,0,0", "--y0", "0.1,-3,0", "--t-end", "5", "--step", "1e-2"]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
}

fn poly_def(dim: usize) -> impl Strategy<Value = Vec<Term>> {
    prop::collection::vec(
        (prop::collection::vec(0u32..3, dim), -2.0f64..2.0).prop_map(|(powers, value)| Term { powers, value }),
        1..3,
    )
}

fn spec_file() -> impl Strategy<Value = SpecFile> {
    (poly_def(2), poly_def(2), poly_def(2), any::<bool>()).prop_map(|(p1, p2, b12, with_b)| {
        let a = vec![ATerm { index: vec![1, 1, 1], coeff: p1 }, ATerm { index: vec![1, 2, 2], coeff: p2 }];
        let b = with_b.then(|| {
            vec![vec![vec![Term { powers: vec![0, 0], value: 1.0 }], b12.clone()], vec![b12.clone(), vec![Term { powers: vec![0, 0], value: 1.0 }]]]
        });
        let kind = if with_b { Kind::Generalized } else { Kind::Mroot };
        let def = MetricDef { kind, m: 3, a, b, c: None, d: None, pseudo_finsler_ok: true };
        SpecFile { schema_version: "1".into(), dimension: 2, metrics: [("G".to_string(), def)].into_iter().collect() }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spec_files_round_trip(file in spec_file()) {
        let text = file.to_json_pretty();
        let parsed = parse_str(&text).unwrap();
        prop_assert_eq!(&parsed, &file);
        let rebuilt = SpecFile::from_metrics(parsed.metric_specs().unwrap().iter().map(|(k, v)| (k.as_str(), v)));
        let again = parse_str(&rebuilt.to_json_pretty()).unwrap();
        prop_assert_eq!(again.metric_specs().unwrap(), parsed.metric_specs().unwrap());
    }
}
