//! The JSON metric-definition format.
//!
//! ```json
//! {
//!   "schema_version": "1",
//!   "dimension": 4,
//!   "metrics": {
//!     "F": {
//!       "kind": "mroot",
//!       "m": 4,
//!       "A": [{ "index": [1, 2, 3, 4], "coeff": [{ "powers": [0, 0, 0, 0], "value": 1.0 }] }],
//!       "pseudo_finsler_ok": true
//!     }
//!   }
//! }
//! ```
//!
//! Indices are 1-based. `B` is a dense `n × n` array of polynomials in `x`;
//! `c` and `d` are arrays of `n` polynomials.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use finsler_core::{MetricKind, MetricSpec, Poly, QuadraticFormField, RankOneForm, SymmetricTensorField};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub powers: Vec<u32>,
    pub value: f64,
}

pub type PolyDef = Vec<Term>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ATerm {
    pub index: Vec<usize>,
    pub coeff: PolyDef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Mroot,
    Generalized,
    GeneralizedRank1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricDef {
    pub kind: Kind,
    pub m: usize,
    #[serde(rename = "A")]
    pub a: Vec<ATerm>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<PolyDef>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<PolyDef>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<PolyDef>>,
    #[serde(default)]
    pub pseudo_finsler_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub schema_version: String,
    pub dimension: usize,
    pub metrics: BTreeMap<String, MetricDef>,
}

/// A parse or validation failure, located by a JSON path.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub path: String,
    pub message: String,
}

impl SpecError {
    fn at(path: impl Into<String>, message: impl fmt::Display) -> SpecError {
        SpecError { path: path.into(), message: message.to_string() }
    }
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for SpecError {}

pub fn parse_str(text: &str) -> Result<SpecFile, SpecError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let spec: SpecFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        SpecError::at(path, e.into_inner())
    })?;
    spec.validate()?;
    Ok(spec)
}

pub fn parse_spec(path: &Path) -> Result<SpecFile, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpecError::at("", format!("cannot read {}: {e}", path.display())))?;
    parse_str(&text)
}

fn poly(n: usize, def: &PolyDef, path: &str) -> Result<Poly, SpecError> {
    for (t, term) in def.iter().enumerate() {
        if term.powers.len() != n {
            return Err(SpecError::at(
                format!("{path}[{t}].powers"),
                format!("expected {n} exponents, found {}", term.powers.len()),
            ));
        }
        if !term.value.is_finite() {
            return Err(SpecError::at(format!("{path}[{t}].value"), "coefficient must be finite"));
        }
    }
    Poly::from_terms(n, def.iter().map(|t| (t.powers.clone(), t.value))).map_err(|e| SpecError::at(path, e))
}

fn poly_vec(n: usize, defs: &[PolyDef], path: &str) -> Result<Vec<Poly>, SpecError> {
    if defs.len() != n {
        return Err(SpecError::at(path, format!("expected {n} components, found {}", defs.len())));
    }
    defs.iter().enumerate().map(|(i, p)| poly(n, p, &format!("{path}[{i}]"))).collect()
}

impl MetricDef {
    pub fn to_metric(&self, n: usize, path: &str) -> Result<MetricSpec, SpecError> {
        if self.m < 2 {
            return Err(SpecError::at(format!("{path}.m"), format!("m must be at least 2, found {}", self.m)));
        }
        let mut terms = Vec::with_capacity(self.a.len());
        for (t, term) in self.a.iter().enumerate() {
            let tp = format!("{path}.A[{t}]");
            if term.index.len() != self.m {
                return Err(SpecError::at(
                    format!("{tp}.index"),
                    format!("index has {} entries, expected m = {}", term.index.len(), self.m),
                ));
            }
            if let Some(bad) = term.index.iter().find(|&&i| i == 0 || i > n) {
                return Err(SpecError::at(format!("{tp}.index"), format!("entry {bad} outside 1..={n}")));
            }
            let index = term.index.iter().map(|i| i - 1).collect();
            terms.push((index, poly(n, &term.coeff, &format!("{tp}.coeff"))?));
        }
        let a = SymmetricTensorField::new(n, self.m, terms).map_err(|e| SpecError::at(format!("{path}.A"), e))?;
        let forbid = |present: bool, field: &str| -> Result<(), SpecError> {
            if present {
                Err(SpecError::at(format!("{path}.{field}"), format!("not allowed for kind {:?}", self.kind)))
            } else {
                Ok(())
            }
        };
        let spec = match self.kind {
            Kind::Mroot => {
                forbid(self.b.is_some(), "B")?;
                forbid(self.c.is_some(), "c")?;
                forbid(self.d.is_some(), "d")?;
                MetricSpec::mroot(a)
            }
            Kind::Generalized => {
                forbid(self.c.is_some(), "c")?;
                forbid(self.d.is_some(), "d")?;
                let rows = self.b.as_ref().ok_or_else(|| SpecError::at(format!("{path}.B"), "missing for kind generalized"))?;
                if rows.len() != n {
                    return Err(SpecError::at(format!("{path}.B"), format!("expected {n} rows, found {}", rows.len())));
                }
                let mut entries = Vec::with_capacity(n);
                for (i, row) in rows.iter().enumerate() {
                    entries.push(poly_vec(n, row, &format!("{path}.B[{i}]"))?);
                }
                for i in 0..n {
                    for j in i + 1..n {
                        if entries[i][j] != entries[j][i] {
                            return Err(SpecError::at(
                                format!("{path}.B[{i}][{j}]"),
                                format!("B must be symmetric: b_{}{} differs from b_{}{}", i + 1, j + 1, j + 1, i + 1),
                            ));
                        }
                    }
                }
                let b = QuadraticFormField::new(entries).map_err(|e| SpecError::at(format!("{path}.B"), e))?;
                MetricSpec::generalized(a, b)
            }
            Kind::GeneralizedRank1 => {
                forbid(self.b.is_some(), "B")?;
                let c = self.c.as_ref().ok_or_else(|| SpecError::at(format!("{path}.c"), "missing for kind generalized_rank1"))?;
                let d = self.d.as_ref().ok_or_else(|| SpecError::at(format!("{path}.d"), "missing for kind generalized_rank1"))?;
                let c = poly_vec(n, c, &format!("{path}.c"))?;
                let d = poly_vec(n, d, &format!("{path}.d"))?;
                let form = RankOneForm::new(c, d).map_err(|e| SpecError::at(format!("{path}.c"), e))?;
                MetricSpec::generalized_rank1(a, form)
            }
        };
        spec.map(|s| s.with_pseudo_finsler_ok(self.pseudo_finsler_ok)).map_err(|e| SpecError::at(path, e))
    }

    pub fn from_metric(spec: &MetricSpec) -> MetricDef {
        let poly_def = |p: &Poly| p.terms().map(|(pw, v)| Term { powers: pw.to_vec(), value: v }).collect::<PolyDef>();
        let a = spec
            .a()
            .terms()
            .map(|(idx, p)| ATerm { index: idx.iter().map(|i| i + 1).collect(), coeff: poly_def(p) })
            .collect();
        let (kind, b, c, d) = match spec.kind() {
            MetricKind::MRoot { .. } => (Kind::Mroot, None, None, None),
            MetricKind::GeneralizedMRoot { b, .. } => (
                Kind::Generalized,
                Some(b.entries().iter().map(|row| row.iter().map(poly_def).collect()).collect()),
                None,
                None,
            ),
            MetricKind::GeneralizedRank1 { form, .. } => (
                Kind::GeneralizedRank1,
                None,
                Some(form.c().iter().map(poly_def).collect()),
                Some(form.d().iter().map(poly_def).collect()),
            ),
        };
        MetricDef { kind, m: spec.m(), a, b, c, d, pseudo_finsler_ok: spec.pseudo_finsler_ok() }
    }
}

impl SpecFile {
    pub fn validate(&self) -> Result<(), SpecError> {
        self.metric_specs().map(|_| ())
    }

    pub fn metric_specs(&self) -> Result<Vec<(String, MetricSpec)>, SpecError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(SpecError::at(
                "schema_version",
                format!("unsupported schema version {:?}, expected {SCHEMA_VERSION:?}", self.schema_version),
            ));
        }
        if self.dimension == 0 {
            return Err(SpecError::at("dimension", "dimension must be at least 1"));
        }
        if self.metrics.is_empty() {
            return Err(SpecError::at("metrics", "at least one metric is required"));
        }
        self.metrics
            .iter()
            .map(|(name, def)| def.to_metric(self.dimension, &format!("metrics.{name}")).map(|s| (name.clone(), s)))
            .collect()
    }

    pub fn from_metrics<'a, I>(metrics: I) -> SpecFile
    where
        I: IntoIterator<Item = (&'a str, &'a MetricSpec)>,
    {
        let mut dimension = 0;
        let mut out = BTreeMap::new();
        for (name, spec) in metrics {
            dimension = spec.dimension();
            out.insert(name.to_string(), MetricDef::from_metric(spec));
        }
        SpecFile { schema_version: SCHEMA_VERSION.to_string(), dimension, metrics: out }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec files always serialize")
    }
}
