use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use finsler_core::verify::Interpretation;

#[derive(Debug, Parser)]
#[command(name = "finsler", version, about = "Evaluate and verify generalized m-th root Finsler metrics")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Spec file path, or `builtin:NAME`
    #[arg(long, global = true, value_name = "PATH")]
    pub spec: Option<String>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Residual tolerance (default 1e-8)
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 200)]
    pub samples: usize,
    /// Sampling box for every x component
    #[arg(long = "box", global = true, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub x_box: Option<Vec<f64>>,
    /// Sampling box for every y component
    #[arg(long, global = true, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub ybox: Option<Vec<f64>>,
    /// Write the JSON report here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Metric used to raise the index of d
    #[arg(long, global = true, value_enum, default_value_t = InterpretationArg::Root)]
    pub interpretation: InterpretationArg,
    /// Record that A is irreducible; the dual-flatness conditions then enter the verdict
    #[arg(long, global = true)]
    pub assume_irreducible: bool,
    /// Include wall-clock timing in the JSON report
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InterpretationArg {
    /// g of the m-th root metric
    #[value(name = "paper", alias = "root")]
    Root,
    /// g of the generalized metric
    Gbar,
}

impl From<InterpretationArg> for Interpretation {
    fn from(v: InterpretationArg) -> Interpretation {
        match v {
            InterpretationArg::Root => Interpretation::Root,
            InterpretationArg::Gbar => Interpretation::Bar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    DualFlat,
    Projective,
    Conformal,
}

impl CheckKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckKind::DualFlat => "dual-flat",
            CheckKind::Projective => "projective",
            CheckKind::Conformal => "conformal",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Metric, spray and curvature quantities at one point
    Eval {
        #[arg(long)]
        metric: Option<String>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        y: Vec<f64>,
    },
    /// Verify a metric condition over sampled points
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        /// Metric under test (F̄ for pair checks)
        #[arg(long)]
        metric: Option<String>,
        /// Second metric of a pair check
        #[arg(long)]
        against: Option<String>,
    },
    /// Integrate a geodesic and write its trace as CSV
    Geodesic {
        #[arg(long)]
        metric: Option<String>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        x0: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        y0: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// CSV output path (stdout if absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in example metrics
    Builtin {
        #[command(subcommand)]
        action: BuiltinAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum BuiltinAction {
    List,
    /// Print a built-in as a spec file
    Show { name: String },
}
