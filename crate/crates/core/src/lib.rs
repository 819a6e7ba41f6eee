//! Numerical engine for generalized m-th root Finsler metrics
//! `F = (A^{2/m} + B)^{1/2}`, where `A` is a degree-`m` form in `y` and `B`
//! a quadratic form, both with polynomial coefficients in `x`.
//!
//! The crate is `no_std` and only needs `alloc`. It provides
//!
//! * exact polynomial coefficient fields and their `x`/`y` derivatives ([`poly`], [`tensor`]),
//! * metric-level quantities: `F`, `g_ij`, inverses, Cartan torsion ([`metric`]),
//! * truncated multivariate Taylor jets ([`jet`]) that carry the spray,
//!   Berwald, mean Berwald and Douglas curvatures ([`spray`]),
//! * fixed-step geodesic integration ([`geodesic`]),
//! * residual checkers for dual flatness, projective relatedness and
//!   conformal rigidity ([`verify`]),
//! * the built-in example metrics ([`builtins`]).
//!
//! Indices are 0-based throughout the Rust API; file formats and reports
//! produced by the CLI crate are 1-based.
#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod builtins;
pub mod error;
pub mod geodesic;
pub mod jet;
pub mod linalg;
pub mod metric;
pub mod poly;
pub mod spray;
pub mod tensor;
pub mod verify;

mod math;

pub use error::{Error, Result};
pub use geodesic::{geodesic_integrate, GeodesicTrace};
pub use jet::{Jet, JetLayout};
pub use linalg::{Matrix, Tensor3, Tensor4};
pub use metric::{MetricEval, MetricKind, MetricSpec};
pub use poly::Poly;
pub use spray::{DualFlatForms, SprayEval};
pub use tensor::{QuadraticForm, EvalPoint, QuadraticFormField, RankOneForm, SymmetricTensorField};
