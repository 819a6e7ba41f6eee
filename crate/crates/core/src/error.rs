use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong while building or evaluating a metric.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two objects that must share a dimension do not.
    DimensionMismatch { expected: usize, found: usize },
    /// A coordinate axis outside `0..dimension`.
    AxisOutOfRange { axis: usize, dimension: usize },
    /// Tensor order `m` below 2.
    InvalidOrder(usize),
    /// A multi-index entry outside `0..dimension` or of the wrong length.
    InvalidIndex(String),
    /// `b_ij != b_ji` as polynomials.
    AsymmetricForm { i: usize, j: usize },
    /// `c_i d_j - c_j d_i` is not the zero polynomial.
    InvalidRankOne { i: usize, j: usize },
    /// The point is outside the domain where the metric is defined.
    InadmissiblePoint { reason: &'static str, a_value: f64, f2_value: f64 },
    /// A matrix that had to be inverted is numerically singular.
    Singular { condition: f64 },
    /// `|1 + A^{pq} C_p D_q|` is below the rank-one update tolerance.
    DegenerateUpdate { denominator: f64 },
    /// `1 + c_m d^m` vanishes, so the projective machinery is undefined.
    DegeneratePair { denominator: f64 },
    /// A finite-difference oracle could not be evaluated around the point.
    OracleFailure(&'static str),
    /// A NaN or infinity appeared in a computed state.
    NonFinite(&'static str),
    /// The operation does not apply to this metric kind.
    WrongKind(&'static str),
    /// Jet arithmetic was asked for something its layout cannot represent.
    Jet(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::AxisOutOfRange { axis, dimension } => {
                write!(f, "axis {axis} out of range for dimension {dimension}")
            }
            Error::InvalidOrder(m) => write!(f, "tensor order m = {m} is invalid (need m >= 2)"),
            Error::InvalidIndex(msg) => write!(f, "invalid multi-index: {msg}"),
            Error::AsymmetricForm { i, j } => {
                write!(f, "quadratic form is not symmetric: b_{}{} != b_{}{}", i + 1, j + 1, j + 1, i + 1)
            }
            Error::InvalidRankOne { i, j } => write!(
                f,
                "rank-one form violates c_i d_j = c_j d_i at (i, j) = ({}, {})",
                i + 1,
                j + 1
            ),
            Error::InadmissiblePoint { reason, a_value, f2_value } => {
                write!(f, "inadmissible point ({reason}): A = {a_value}, F^2 = {f2_value}")
            }
            Error::Singular { condition } => {
                write!(f, "matrix is singular (condition estimate {condition:e})")
            }
            Error::DegenerateUpdate { denominator } => {
                write!(f, "rank-one update is degenerate: 1 + A^pq C_p D_q = {denominator:e}")
            }
            Error::DegeneratePair { denominator } => {
                write!(f, "degenerate pair: 1 + c_m d^m = {denominator:e}")
            }
            Error::OracleFailure(msg) => write!(f, "finite-difference oracle failed: {msg}"),
            Error::NonFinite(msg) => write!(f, "non-finite value: {msg}"),
            Error::WrongKind(msg) => write!(f, "wrong metric kind: {msg}"),
            Error::Jet(msg) => write!(f, "jet error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
