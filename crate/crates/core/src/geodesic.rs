//! Fixed-step classical Runge-Kutta integration of `ẍ^i + 2 G^i(x, ẋ) = 0`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::math;
use crate::metric::{LocalMetric, MetricKind, MetricSpec};
use crate::spray::local_spray;

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicTrace {
    pub times: Vec<f64>,
    /// `(x, ẋ)` at each time.
    pub states: Vec<(Vec<f64>, Vec<f64>)>,
    /// `F(x(t), ẋ(t))` at each time.
    pub f_values: Vec<f64>,
    /// `max_t |F(t) - F(0)|`
    pub energy_drift: f64,
    /// Set when the trajectory left the admissible region before `t_end`.
    pub abort_reason: Option<String>,
}

impl GeodesicTrace {
    pub fn completed(&self) -> bool {
        self.abort_reason.is_none()
    }

    pub fn final_state(&self) -> &(Vec<f64>, Vec<f64>) {
        self.states.last().expect("trace holds the initial state")
    }
}

fn f_value(spec: &MetricSpec, local: &LocalMetric, v: &[f64]) -> Result<f64> {
    let (a, f2) = local.admissible_values(v)?;
    Ok(match spec.kind() {
        MetricKind::MRoot { .. } => math::powf(a, 1.0 / spec.m() as f64),
        _ => math::sqrt(f2),
    })
}

/// `(ẋ, -2G(x, ẋ))`
fn rhs(spec: &MetricSpec, x: &[f64], v: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let local = spec.local(x)?;
    let g = local_spray(&local, v)?;
    Ok((v.to_vec(), g.iter().map(|gi| -2.0 * gi).collect()))
}

fn axpy(base: &[f64], h: f64, dir: &[f64]) -> Vec<f64> {
    base.iter().zip(dir).map(|(b, d)| b + h * d).collect()
}

fn rk4_step(spec: &MetricSpec, x: &[f64], v: &[f64], h: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (k1x, k1v) = rhs(spec, x, v)?;
    let (k2x, k2v) = rhs(spec, &axpy(x, 0.5 * h, &k1x), &axpy(v, 0.5 * h, &k1v))?;
    let (k3x, k3v) = rhs(spec, &axpy(x, 0.5 * h, &k2x), &axpy(v, 0.5 * h, &k2v))?;
    let (k4x, k4v) = rhs(spec, &axpy(x, h, &k3x), &axpy(v, h, &k3v))?;
    let combine = |base: &[f64], k1: &[f64], k2: &[f64], k3: &[f64], k4: &[f64]| -> Vec<f64> {
        (0..base.len()).map(|i| base[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect()
    };
    Ok((combine(x, &k1x, &k2x, &k3x, &k4x), combine(v, &k1v, &k2v, &k3v, &k4v)))
}

fn recoverable(e: &Error) -> bool {
    matches!(e, Error::InadmissiblePoint { .. } | Error::Singular { .. } | Error::Jet(_))
}

/// Integrates the geodesic through `(x0, y0)` up to `t_end` with fixed step
/// `step` (the last step is shortened to land on `t_end`).
pub fn geodesic_integrate(spec: &MetricSpec, x0: &[f64], y0: &[f64], t_end: f64, step: f64) -> Result<GeodesicTrace> {
    check_dim(spec.dimension(), x0.len())?;
    check_dim(spec.dimension(), y0.len())?;
    if !(step > 0.0) || !(t_end >= 0.0) || !step.is_finite() || !t_end.is_finite() {
        return Err(Error::NonFinite("step and t_end must be positive and finite"));
    }
    let f0 = f_value(spec, &spec.local(x0)?, y0)?;
    rhs(spec, x0, y0)?;
    let mut trace = GeodesicTrace {
        times: alloc::vec![0.0],
        states: alloc::vec![(x0.to_vec(), y0.to_vec())],
        f_values: alloc::vec![f0],
        energy_drift: 0.0,
        abort_reason: None,
    };
    let steps = libm::ceil(t_end / step - 1e-9).max(0.0) as usize;
    let (mut x, mut v) = (x0.to_vec(), y0.to_vec());
    for k in 0..steps {
        let t = k as f64 * step;
        let h = if k + 1 == steps { t_end - t } else { step };
        let next = rk4_step(spec, &x, &v, h).and_then(|(nx, nv)| {
            if nx.iter().chain(&nv).any(|c| !c.is_finite()) {
                return Err(Error::NonFinite("geodesic state"));
            }
            let f = f_value(spec, &spec.local(&nx)?, &nv)?;
            Ok((nx, nv, f))
        });
        match next {
            Ok((nx, nv, f)) => {
                x = nx;
                v = nv;
                trace.times.push(t + h);
                trace.energy_drift = trace.energy_drift.max(math::abs(f - f0));
                trace.f_values.push(f);
                trace.states.push((x.clone(), v.clone()));
            }
            Err(e) if recoverable(&e) => {
                trace.abort_reason = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(trace)
}
