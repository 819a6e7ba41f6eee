//! Seeded uniform sampling of admissible evaluation points.

use finsler_core::{EvalPoint, MetricEval, MetricSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Rejection sampling gives up after this many candidates per requested point.
pub const OVERSAMPLING_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleBoxes {
    pub x_box: (f64, f64),
    pub y_box: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSummary {
    pub requested: usize,
    pub accepted: usize,
    pub attempts: usize,
    pub x_box: (f64, f64),
    pub y_box: (f64, f64),
    /// Fewer than `requested` admissible points were found within the cap.
    pub exhausted: bool,
}

/// The point is in the domain of every metric, and each fundamental tensor
/// is positive definite unless that metric allows pseudo-Finsler points.
pub fn admissible_for_all(metrics: &[&MetricSpec], pt: &EvalPoint) -> bool {
    metrics.iter().all(|m| MetricEval::evaluate(m, pt).map(|e| e.admissible).unwrap_or(false))
}

fn draw(rng: &mut ChaCha8Rng, n: usize, (lo, hi): (f64, f64)) -> Vec<f64> {
    (0..n)
        .map(|_| if hi > lo { rng.gen_range(lo..hi) } else { lo })
        .collect()
}

pub struct Sampler {
    rng: ChaCha8Rng,
    boxes: SampleBoxes,
    dimension: usize,
}

impl Sampler {
    pub fn new(seed: u64, boxes: SampleBoxes, dimension: usize) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), boxes, dimension }
    }

    pub fn x(&mut self) -> Vec<f64> {
        draw(&mut self.rng, self.dimension, self.boxes.x_box)
    }

    pub fn y(&mut self) -> Vec<f64> {
        draw(&mut self.rng, self.dimension, self.boxes.y_box)
    }

    /// Up to `count` points admissible for every metric in `metrics`.
    pub fn points(&mut self, metrics: &[&MetricSpec], count: usize) -> (Vec<EvalPoint>, SampleSummary) {
        let cap = OVERSAMPLING_CAP * count;
        let mut points = Vec::with_capacity(count);
        let mut attempts = 0;
        while points.len() < count && attempts < cap {
            attempts += 1;
            let x = self.x();
            let y = self.y();
            let pt = EvalPoint::new(x, y).expect("sampler dimensions agree");
            if admissible_for_all(metrics, &pt) {
                points.push(pt);
            }
        }
        let summary = SampleSummary {
            requested: count,
            accepted: points.len(),
            attempts,
            x_box: self.boxes.x_box,
            y_box: self.boxes.y_box,
            exhausted: points.len() < count,
        };
        (points, summary)
    }

    /// `nx` positions and `ny` directions, drawn without rejection; the
    /// checks skip inadmissible grid points themselves.
    pub fn grid(&mut self, nx: usize, ny: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let xs = (0..nx).map(|_| self.x()).collect();
        let ys = (0..ny).map(|_| self.y()).collect();
        (xs, ys)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use finsler_core::builtins;

    const BOXES: SampleBoxes = SampleBoxes { x_box: (-0.25, 0.25), y_box: (0.5, 1.5) };

    #[test]
    fn same_seed_same_points() {
        let spec = builtins::riemann_poly();
        let (a, _) = Sampler::new(5, BOXES, 2).points(&[&spec], 20);
        let (b, _) = Sampler::new(5, BOXES, 2).points(&[&spec], 20);
        assert_eq!(a, b);
        let (c, _) = Sampler::new(6, BOXES, 2).points(&[&spec], 20);
        assert_ne!(a, c);
    }

    #[test]
    fn rejection_is_capped() {
        let spec = builtins::riemann_poly();
        // every direction is a multiple of zero
        let boxes = SampleBoxes { x_box: (0.0, 0.0), y_box: (0.0, 0.0) };
        let (pts, summary) = Sampler::new(1, boxes, 2).points(&[&spec], 7);
        assert!(pts.is_empty());
        assert_eq!(summary.attempts, 70);
        assert!(summary.exhausted);
    }
}
