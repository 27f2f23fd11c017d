use super::{boundary_frame, dir2, ConvexBody, Vector2};
use crate::error::{domain, Result};
use crate::numerics::golden_min;
use serde::Serialize;
use std::f64::consts::PI;

const SAMPLES: usize = 4096;

/// Dense radial sample of a planar boundary, reused across distance queries.
#[derive(Debug, Clone)]
pub struct BoundarySampler<'a, B: ConvexBody<2> + ?Sized> {
    body: &'a B,
    points: Vec<Vector2>,
}

impl<'a, B: ConvexBody<2> + ?Sized> BoundarySampler<'a, B> {
    pub fn new(body: &'a B) -> Result<Self> {
        let origin = Vector2::zeros();
        let points = (0..SAMPLES)
            .map(|k| {
                let d = dir2(2.0 * PI * k as f64 / SAMPLES as f64);
                body.exit_param(&origin, &d).map(|t| d * t)
            })
            .collect::<Result<Vec<_>>>()?;
        if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(domain("boundary sampling needs a bounded body"));
        }
        Ok(Self { body, points })
    }

    fn point_at(&self, u: f64) -> Vector2 {
        let d = dir2(u);
        d * self
            .body
            .exit_param(&Vector2::zeros(), &d)
            .unwrap_or(f64::INFINITY)
    }

    fn refine(&self, c: &Vector2, k: usize) -> f64 {
        let step = 2.0 * PI / SAMPLES as f64;
        let u0 = step * k as f64;
        golden_min(|u| (self.point_at(u) - c).norm(), u0 - step, u0 + step, 1e-13).1
    }

    /// Euclidean distance from `c` to the boundary; `hint` marks a boundary
    /// angle near which a second local minimum is refined.
    pub fn distance(&self, c: &Vector2, hint: Option<f64>) -> f64 {
        if let Some(d) = self.body.boundary_distance_exact(c) {
            return d;
        }
        let (best_k, best) = self
            .points
            .iter()
            .enumerate()
            .map(|(k, p)| (k, (p - c).norm()))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        let mut d = best.min(self.refine(c, best_k));
        if let Some(u) = hint {
            let k = (super::wrap_angle(u) / (2.0 * PI) * SAMPLES as f64).round() as usize % SAMPLES;
            d = d.min(self.refine(c, k));
        }
        d
    }

    /// Largest `ρ` with `B(p - ρ n, ρ) ⊂ K` at boundary angle `u`.
    pub fn rolling_radius(&self, u: f64) -> Result<f64> {
        let f = boundary_frame(self.body, u)?;
        if !f.is_smooth() {
            return Ok(0.0);
        }
        let width = self.body.support(&f.normal) + self.body.support(&(-f.normal));
        let fits = |rho: f64| {
            let c = f.position - f.normal * rho;
            self.body.contains(&c) && self.distance(&c, Some(u)) >= rho * (1.0 - 1e-10)
        };
        let (mut lo, mut hi) = (0.0, 0.5 * width);
        if fits(hi) {
            return Ok(hi);
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if fits(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-13 * hi {
                break;
            }
        }
        Ok(lo)
    }
}

/// Euclidean distance from the point `x` to the boundary of a planar body.
pub fn boundary_distance<B: ConvexBody<2> + ?Sized>(body: &B, x: &Vector2) -> Result<f64> {
    if !body.contains(x) {
        return Err(domain("point is not interior"));
    }
    if let Some(d) = body.boundary_distance_exact(x) {
        return Ok(d);
    }
    Ok(BoundarySampler::new(body)?.distance(x, None))
}

/// Rolling radius `R(p)` at polar angle `u`: the radius of the largest disc
/// inside `K` that touches the boundary at `p`. Zero at corners.
pub fn rolling_radius<B: ConvexBody<2> + ?Sized>(body: &B, u: f64) -> Result<f64> {
    BoundarySampler::new(body)?.rolling_radius(u)
}

/// Planar pseudo-Gauss curvature `1/R(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PseudoGauss {
    pub value: f64,
    pub rolling_radius: f64,
    /// Set when `R(p) = 0` and the value is `+∞`.
    pub degenerate: bool,
}

pub fn pseudo_gauss_2d<B: ConvexBody<2> + ?Sized>(body: &B, u: f64) -> Result<PseudoGauss> {
    let r = rolling_radius(body, u)?;
    Ok(PseudoGauss {
        value: if r > 0.0 { 1.0 / r } else { f64::INFINITY },
        rolling_radius: r,
        degenerate: r == 0.0,
    })
}
