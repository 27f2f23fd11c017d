use super::dimension::{default_eps_grid, minkowski_dimension, vertex_angles, DimensionEstimate};
use super::entropy::{entropy_fit, EntropyEstimate, GrowthMode};
use super::{boundary_grid, grading_width, GrowthSeries};
use crate::busemann::density;
use crate::error::{domain, Result};
use crate::geometry::{boundary_distance, dir2, BoundarySampler, ConvexBody, NonintExample, Vector2};
use crate::metric::hilbert_distance;
use crate::numerics::{linspace, pairwise_sum, GaussLegendre};
use rayon::prelude::*;
use serde::Serialize;

/// `vol B(o, r)` by direct polar quadrature of `σ` over the ball, with the
/// radial extent located by bisection on the Hilbert distance. Independent
/// of the sphere parametrization; used as a cross-check.
pub fn ball_volume_direct<B: ConvexBody<2> + ?Sized>(body: &B, r: f64, nodes: usize) -> Result<f64> {
    if !(r > 0.0) {
        return Err(domain("radius must be positive"));
    }
    let o = Vector2::zeros();
    let rule = GaussLegendre::order8();
    let terms = boundary_grid(body, nodes, nodes, Some(grading_width(r)))
        .par_iter()
        .map(|&(theta, w)| -> Result<f64> {
            let d = dir2(theta);
            let rho = body.exit_param(&o, &d)?;
            if !rho.is_finite() {
                return Err(domain("direct volume needs a bounded body"));
            }
            let (mut lo, mut hi) = (0.0, rho);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                if hilbert_distance(body, &o, &(d * mid))? < r {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t_r = 0.5 * (lo + hi);
            // Panels shrink geometrically toward t_r, where σ grows fastest.
            let mut edges = vec![0.0];
            edges.extend((1..=24).map(|k| t_r * (1.0 - 0.5f64.powi(k))));
            edges.push(t_r);
            let mut acc = 0.0;
            for e in edges.windows(2) {
                for (t, wt) in rule.on_interval(e[0], e[1]) {
                    acc += wt * t * density(body, &(d * t))?;
                }
            }
            Ok(w * acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&terms))
}

/// `2(n−1)^α (2^α/(1−2^{α−1}))^α`.
pub fn schuett_werner_constant(n: usize, alpha: f64) -> f64 {
    2.0 * ((n - 1) as f64).powf(alpha)
        * (2f64.powf(alpha) / (1.0 - 2f64.powf(alpha - 1.0))).powf(alpha)
}

/// Rolling radii on a fixed boundary grid, reused for many subsets.
#[derive(Debug, Clone)]
pub struct RollingGrid {
    pub angles: Vec<f64>,
    /// Arc-length weights.
    pub weights: Vec<f64>,
    pub radii: Vec<f64>,
    pub total_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchuettWernerReport {
    pub alpha: f64,
    /// `∫_B R^{−α} dH¹`.
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub subset_length: f64,
    pub total_length: f64,
    pub holds: bool,
}

impl RollingGrid {
    /// Requires the body to contain the unit disc.
    pub fn new<B: ConvexBody<2> + ?Sized>(body: &B, nodes: usize) -> Result<Self> {
        if boundary_distance(body, &Vector2::zeros())? < 1.0 - 1e-9 {
            return Err(domain("the body must contain the unit disc"));
        }
        let sampler = BoundarySampler::new(body)?;
        let grid = boundary_grid(body, nodes, nodes, None);
        let rows = grid
            .par_iter()
            .map(|&(theta, w)| -> Result<(f64, f64, f64)> {
                let f = body.frame(&dir2(theta))?;
                let speed = f.radius().powi(2) / f.support;
                Ok((theta, w * speed, sampler.rolling_radius(theta)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let weights: Vec<f64> = rows.iter().map(|r| r.1).collect();
        Ok(Self {
            angles: rows.iter().map(|r| r.0).collect(),
            total_length: pairwise_sum(&weights),
            weights,
            radii: rows.iter().map(|r| r.2).collect(),
        })
    }

    /// The subset `B` is a union of polar-angle arcs `(start, end)`, `end > start`.
    pub fn check(&self, alpha: f64, arcs: &[(f64, f64)]) -> Result<SchuettWernerReport> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(domain("α must lie in (0, 1)"));
        }
        let tau = 2.0 * std::f64::consts::PI;
        let inside = |t: f64| {
            arcs.iter()
                .any(|&(a, b)| (t - a).rem_euclid(tau) < (b - a).min(tau))
        };
        let mut lhs = Vec::new();
        let mut len = Vec::new();
        for i in 0..self.angles.len() {
            if inside(self.angles[i]) {
                lhs.push(self.weights[i] * self.radii[i].powf(-alpha));
                len.push(self.weights[i]);
            }
        }
        let (lhs, subset_length) = (pairwise_sum(&lhs), pairwise_sum(&len));
        let constant = schuett_werner_constant(2, alpha);
        let rhs = constant * subset_length.powf(1.0 - alpha) * self.total_length.powf(alpha);
        Ok(SchuettWernerReport {
            alpha,
            lhs,
            rhs,
            constant,
            subset_length,
            total_length: self.total_length,
            holds: lhs <= rhs,
        })
    }
}

/// One-shot version of [`RollingGrid::check`] on 1024 boundary nodes.
pub fn schuett_werner_check<B: ConvexBody<2> + ?Sized>(
    body: &B,
    alpha: f64,
    arcs: &[(f64, f64)],
) -> Result<SchuettWernerReport> {
    RollingGrid::new(body, 1024)?.check(alpha, arcs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentCheck {
    pub i: usize,
    pub r: f64,
    pub length: f64,
    /// The `sin 2α` bound.
    pub bound: f64,
    /// The `sin α` bound.
    pub bound_sin_alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonintReport {
    pub s: f64,
    pub terms: usize,
    pub band: [f64; 2],
    pub valid_radius: f64,
    pub series: GrowthSeries,
    pub fit: EntropyEstimate,
    /// Fitted slope inside the band widened by 0.1 on both sides.
    pub slope_in_band: bool,
    pub segments: Vec<SegmentCheck>,
    /// Segments shorter than the `sin 2α` bound.
    pub segment_violations: usize,
    /// Segments shorter than the `sin α` bound (up to 1e−9 relative).
    pub sin_alpha_violations: usize,
    pub dimension: DimensionEstimate,
    /// `1/(s − 1)`.
    pub dimension_bound: f64,
    /// `2/(3 − d)` evaluated at the estimate (clamped to `[0, 1]`).
    pub entropy_bound: f64,
}

/// Sphere growth, segment lower bounds and box-counting dimension for the
/// truncated non-integer example. The window defaults to
/// `[r_v/2, r_v]` with `r_v` the truncation-valid radius.
pub fn nonint_growth_check(
    ex: &NonintExample,
    window: Option<[f64; 2]>,
    steps: usize,
) -> Result<NonintReport> {
    let r_valid = ex.valid_radius();
    let [lo, hi] = window.unwrap_or([0.5 * r_valid, r_valid]);
    if !(lo > 0.0 && lo < hi) {
        return Err(domain("empty radius window"));
    }
    if hi > r_valid + 1e-9 {
        return Err(domain(format!(
            "window end {hi} exceeds the truncation-valid radius {r_valid}"
        )));
    }
    let radii = linspace(lo, hi, steps.max(4));
    let sphere = radii
        .iter()
        .map(|&r| ex.polygon.symmetric_sphere_length(r))
        .collect::<Result<Vec<_>>>()?;
    let n = radii.len();
    let series = GrowthSeries {
        dimension: 2,
        radii,
        volume: vec![f64::NAN; n],
        sphere,
        ratio: vec![f64::NAN; n],
        derivative: vec![f64::NAN; n],
    };
    let fit = entropy_fit(&series, Some([lo, hi]), GrowthMode::Sphere)?;
    let band = ex.entropy_band();
    let slope_in_band = fit.slope >= band[0] - 0.1 && fit.slope <= band[1] + 0.1;

    // 10 radii × 5 indices between 2 and the proof's cut-off i₀(r).
    let mut segments = Vec::new();
    for &r in &linspace(lo, hi, 10) {
        let i0 = ((2.0 * ex.c_s).powf(1.0 / ex.s) * (r / ex.s).exp()).floor() as usize;
        let top = i0.clamp(3, ex.terms) as f64;
        let mut idx: Vec<usize> = (0..5)
            .map(|k| (2.0 * (top / 2.0).powf(k as f64 / 4.0)).round() as usize)
            .collect();
        idx.dedup();
        for i in idx {
            segments.push(SegmentCheck {
                i,
                r,
                length: ex.middle_segment_length(i, r),
                bound: ex.segment_lower_bound(i, r),
                bound_sin_alpha: ex.segment_bound_sin_alpha(i, r),
            });
        }
    }
    let segment_violations = segments.iter().filter(|c| c.length < c.bound).count();
    let sin_alpha_violations = segments
        .iter()
        .filter(|c| c.length < c.bound_sin_alpha * (1.0 - 1e-9))
        .count();
    let dimension = minkowski_dimension(&vertex_angles(&ex.polygon), &default_eps_grid())?;
    Ok(NonintReport {
        s: ex.s,
        terms: ex.terms,
        band,
        valid_radius: r_valid,
        series,
        fit,
        slope_in_band,
        segments,
        segment_violations,
        sin_alpha_violations,
        dimension_bound: 1.0 / (ex.s - 1.0),
        entropy_bound: 2.0 / (3.0 - dimension.dimension.clamp(0.0, 1.0)),
        dimension,
    })
}
