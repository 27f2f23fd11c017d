//! Growth of metric balls and spheres about the origin.
//!
//! Ball volumes come from the sphere parametrization
//! `V(r) = ∫₀^r ∫_{∂K} σ(φ(p, s)) Jac φ(p, s) dH¹ ds`, written in polar angle
//! so that only `ρ(θ)` and `a(θ)` are needed at every boundary node.

mod checks;
mod dimension;
mod entropy;

pub use checks::{
    ball_volume_direct, nonint_growth_check, schuett_werner_check, schuett_werner_constant,
    NonintReport, RollingGrid, SchuettWernerReport, SegmentCheck,
};
pub use dimension::{
    covering_number, default_eps_grid, dim_entropy_bound, minkowski_dimension, vertex_angles,
    CoverCount, DimensionEstimate,
};
pub use entropy::{
    coarea_check, entropy_coefficient, entropy_fit, CoareaReport, CoareaSample,
    CoefficientReport, EntropyEstimate, GrowthMode,
};

use crate::busemann::{density, MIN_DEPTH};
use crate::error::{domain, numerical, Result};
use crate::geometry::{dir2, ConvexBody, Vector2};
use crate::metric::{finsler_norm, sphere_scale};
use crate::numerics::{linspace, pairwise_sum, GaussLegendre};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Grid settings for volumes and sphere lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthConfig {
    /// Maximal width of a radial Gauss–Legendre panel.
    pub panel_width: f64,
    /// Trapezoid nodes in the polar angle for bodies without breakpoints.
    pub smooth_nodes: usize,
    /// Midpoint nodes shared out between breakpoint panels.
    pub polygon_nodes: usize,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        Self {
            panel_width: 0.25,
            smooth_nodes: 2048,
            polygon_nodes: 4096,
        }
    }
}

/// Sorted breakpoints together with their antipodes, reduced to `[0, 2π)`.
pub(crate) fn angular_breaks<B: ConvexBody<2> + ?Sized>(body: &B) -> Vec<f64> {
    let mut out: Vec<f64> = body
        .breakpoints()
        .into_iter()
        .flat_map(|u| [u.rem_euclid(2.0 * PI), (u + PI).rem_euclid(2.0 * PI)])
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    out
}

/// Periodic panels `[b_k, b_{k+1}]` between breaks (one full turn if none).
pub(crate) fn angular_panels(breaks: &[f64]) -> Vec<(f64, f64)> {
    if breaks.is_empty() {
        return vec![(0.0, 2.0 * PI)];
    }
    let m = breaks.len();
    (0..m)
        .map(|k| {
            let a = breaks[k];
            let b = if k + 1 < m { breaks[k + 1] } else { breaks[0] + 2.0 * PI };
            (a, b)
        })
        .filter(|(a, b)| b > a)
        .collect()
}

/// Above this many breaks the graded grid gets too large and plain midpoint
/// panels are used.
const MAX_GRADED_BREAKS: usize = 512;

/// Gauss–Legendre cells on `[a, b]` whose widths halve toward both ends
/// down to `min_width`.
pub(crate) fn graded_cells(a: f64, b: f64, min_width: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::order8();
    let half = 0.5 * (b - a);
    let levels = ((half / min_width).log2().ceil().max(0.0) as usize).min(80);
    let mut edges = vec![a];
    for k in (1..=levels).rev() {
        edges.push(a + half * 0.5f64.powi(k as i32));
    }
    edges.push(a + half);
    for k in 1..=levels {
        edges.push(b - half * 0.5f64.powi(k as i32));
    }
    edges.push(b);
    edges
        .windows(2)
        .flat_map(|w| rule.on_interval(w[0], w[1]).collect::<Vec<_>>())
        .collect()
}

/// Polar-angle nodes and weights. Bodies without breakpoints get a periodic
/// trapezoid rule with `smooth_nodes` nodes. Otherwise every panel between
/// breaks is covered by vertex-avoiding nodes: graded Gauss–Legendre cells
/// down to `grade_to` when given (integrands of metric spheres peak within
/// `~e^{−2r}` of the corners), `panel_nodes` midpoint nodes shared out by
/// angle when not.
pub(crate) fn boundary_grid<B: ConvexBody<2> + ?Sized>(
    body: &B,
    smooth_nodes: usize,
    panel_nodes: usize,
    grade_to: Option<f64>,
) -> Vec<(f64, f64)> {
    let breaks = angular_breaks(body);
    if breaks.is_empty() {
        let h = 2.0 * PI / smooth_nodes as f64;
        return (0..smooth_nodes).map(|k| (h * k as f64, h)).collect();
    }
    let panels = angular_panels(&breaks);
    match grade_to {
        Some(min_width) if breaks.len() <= MAX_GRADED_BREAKS => panels
            .into_iter()
            .flat_map(|(a, b)| graded_cells(a, b, min_width))
            .collect(),
        _ => {
            let mut out = Vec::with_capacity(panel_nodes + breaks.len());
            for (a, b) in panels {
                let n = ((panel_nodes as f64 * (b - a) / (2.0 * PI)).round() as usize).max(1);
                let h = (b - a) / n as f64;
                out.extend((0..n).map(|j| (a + h * (j as f64 + 0.5), h)));
            }
            out
        }
    }
}

/// Finest angular scale the grids resolve for radii up to `r_max`.
pub(crate) fn grading_width(r_max: f64) -> f64 {
    1e-2 * (-2.0 * r_max).exp()
}

/// `ρ(θ)` and `a(θ)` from two ray casts.
fn radial_data<B: ConvexBody<2> + ?Sized>(body: &B, theta: f64) -> Result<(Vector2, f64)> {
    let d = dir2(theta);
    let o = Vector2::zeros();
    let rho = body.exit_param(&o, &d)?;
    let back = body.exit_param(&o, &(-d))?;
    if !(rho.is_finite() && back.is_finite()) {
        return Err(domain("growth needs a bounded body"));
    }
    Ok((d * rho, back / rho))
}

/// Volume integrand in polar angle: `σ(λp)·λ ∂_sλ·ρ²`, which equals
/// `σ(φ) Jac φ · dH¹/dθ`. Closer than [`MIN_DEPTH`] to the boundary the
/// density is extrapolated with the `(1−λ)^{−3/2}` law.
fn polar_integrand<B: ConvexBody<2> + ?Sized>(body: &B, p: &Vector2, a: f64, s: f64) -> Result<f64> {
    let q = (-2.0 * s).exp();
    let one_minus_q = -(-2.0 * s).exp_m1();
    let (lam, depth) = sphere_scale(a, s);
    let weight = 2.0 * a * a * (1.0 + a) * p.norm_squared() * q * one_minus_q / (a + q).powi(3);
    if weight == 0.0 {
        return Ok(0.0);
    }
    let sigma = if depth >= MIN_DEPTH {
        density(body, &(p * lam))?
    } else {
        density(body, &(p * (1.0 - MIN_DEPTH)))? * (MIN_DEPTH / depth).powf(1.5)
    };
    Ok(sigma * weight)
}

/// Values of `V(r)` and `V′(r)` at `radii`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeProfile {
    pub radii: Vec<f64>,
    pub volume: Vec<f64>,
    /// `∫_{∂K} F(p, r) dH¹`, the exact derivative of `V`.
    pub derivative: Vec<f64>,
    pub boundary_nodes: usize,
}

/// Cumulative ball volumes at increasing positive radii.
pub fn volume_profile<B: ConvexBody<2> + ?Sized>(
    body: &B,
    radii: &[f64],
    cfg: &GrowthConfig,
) -> Result<VolumeProfile> {
    if radii.is_empty() || radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("radii must be positive and strictly increasing"));
    }
    if !body.is_bounded() {
        return Err(domain("ball volumes need a bounded body"));
    }
    let r_max = *radii.last().expect("nonempty");
    let mut edges: Vec<f64> = vec![0.0];
    let steps = (r_max / cfg.panel_width).ceil() as usize;
    edges.extend((1..=steps).map(|k| (k as f64 * cfg.panel_width).min(r_max)));
    edges.extend_from_slice(radii);
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    let rule = GaussLegendre::order8();
    let nodes: Vec<(usize, f64, f64)> = edges
        .windows(2)
        .enumerate()
        .flat_map(|(k, w)| rule.on_interval(w[0], w[1]).map(move |(s, wt)| (k, s, wt)))
        .collect();
    let panels = edges.len() - 1;
    let grid = boundary_grid(
        body,
        cfg.smooth_nodes,
        cfg.polygon_nodes,
        Some(grading_width(r_max)),
    );

    // Per boundary node: panel integrals, then V′ at every sampled radius.
    let rows: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&(theta, w)| -> Result<Vec<f64>> {
            let (p, a) = radial_data(body, theta)?;
            let mut row = vec![0.0; panels + radii.len()];
            for &(k, s, wt) in &nodes {
                row[k] += w * wt * polar_integrand(body, &p, a, s)?;
            }
            for (j, &r) in radii.iter().enumerate() {
                row[panels + j] = w * polar_integrand(body, &p, a, r)?;
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let column = |c: usize| pairwise_sum(&rows.iter().map(|r| r[c]).collect::<Vec<_>>());
    let mut cumulative = Vec::with_capacity(panels + 1);
    let mut acc = 0.0;
    cumulative.push(0.0);
    for k in 0..panels {
        acc += column(k);
        cumulative.push(acc);
    }
    let volume = radii
        .iter()
        .map(|&r| {
            let idx = edges
                .iter()
                .position(|&e| (e - r).abs() <= 1e-12 * r.max(1.0))
                .expect("radius is a panel edge");
            cumulative[idx]
        })
        .collect();
    let derivative = (0..radii.len()).map(|j| column(panels + j)).collect();
    Ok(VolumeProfile {
        radii: radii.to_vec(),
        volume,
        derivative,
        boundary_nodes: grid.len(),
    })
}

/// `vol B(o, r)` with the default grid.
pub fn ball_volume<B: ConvexBody<2> + ?Sized>(body: &B, r: f64) -> Result<f64> {
    Ok(volume_profile(body, &[r], &GrowthConfig::default())?.volume[0])
}

/// `vol B(o, r)` confirmed against a run with doubled boundary and radial grids.
pub fn ball_volume_checked<B: ConvexBody<2> + ?Sized>(body: &B, r: f64, rel_tol: f64) -> Result<f64> {
    let base = GrowthConfig::default();
    let fine = GrowthConfig {
        panel_width: base.panel_width / 2.0,
        smooth_nodes: base.smooth_nodes * 2,
        polygon_nodes: base.polygon_nodes * 2,
    };
    let v1 = volume_profile(body, &[r], &base)?.volume[0];
    let v2 = volume_profile(body, &[r], &fine)?.volume[0];
    if (v2 - v1).abs() > rel_tol * v2.abs() {
        return Err(numerical(format!(
            "ball volume did not settle at r = {r}: {v1} vs {v2}"
        )));
    }
    Ok(v2)
}

/// How sphere lengths are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereMethod {
    /// Exact edge formula for symmetric polygons, quadrature otherwise.
    Auto,
    Quadrature,
}

/// Finsler length of the metric sphere `S(o, r)` in the plane.
pub fn sphere_length_2d<B: ConvexBody<2> + ?Sized>(body: &B, r: f64) -> Result<f64> {
    sphere_length_2d_with(body, r, SphereMethod::Auto, &GrowthConfig::default())
}

pub fn sphere_length_2d_with<B: ConvexBody<2> + ?Sized>(
    body: &B,
    r: f64,
    method: SphereMethod,
    cfg: &GrowthConfig,
) -> Result<f64> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(domain("radius must be nonnegative"));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    if method == SphereMethod::Auto {
        if let Some(poly) = body.as_polygon() {
            if poly.is_centrally_symmetric() {
                return poly.symmetric_sphere_length(r);
            }
        }
    }
    let nodes = boundary_grid(body, cfg.smooth_nodes, cfg.polygon_nodes, Some(grading_width(r)));
    let terms = nodes
        .par_iter()
        .map(|&(theta, w)| Ok(w * sphere_speed(body, theta, r)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&terms))
}

/// `‖c′(θ)‖_{c(θ)}` for the sphere curve `c(θ) = λ(a(θ), r)·p(θ)`.
fn sphere_speed<B: ConvexBody<2> + ?Sized>(body: &B, theta: f64, r: f64) -> Result<f64> {
    let front = body.frame(&dir2(theta))?;
    let back = body.frame(&dir2(theta + PI))?;
    let e = front.direction;
    let e_perp = Vector2::new(-e[1], e[0]);
    let radial_rate = |f: &crate::geometry::BoundaryPoint<2>| {
        let d = f.direction;
        let d_perp = Vector2::new(-d[1], d[0]);
        -f.radius() * f.normal.dot(&d_perp) / f.normal.dot(&d)
    };
    let (rho, drho) = (front.radius(), radial_rate(&front));
    let (rho_b, drho_b) = (back.radius(), radial_rate(&back));
    let a = rho_b / rho;
    let da = (drho_b * rho - rho_b * drho) / (rho * rho);
    let q = (-2.0 * r).exp();
    let one_minus_q = -(-2.0 * r).exp_m1();
    let (lam, _) = sphere_scale(a, r);
    let dlam = q * one_minus_q / (a + q).powi(2) * da;
    let p = e * rho;
    let dp = e * drho + e_perp * rho;
    let velocity = p * dlam + dp * lam;
    finsler_norm(body, &(p * lam), &velocity)
}

/// Which parts of a series to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesParts {
    Both,
    Ball,
    Sphere,
}

/// Sampled growth data; entries that were not computed are NaN.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthSeries {
    pub dimension: usize,
    pub radii: Vec<f64>,
    pub volume: Vec<f64>,
    pub sphere: Vec<f64>,
    /// `V(r)/sinh^{n−1} r`.
    pub ratio: Vec<f64>,
    /// Exact `V′(r)` from the boundary integral.
    pub derivative: Vec<f64>,
}

impl GrowthSeries {
    /// CSV with header `r,V,A,ratio`, shortest round-trip decimal for every cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,V,A,ratio\n");
        for i in 0..self.radii.len() {
            writeln!(
                out,
                "{},{},{},{}",
                self.radii[i], self.volume[i], self.sphere[i], self.ratio[i]
            )
            .expect("write to string");
        }
        out
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

/// Series on `steps` equally spaced radii in `[r_min, r_max]`.
pub fn growth_series<B: ConvexBody<2> + ?Sized>(
    body: &B,
    r_min: f64,
    r_max: f64,
    steps: usize,
) -> Result<GrowthSeries> {
    if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) || steps < 2 {
        return Err(domain("need 0 < r_min < r_max and at least 2 steps"));
    }
    growth_series_with(
        body,
        &linspace(r_min, r_max, steps),
        SeriesParts::Both,
        &GrowthConfig::default(),
    )
}

pub fn growth_series_with<B: ConvexBody<2> + ?Sized>(
    body: &B,
    radii: &[f64],
    parts: SeriesParts,
    cfg: &GrowthConfig,
) -> Result<GrowthSeries> {
    let n = radii.len();
    let (volume, derivative) = if parts != SeriesParts::Sphere {
        let prof = volume_profile(body, radii, cfg)?;
        if prof.volume.windows(2).any(|w| w[1] <= w[0]) {
            return Err(numerical(format!(
                "ball volumes are not increasing: {:?}",
                prof.volume
            )));
        }
        (prof.volume, prof.derivative)
    } else {
        (vec![f64::NAN; n], vec![f64::NAN; n])
    };
    let sphere = if parts != SeriesParts::Ball {
        radii
            .iter()
            .map(|&r| sphere_length_2d_with(body, r, SphereMethod::Auto, cfg))
            .collect::<Result<Vec<_>>>()?
    } else {
        vec![f64::NAN; n]
    };
    let ratio = volume.iter().zip(radii).map(|(v, r)| v / r.sinh()).collect();
    Ok(GrowthSeries {
        dimension: 2,
        radii: radii.to_vec(),
        volume,
        sphere,
        ratio,
        derivative,
    })
}
