//! Centro-affine and centro-projective boundary areas.
//!
//! Both are computed from the Euclidean formula
//! `∫ √k/⟨n,p⟩^{(n−1)/2} · τ dA` with `τ = (2a/(1+a))^{(n−1)/2}` for the
//! projective version, written as an integral over directions from the
//! origin: `dA = ρⁿ/⟨p,n⟩ dω`. The intrinsic gauge-Hessian route is kept as a
//! cross-check only.

use crate::error::{domain, unsupported, GeomError, Result};
use crate::geometry::{dir2, ConvexBody, Mapped, Polygon, ProjectiveMap, RoundedPolygon, Vector, Vector2};
use crate::growth::angular_panels;
use crate::metric::hilbert_distance;
use crate::numerics::{pairwise_sum, GaussLegendre};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// Polar-angle nodes used for planar bodies without breakpoints.
pub const PLANAR_NODES: usize = 4096;
/// Non-smooth nodes may make up at most this share of the grid.
const MAX_NONSMOOTH_SHARE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AreaKind {
    CentroAffine,
    CentroProjective,
}

/// Integrand data at one quadrature node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaSample {
    /// Polar angle in the plane, `(polar, azimuth)` in space.
    pub angles: Vec<f64>,
    pub sqrt_k: f64,
    /// `⟨n, p⟩`.
    pub support: f64,
    pub antipodal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaResult {
    pub kind: AreaKind,
    pub value: f64,
    /// Difference to the same rule at half resolution.
    pub error_estimate: f64,
    pub nodes: usize,
    /// Nodes where the boundary had no curvature; they contribute 0.
    pub nonsmooth_nodes: usize,
    /// Range of `τ` over the smooth nodes.
    pub factor_range: [f64; 2],
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<AreaSample>,
}

/// `(2a/(1+a))^{(n−1)/2}`.
pub fn projective_factor(a: f64, n: usize) -> f64 {
    (2.0 * a / (1.0 + a)).powf(0.5 * (n as f64 - 1.0))
}

pub fn centro_affine_area<const N: usize, B: ConvexBody<N> + ?Sized>(body: &B) -> Result<AreaResult> {
    area(body, AreaKind::CentroAffine)
}

pub fn centro_projective_area<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
) -> Result<AreaResult> {
    area(body, AreaKind::CentroProjective)
}

/// Both areas on the same nodes.
pub fn areas<const N: usize, B: ConvexBody<N> + ?Sized>(body: &B) -> Result<(AreaResult, AreaResult)> {
    Ok((area(body, AreaKind::CentroAffine)?, area(body, AreaKind::CentroProjective)?))
}

pub fn area<const N: usize, B: ConvexBody<N> + ?Sized>(body: &B, kind: AreaKind) -> Result<AreaResult> {
    if !body.is_bounded() {
        return Err(domain("boundary areas need a bounded body"));
    }
    let fine = direction_grid::<N, B>(body, 1)?;
    let coarse = direction_grid::<N, B>(body, 0)?;
    let (value, samples, nonsmooth, range) = integrate(body, kind, &fine)?;
    let (rough, _, _, _) = integrate(body, kind, &coarse)?;
    Ok(AreaResult {
        kind,
        value,
        error_estimate: (value - rough).abs(),
        nodes: fine.len(),
        nonsmooth_nodes: nonsmooth,
        factor_range: range,
        samples,
    })
}

struct Node<const N: usize> {
    direction: Vector<N>,
    angles: Vec<f64>,
    weight: f64,
}

/// Direction nodes with solid-angle weights. Level 1 is the production
/// grid, level 0 the same rule at half resolution.
fn direction_grid<const N: usize, B: ConvexBody<N> + ?Sized>(body: &B, level: u32) -> Result<Vec<Node<N>>> {
    let scale = 1usize << level;
    match N {
        2 => {
            let lift = |u: f64, w: f64| {
                let d = dir2(u);
                let mut v = Vector::<N>::zeros();
                v[0] = d[0];
                v[1] = d[1];
                Node { direction: v, angles: vec![u], weight: w }
            };
            let breaks = planar_breaks(body);
            if breaks.is_empty() {
                let n = PLANAR_NODES / 2 * scale;
                let h = 2.0 * PI / n as f64;
                return Ok((0..n).map(|k| lift(h * k as f64, h)).collect());
            }
            let rule = GaussLegendre::order8();
            let mut out = Vec::new();
            for (a, b) in angular_panels(&breaks) {
                let parts = ((PLANAR_NODES / 16 * scale) as f64 * (b - a) / (2.0 * PI)).ceil() as usize;
                let h = (b - a) / parts.max(1) as f64;
                for j in 0..parts.max(1) {
                    let lo = a + h * j as f64;
                    out.extend(rule.on_interval(lo, lo + h).map(|(u, w)| lift(u, w)));
                }
            }
            Ok(out)
        }
        3 => {
            let (nz, nphi) = (24 * scale, 48 * scale);
            let rule = GaussLegendre::new(nz);
            let h = 2.0 * PI / nphi as f64;
            let mut out = Vec::with_capacity(nz * nphi);
            for (&z, &wz) in rule.nodes.iter().zip(&rule.weights) {
                let s = (1.0 - z * z).sqrt();
                for k in 0..nphi {
                    let phi = h * k as f64;
                    let mut v = Vector::<N>::zeros();
                    v[0] = s * phi.cos();
                    v[1] = s * phi.sin();
                    v[2] = z;
                    out.push(Node { direction: v, angles: vec![z.acos(), phi], weight: wz * h });
                }
            }
            Ok(out)
        }
        _ => Err(unsupported("boundary areas are implemented for n = 2 and n = 3")),
    }
}

fn planar_breaks<const N: usize, B: ConvexBody<N> + ?Sized>(body: &B) -> Vec<f64> {
    let raw = body.breakpoints();
    if raw.is_empty() {
        return raw;
    }
    let mut out: Vec<f64> = raw
        .into_iter()
        .flat_map(|u| [u.rem_euclid(2.0 * PI), (u + PI).rem_euclid(2.0 * PI)])
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    out
}

type Integrated = (f64, Vec<AreaSample>, usize, [f64; 2]);

fn integrate<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    kind: AreaKind,
    nodes: &[Node<N>],
) -> Result<Integrated> {
    let rows = nodes
        .par_iter()
        .map(|node| -> Result<(f64, AreaSample, bool, f64)> {
            let f = body.frame(&node.direction)?;
            let rho = f.radius();
            let sample = |sqrt_k: f64| AreaSample {
                angles: node.angles.clone(),
                sqrt_k,
                support: f.support,
                antipodal: f.antipodal,
            };
            let Some(k) = f.curvature else {
                return Ok((0.0, sample(f64::NAN), false, f64::NAN));
            };
            let sqrt_k = k.max(0.0).sqrt();
            let tau = projective_factor(f.antipodal, N);
            let factor = match kind {
                AreaKind::CentroAffine => 1.0,
                AreaKind::CentroProjective => tau,
            };
            let density = sqrt_k / f.support.powf(0.5 * (N as f64 - 1.0));
            let term = node.weight * density * factor * rho.powi(N as i32) / f.support;
            Ok((term, sample(sqrt_k), true, tau))
        })
        .collect::<Result<Vec<_>>>()?;
    let nonsmooth = rows.iter().filter(|r| !r.2).count();
    if nonsmooth as f64 > MAX_NONSMOOTH_SHARE * rows.len() as f64 {
        return Err(GeomError::NonSmooth(format!(
            "{nonsmooth} of {} quadrature nodes have no curvature",
            rows.len()
        )));
    }
    let terms: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let taus = rows.iter().filter(|r| r.2).map(|r| r.3);
    let range = taus.fold([f64::INFINITY, f64::NEG_INFINITY], |[lo, hi], t| [lo.min(t), hi.max(t)]);
    Ok((
        pairwise_sum(&terms),
        rows.into_iter().map(|r| r.1).collect(),
        nonsmooth,
        range,
    ))
}

/// Minkowski gauge `F(x) = 1/t` with `t·x` on the boundary.
pub fn minkowski_gauge<const N: usize, B: ConvexBody<N> + ?Sized>(body: &B, x: &Vector<N>) -> Result<f64> {
    if x.norm() == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / body.exit_param(&Vector::<N>::zeros(), x)?)
}

/// Branch `G⁺ = 2[q₁, o, x, q₂]` of the projective gauge with value 2 on the
/// boundary: `q₂` is the chord end on the same side of `o` as `x`.
pub fn projective_gauge_plus<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    x: &Vector<N>,
) -> Result<f64> {
    let r = x.norm();
    if r == 0.0 {
        return Err(domain("the projective gauge is undefined at the origin"));
    }
    let e = x / r;
    let o = Vector::<N>::zeros();
    let ahead = body.exit_param(&o, &e)?;
    let back = body.exit_param(&o, &(-e))?;
    // [q₁, o, x, q₂] with q₁ = −back·e, q₂ = ahead·e.
    Ok(2.0 * (back + ahead) * r / ((back + r) * ahead))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeHessianEval {
    pub point: Vec<f64>,
    pub tangent: Vec<f64>,
    pub antipodal: f64,
    pub hess_f: f64,
    pub hess_g: f64,
    /// `2a/(1+a)`.
    pub factor: f64,
    /// `|Hess G⁺ − factor·Hess F| / (factor·Hess F)`.
    pub rel_error: f64,
}

/// Second central differences of `F` and `G⁺` along `p + t v` at the
/// boundary point in `direction`. The default tangent is the
/// counterclockwise one in the plane.
pub fn gauge_hessian_check<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    direction: &Vector<N>,
    tangent: Option<&Vector<N>>,
) -> Result<GaugeHessianEval> {
    let f = body.frame(direction)?;
    f.smooth_curvature()?;
    let v = match tangent {
        Some(v) => *v,
        None if N == 2 => {
            let mut v = Vector::<N>::zeros();
            v[0] = -f.normal[1];
            v[1] = f.normal[0];
            v
        }
        None => return Err(domain("a tangent vector is required in dimension > 2")),
    };
    let vn = v.norm();
    if vn == 0.0 || v.dot(&f.normal).abs() > 1e-12 * vn {
        return Err(domain("v must be a nonzero tangent vector"));
    }
    let v = v / vn;
    let p = f.position;
    let h = 1e-4 * f.radius();
    let second = |g: &dyn Fn(&Vector<N>) -> Result<f64>| -> Result<f64> {
        let (plus, mid, minus) = (g(&(p + v * h))?, g(&p)?, g(&(p - v * h))?);
        Ok((plus - 2.0 * mid + minus) / (h * h))
    };
    let hess_f = second(&|x| minkowski_gauge(body, x))?;
    let hess_g = second(&|x| projective_gauge_plus(body, x))?;
    let factor = 2.0 * f.antipodal / (1.0 + f.antipodal);
    let predicted = factor * hess_f;
    Ok(GaugeHessianEval {
        point: p.as_slice().to_vec(),
        tangent: v.as_slice().to_vec(),
        antipodal: f.antipodal,
        hess_f,
        hess_g,
        factor,
        rel_error: (hess_g - predicted).abs() / predicted.abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub area: f64,
    pub mapped_area: f64,
    pub area_rel_diff: f64,
    pub pairs: usize,
    pub max_distance_rel_error: f64,
}

/// Compares Hilbert distances of seeded random pairs and `𝒜_p` for `K` and `TK`.
pub fn projective_invariance_check(
    body: Arc<dyn ConvexBody<2>>,
    map: &ProjectiveMap<2>,
    pairs: usize,
    seed: u64,
) -> Result<InvarianceReport> {
    if !map.fixes_origin() {
        return Err(domain("the map must fix the origin"));
    }
    let image = Mapped::new(body.clone(), map.clone())?;
    if !image.is_bounded() {
        return Err(domain("the image of the body is unbounded"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let o = Vector2::zeros();
    let mut point = || -> Result<Vector2> {
        let d = dir2(rng.gen_range(0.0..2.0 * PI));
        let rho = body.exit_param(&o, &d)?;
        Ok(d * (rho * rng.gen_range(0.05..0.9)))
    };
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let (x, y) = (point()?, point()?);
        let d = hilbert_distance(body.as_ref(), &x, &y)?;
        let dm = hilbert_distance(&image, &map.apply(&x)?, &map.apply(&y)?)?;
        worst = worst.max((d - dm).abs() / d.max(1e-300));
    }
    let area = centro_projective_area(body.as_ref())?.value;
    let mapped_area = centro_projective_area(&image)?.value;
    Ok(InvarianceReport {
        area,
        mapped_area,
        area_rel_diff: if area > 0.0 {
            (area - mapped_area).abs() / area
        } else {
            mapped_area.abs()
        },
        pairs,
        max_distance_rel_error: worst,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SemicontinuityRow {
    pub m: usize,
    /// `𝒜_p` of the inscribed `m`-gon.
    pub inscribed: f64,
    /// `𝒜_p` of the `m`-gon with corners rounded at scale `1/m`.
    pub mollified: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemicontinuityReport {
    pub reference: f64,
    pub rows: Vec<SemicontinuityRow>,
    pub max_inscribed: f64,
    pub max_mollified: f64,
    /// Every inscribed value is below the reference.
    pub strict_gap: bool,
}

/// Inscribed `m`-gons through the boundary points at angles `2πk/m`, and
/// their mollified versions `(1 − 1/m)·P_m ⊕ (ρ_min/m)·B`, where `ρ_min` is
/// the smallest vertex radius. For the unit disc these are the regular
/// polygons with corner arcs of radius `1/m`.
pub fn semicontinuity_experiment<B: ConvexBody<2> + ?Sized>(
    body: &B,
    ms: &[usize],
) -> Result<SemicontinuityReport> {
    if !body.breakpoints().is_empty() {
        return Err(domain("the semicontinuity experiment needs a smooth body"));
    }
    let reference = centro_projective_area(body)?.value;
    let o = Vector2::zeros();
    let mut rows = Vec::with_capacity(ms.len());
    for &m in ms {
        if m < 3 {
            return Err(domain("need at least 3 vertices"));
        }
        let verts = (0..m)
            .map(|k| {
                let d = dir2(2.0 * PI * k as f64 / m as f64);
                Ok(d * body.exit_param(&o, &d)?)
            })
            .collect::<Result<Vec<Vector2>>>()?;
        let rho_min = verts.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        let inscribed = centro_projective_area(&Polygon::new(verts.clone())?)?.value;
        let shrink = 1.0 - 1.0 / m as f64;
        let core = verts.iter().map(|v| v * shrink).collect();
        let mollified =
            centro_projective_area(&RoundedPolygon::new(core, rho_min / m as f64)?)?.value;
        rows.push(SemicontinuityRow { m, inscribed, mollified });
    }
    let max_of = |f: fn(&SemicontinuityRow) -> f64| rows.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let max_inscribed = max_of(|r| r.inscribed);
    let max_mollified = max_of(|r| r.mollified);
    Ok(SemicontinuityReport {
        strict_gap: rows.iter().all(|r| r.inscribed < reference),
        reference,
        max_inscribed,
        max_mollified,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Ellipsoid;

    #[test]
    fn unit_disc_areas() {
        let d = Ellipsoid::<2>::ball(1.0).unwrap();
        let (a, p) = areas(&d).unwrap();
        assert!((a.value - 2.0 * PI).abs() < 1e-12);
        assert!((p.value - 2.0 * PI).abs() < 1e-12);
        assert!(a.error_estimate < 1e-12);
    }

    #[test]
    fn square_area_is_exactly_zero() {
        let sq = Polygon::square(1.0).unwrap();
        let r = centro_projective_area(&sq).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.nonsmooth_nodes, 0);
    }

    #[test]
    fn ball_in_space() {
        let b = Ellipsoid::<3>::ball(2.0).unwrap();
        let r = centro_affine_area(&b).unwrap();
        assert!((r.value - 4.0 * PI).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn disc_gauge_hessian() {
        let d = Ellipsoid::<2>::ball(1.0).unwrap();
        let e = gauge_hessian_check(&d, &Vector2::new(1.0, 0.0), None).unwrap();
        assert!((e.hess_f - 1.0).abs() < 1e-6 && (e.hess_g - 1.0).abs() < 1e-6);
    }
}
