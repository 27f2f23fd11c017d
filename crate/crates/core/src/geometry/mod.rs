//! Convex bodies with a marked interior origin.
//!
//! Every body is an immutable oracle answering ray-exit queries and, where
//! the shape allows it, radial boundary frames (point, outward normal, Gauss
//! curvature and antipodal ratio). Bodies are `Send + Sync` and can be shared
//! freely between worker threads.

mod catalog;
mod composite;
mod ellipsoid;
mod nonint;
mod parabola;
mod polygon;
mod projective;
mod radial;
mod rolling;
mod rounded;

pub use catalog::{make_body, radial_profile, Body, BodySpec};
pub use composite::{membership_disc, HalfSpace, Intersection, Membership};
pub use ellipsoid::Ellipsoid;
pub use nonint::{make_nonint_example, NonintExample, NonintSummary};
pub use parabola::Paraboloid;
pub use polygon::Polygon;
pub use projective::{Mapped, ProjectiveMap};
pub use radial::{Radial2d, RadialProfile};
pub use rolling::{boundary_distance, pseudo_gauss_2d, rolling_radius, BoundarySampler, PseudoGauss};
pub use rounded::RoundedPolygon;

use crate::error::{domain, unsupported, Result};
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;

pub type Vector<const N: usize> = nalgebra::SVector<f64, N>;
pub type Vector2 = Vector<2>;
pub type Vector3 = Vector<3>;

/// Which representation backs a body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BodyKind {
    Polygon2d,
    Radial2d,
    Ellipsoid,
    Parabola,
    RoundedPolygon,
    HalfSpace,
    Intersection,
    Mapped,
    Generic,
}

/// A boundary point reached from the origin along `direction`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint<const N: usize> {
    /// Unit vector from the origin; in the plane this is `(cos u, sin u)`.
    pub direction: Vector<N>,
    pub position: Vector<N>,
    /// Outward unit normal. At a corner this is the normalized sum of the
    /// adjacent facet normals.
    pub normal: Vector<N>,
    /// Gauss curvature, `None` where the boundary is not smooth.
    pub curvature: Option<f64>,
    /// `a(p)`: the scalar with `-a(p)·p` on the boundary.
    pub antipodal: f64,
    /// `⟨p, n(p)⟩`.
    pub support: f64,
}

impl<const N: usize> BoundaryPoint<N> {
    pub fn is_smooth(&self) -> bool {
        self.curvature.is_some()
    }

    pub fn radius(&self) -> f64 {
        self.position.norm()
    }

    /// Curvature or a non-smooth error.
    pub fn smooth_curvature(&self) -> Result<f64> {
        self.curvature.ok_or_else(|| {
            crate::error::GeomError::NonSmooth(format!("{:?}", self.position.as_slice()))
        })
    }
}

impl BoundaryPoint<2> {
    /// Polar angle `u` of the point.
    pub fn angle(&self) -> f64 {
        self.direction[1].atan2(self.direction[0])
    }

    /// Counterclockwise unit tangent.
    pub fn tangent(&self) -> Vector2 {
        Vector2::new(-self.normal[1], self.normal[0])
    }
}

/// A convex body containing the origin in its interior (or, for the
/// unbounded kinds, at least a convex region not containing a line).
pub trait ConvexBody<const N: usize>: Send + Sync + fmt::Debug {
    fn kind(&self) -> BodyKind;

    /// Strict interior membership.
    fn contains(&self, x: &Vector<N>) -> bool;

    /// Exit parameter `t > 0` with `x + t·v` on the boundary, `+∞` when the
    /// ray never leaves. Callers guarantee `x` interior and `v ≠ 0`; use
    /// [`ray_boundary`] for the checked version.
    fn exit_param(&self, x: &Vector<N>, v: &Vector<N>) -> Result<f64>;

    /// Boundary frame at the point hit by the ray from the origin in `direction`.
    fn frame(&self, direction: &Vector<N>) -> Result<BoundaryPoint<N>>;

    fn is_bounded(&self) -> bool {
        true
    }

    /// Support function `h(w) = sup ⟨w, x⟩`, possibly `+∞`.
    fn support(&self, w: &Vector<N>) -> f64 {
        sampled_support(self, w)
    }

    /// Polar angles (plane only) where the boundary or the antipodal map is
    /// not smooth. Quadratures split their panels there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn as_polygon(&self) -> Option<&Polygon> {
        None
    }

    /// Exact Euclidean distance from an interior point to the boundary, when cheap.
    fn boundary_distance_exact(&self, _x: &Vector<N>) -> Option<f64> {
        None
    }

    /// Symmetric about the origin, so `a ≡ 1`.
    fn is_centrally_symmetric(&self) -> bool {
        false
    }
}

/// Checked ray exit: `x` must be interior and `v` nonzero.
pub fn ray_boundary<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    x: &Vector<N>,
    v: &Vector<N>,
) -> Result<f64> {
    if !x.iter().all(|c| c.is_finite()) || !body.contains(x) {
        return Err(domain(format!("point {:?} is not interior", x.as_slice())));
    }
    if v.norm() == 0.0 || !v.iter().all(|c| c.is_finite()) {
        return Err(domain("direction must be a nonzero finite vector"));
    }
    body.exit_param(x, v)
}

/// Boundary frame at polar angle `u` of a planar body.
pub fn boundary_frame<B: ConvexBody<2> + ?Sized>(body: &B, u: f64) -> Result<BoundaryPoint<2>> {
    body.frame(&dir2(u))
}

/// `(cos u, sin u)`.
pub fn dir2(u: f64) -> Vector2 {
    let (s, c) = u.sin_cos();
    Vector2::new(c, s)
}

pub(crate) fn cross2(a: &Vector2, b: &Vector2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Reduces an angle to `[0, 2π)`.
pub(crate) fn wrap_angle(u: f64) -> f64 {
    let w = u.rem_euclid(2.0 * PI);
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

/// Copies the first two coordinates of a generic vector.
pub(crate) fn to2<const N: usize>(v: &Vector<N>) -> Vector2 {
    Vector2::new(v[0], v[1])
}

pub(crate) fn from2<const N: usize>(v: &Vector2) -> Vector<N> {
    let mut out = Vector::<N>::zeros();
    out[0] = v[0];
    out[1] = v[1];
    out
}

/// Unit directions used for sampling-based fallbacks: 4096 angles in the
/// plane, a Fibonacci lattice of 4096 points on S².
pub(crate) fn sample_directions<const N: usize>(count: usize) -> Vec<Vector<N>> {
    match N {
        2 => (0..count)
            .map(|k| from2(&dir2(2.0 * PI * k as f64 / count as f64)))
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let (s, c) = (golden * k as f64).sin_cos();
                    let mut v = Vector::<N>::zeros();
                    v[0] = r * c;
                    v[1] = r * s;
                    v[2] = z;
                    v
                })
                .collect()
        }
        _ => Vec::new(),
    }
}

/// Support function from radial samples; refined by golden section in the plane.
pub(crate) fn sampled_support<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    w: &Vector<N>,
) -> f64 {
    if w.norm() == 0.0 {
        return 0.0;
    }
    let origin = Vector::<N>::zeros();
    let dirs = sample_directions::<N>(4096);
    let mut best = f64::NEG_INFINITY;
    let mut best_k = 0;
    for (k, d) in dirs.iter().enumerate() {
        let t = match body.exit_param(&origin, d) {
            Ok(t) => t,
            Err(_) => return f64::NAN,
        };
        let dot = w.dot(d);
        let val = if t.is_infinite() {
            if dot > 0.0 {
                return f64::INFINITY;
            }
            continue;
        } else {
            t * dot
        };
        if val > best {
            best = val;
            best_k = k;
        }
    }
    if N == 2 {
        let step = 2.0 * PI / 4096.0;
        let u0 = 2.0 * PI * best_k as f64 / 4096.0;
        let (_, negval) = crate::numerics::golden_min(
            |u| {
                let d = from2::<N>(&dir2(u));
                body.exit_param(&origin, &d)
                    .map(|t| -t * w.dot(&d))
                    .unwrap_or(f64::INFINITY)
            },
            u0 - step,
            u0 + step,
            1e-12,
        );
        best = best.max(-negval);
    }
    best
}

/// Planar frame from finite differences of the radial function `ρ(u)`,
/// supplied as a closure (usually ray casts from the origin). Used by bodies
/// without analytic boundary data.
pub(crate) fn planar_frame_fd(
    rho: impl Fn(f64) -> Result<f64>,
    direction: &Vector2,
    h: f64,
) -> Result<BoundaryPoint<2>> {
    let u = direction[1].atan2(direction[0]);
    let r0 = rho(u)?;
    let rp = rho(u + h)?;
    let rm = rho(u - h)?;
    if !(r0.is_finite() && rp.is_finite() && rm.is_finite()) {
        return Err(unsupported("frame of an unbounded boundary direction"));
    }
    let d1 = (rp - rm) / (2.0 * h);
    let d2 = (rp - 2.0 * r0 + rm) / (h * h);
    let back = rho(u + PI)?;
    Ok(polar_frame(u, r0, d1, d2, back / r0))
}

/// Radial function of a generic-dimension body restricted to the first two axes.
pub(crate) fn radial_in_plane<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
) -> impl Fn(f64) -> Result<f64> + '_ {
    move |u| body.exit_param(&Vector::<N>::zeros(), &from2(&dir2(u)))
}

/// Lifts a planar frame into `N` coordinates (used with `N = 2`).
pub(crate) fn lift_frame<const N: usize>(f: BoundaryPoint<2>) -> BoundaryPoint<N> {
    BoundaryPoint {
        direction: from2(&f.direction),
        position: from2(&f.position),
        normal: from2(&f.normal),
        curvature: f.curvature,
        antipodal: f.antipodal,
        support: f.support,
    }
}

/// Determinant of a fixed-size square matrix.
pub(crate) fn det<const N: usize>(m: &nalgebra::SMatrix<f64, N, N>) -> f64 {
    nalgebra::DMatrix::from_column_slice(N, N, m.as_slice()).determinant()
}

/// Frame of a polar curve `ρ(u)` with derivatives `ρ′`, `ρ″`.
pub(crate) fn polar_frame(u: f64, r: f64, dr: f64, ddr: f64, antipodal: f64) -> BoundaryPoint<2> {
    let e = dir2(u);
    let e_perp = Vector2::new(-e[1], e[0]);
    let speed = (r * r + dr * dr).sqrt();
    let normal = (e * r - e_perp * dr) / speed;
    let k = (r * r + 2.0 * dr * dr - r * ddr) / speed.powi(3);
    BoundaryPoint {
        direction: e,
        position: e * r,
        normal,
        curvature: Some(k.max(0.0)),
        antipodal,
        support: r * r / speed,
    }
}
