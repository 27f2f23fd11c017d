use super::{
    dir2, from2, lift_frame, planar_frame_fd, radial_in_plane, sample_directions, to2, BodyKind,
    BoundaryPoint, ConvexBody, Vector, Vector2,
};
use crate::error::{invalid, numerical, unsupported, Result};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Step of the finite-difference frames used for bodies without analytic boundary data.
const FD_STEP: f64 = 1e-3;

/// Half-space `{x : ⟨n, x⟩ < h}` with `h > 0`.
#[derive(Debug, Clone)]
pub struct HalfSpace<const N: usize> {
    normal: Vector<N>,
    offset: f64,
}

impl<const N: usize> HalfSpace<N> {
    pub fn new(normal: Vector<N>, offset: f64) -> Result<Self> {
        let len = normal.norm();
        if !(len > 0.0 && len.is_finite()) {
            return Err(invalid("half-space normal must be nonzero"));
        }
        if !(offset > 0.0) {
            return Err(invalid("origin must lie strictly inside the half-space"));
        }
        Ok(Self {
            normal: normal / len,
            offset: offset / len,
        })
    }
}

impl<const N: usize> ConvexBody<N> for HalfSpace<N> {
    fn kind(&self) -> BodyKind {
        BodyKind::HalfSpace
    }

    fn contains(&self, x: &Vector<N>) -> bool {
        self.normal.dot(x) < self.offset
    }

    fn exit_param(&self, x: &Vector<N>, v: &Vector<N>) -> Result<f64> {
        let dn = self.normal.dot(v);
        Ok(if dn > 0.0 {
            (self.offset - self.normal.dot(x)) / dn
        } else {
            f64::INFINITY
        })
    }

    fn frame(&self, direction: &Vector<N>) -> Result<BoundaryPoint<N>> {
        let e = direction / direction.norm();
        let dn = self.normal.dot(&e);
        if dn <= 0.0 {
            return Err(unsupported("ray from the origin does not meet the half-space boundary"));
        }
        let p = e * (self.offset / dn);
        Ok(BoundaryPoint {
            direction: e,
            position: p,
            normal: self.normal,
            curvature: Some(0.0),
            antipodal: f64::INFINITY,
            support: self.offset,
        })
    }

    fn is_bounded(&self) -> bool {
        false
    }

    fn support(&self, w: &Vector<N>) -> f64 {
        let s = w.dot(&self.normal);
        if s >= 0.0 && (w - self.normal * s).norm() <= 1e-14 * w.norm() {
            s * self.offset
        } else {
            f64::INFINITY
        }
    }
}

/// Intersection of convex bodies sharing the same origin.
#[derive(Clone)]
pub struct Intersection<const N: usize> {
    parts: Vec<Arc<dyn ConvexBody<N>>>,
    bounded: bool,
}

impl<const N: usize> fmt::Debug for Intersection<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Intersection")
            .field("parts", &self.parts)
            .finish()
    }
}

impl<const N: usize> Intersection<N> {
    pub fn new(parts: Vec<Arc<dyn ConvexBody<N>>>) -> Result<Self> {
        if parts.is_empty() {
            return Err(invalid("intersection of no bodies"));
        }
        let origin = Vector::<N>::zeros();
        if !parts.iter().all(|p| p.contains(&origin)) {
            return Err(invalid("origin is not interior to every part"));
        }
        let bounded = parts.iter().any(|p| p.is_bounded())
            || sample_directions::<N>(1024).iter().all(|d| {
                parts
                    .iter()
                    .map(|p| p.exit_param(&origin, d).unwrap_or(f64::INFINITY))
                    .fold(f64::INFINITY, f64::min)
                    .is_finite()
            });
        Ok(Self { parts, bounded })
    }

    /// Exit parameter and index of the part that realizes it.
    fn exit_with_part(&self, x: &Vector<N>, v: &Vector<N>) -> Result<(f64, usize, f64)> {
        let mut best = (f64::INFINITY, 0usize);
        let mut second = f64::INFINITY;
        for (i, p) in self.parts.iter().enumerate() {
            let t = p.exit_param(x, v)?;
            if t < best.0 {
                second = best.0;
                best = (t, i);
            } else if t < second {
                second = t;
            }
        }
        Ok((best.0, best.1, second))
    }
}

impl<const N: usize> ConvexBody<N> for Intersection<N> {
    fn kind(&self) -> BodyKind {
        BodyKind::Intersection
    }

    fn contains(&self, x: &Vector<N>) -> bool {
        self.parts.iter().all(|p| p.contains(x))
    }

    fn exit_param(&self, x: &Vector<N>, v: &Vector<N>) -> Result<f64> {
        Ok(self.exit_with_part(x, v)?.0)
    }

    fn frame(&self, direction: &Vector<N>) -> Result<BoundaryPoint<N>> {
        let origin = Vector::<N>::zeros();
        let e = direction / direction.norm();
        let (t, i, second) = self.exit_with_part(&origin, &e)?;
        if !t.is_finite() {
            return Err(unsupported("unbounded direction has no boundary frame"));
        }
        let mut frame = match self.parts[i].frame(&e) {
            Ok(f) => f,
            Err(_) if N == 2 => {
                lift_frame(planar_frame_fd(radial_in_plane(self), &to2(&e), FD_STEP)?)
            }
            Err(err) => return Err(err),
        };
        if (second - t).abs() <= 1e-12 * t {
            frame.curvature = None;
        }
        let back = self.exit_param(&origin, &(-e))?;
        frame.antipodal = back / t;
        Ok(frame)
    }

    fn is_bounded(&self) -> bool {
        self.bounded
    }

    fn breakpoints(&self) -> Vec<f64> {
        if N != 2 {
            return Vec::new();
        }
        let origin = Vector::<N>::zeros();
        let owner = |u: f64| {
            self.exit_with_part(&origin, &from2(&dir2(u)))
                .map(|r| r.1)
                .unwrap_or(usize::MAX)
        };
        let n = 4096;
        let mut out = Vec::new();
        for k in 0..n {
            let (mut a, mut b) = (
                2.0 * PI * k as f64 / n as f64,
                2.0 * PI * (k + 1) as f64 / n as f64,
            );
            let (oa, ob) = (owner(a), owner(b));
            if oa == ob {
                continue;
            }
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if owner(m) == oa {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        out
    }
}

type MembershipFn<const N: usize> = dyn Fn(&Vector<N>) -> bool + Send + Sync;

/// Convex body known only through a membership predicate.
///
/// Ray exits use an exponential bracket search followed by bisection.
#[derive(Clone)]
pub struct Membership<const N: usize> {
    inside: Arc<MembershipFn<N>>,
    scale: f64,
    rel_tol: f64,
    bounded: bool,
}

impl<const N: usize> fmt::Debug for Membership<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Membership")
            .field("scale", &self.scale)
            .field("rel_tol", &self.rel_tol)
            .finish()
    }
}

impl<const N: usize> Membership<N> {
    /// `scale` is a typical chord length used to start the bracket search.
    pub fn new(
        inside: impl Fn(&Vector<N>) -> bool + Send + Sync + 'static,
        scale: f64,
        bounded: bool,
    ) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid("membership scale must be positive"));
        }
        if !inside(&Vector::<N>::zeros()) {
            return Err(invalid("origin is not interior"));
        }
        Ok(Self {
            inside: Arc::new(inside),
            scale,
            rel_tol: 1e-12,
            bounded,
        })
    }

    pub fn with_tolerance(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

impl<const N: usize> ConvexBody<N> for Membership<N> {
    fn kind(&self) -> BodyKind {
        BodyKind::Generic
    }

    fn contains(&self, x: &Vector<N>) -> bool {
        (self.inside)(x)
    }

    fn exit_param(&self, x: &Vector<N>, v: &Vector<N>) -> Result<f64> {
        let vn = v.norm();
        let mut lo = 0.0;
        let mut hi = self.scale / vn;
        let mut expansions = 0;
        while (self.inside)(&(x + v * hi)) {
            lo = hi;
            hi *= 2.0;
            expansions += 1;
            if expansions > 200 {
                return if self.bounded {
                    Err(numerical(format!("no exit bracket found up to t = {hi:e}")))
                } else {
                    Ok(f64::INFINITY)
                };
            }
        }
        let mut iters = 0;
        while hi - lo > self.rel_tol * hi {
            let mid = 0.5 * (lo + hi);
            if (self.inside)(&(x + v * mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
            iters += 1;
            if iters > 2000 {
                return Err(numerical(format!(
                    "bisection stalled in [{lo:e}, {hi:e}] after {iters} steps"
                )));
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn frame(&self, direction: &Vector<N>) -> Result<BoundaryPoint<N>> {
        if N != 2 {
            return Err(unsupported("membership frames exist only in the plane"));
        }
        Ok(lift_frame(planar_frame_fd(
            radial_in_plane(self),
            &to2(direction),
            FD_STEP,
        )?))
    }

    fn is_bounded(&self) -> bool {
        self.bounded
    }
}

/// Disc of radius `radius` about the origin as a membership oracle; handy as
/// a generic-kind reference body.
pub fn membership_disc(radius: f64) -> Result<Membership<2>> {
    Membership::new(move |x: &Vector2| x.norm() < radius, radius, true)
}
