use super::{cross2, dir2, polar_frame, BodyKind, BoundaryPoint, ConvexBody, Vector2};
use crate::error::{invalid, numerical, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Builtin radial functions `ρ(u)` with closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rho", content = "params", rename_all = "snake_case")]
pub enum RadialProfile {
    /// Circle of the given radius about the origin.
    Circle { radius: f64 },
    /// Circle of radius `radius` centered at `(cx, cy)`, seen from the origin.
    ShiftedCircle { radius: f64, cx: f64, cy: f64 },
    /// `ρ = b + a cos u`; convex iff `b ≥ 2|a|`.
    Limacon { b: f64, a: f64 },
    /// `ρ = r0 (1 + eps cos(k u))`.
    Cosine { r0: f64, eps: f64, k: u32 },
}

impl RadialProfile {
    /// `(ρ, ρ′, ρ″)` at angle `u`.
    pub fn eval(&self, u: f64) -> (f64, f64, f64) {
        match *self {
            RadialProfile::Circle { radius } => (radius, 0.0, 0.0),
            RadialProfile::ShiftedCircle { radius, cx, cy } => {
                let (s, c) = u.sin_cos();
                let p = cx * c + cy * s;
                let q = cx * s - cy * c;
                let w = (radius * radius - q * q).sqrt();
                let rho = p + w;
                let d1 = -q - q * p / w;
                let d2 = -p - (p * p - q * q) / w - q * q * p * p / (w * w * w);
                (rho, d1, d2)
            }
            RadialProfile::Limacon { b, a } => {
                let (s, c) = u.sin_cos();
                (b + a * c, -a * s, -a * c)
            }
            RadialProfile::Cosine { r0, eps, k } => {
                let kf = k as f64;
                let (s, c) = (kf * u).sin_cos();
                (r0 * (1.0 + eps * c), -r0 * eps * kf * s, -r0 * eps * kf * kf * c)
            }
        }
    }

    fn symmetric(&self) -> bool {
        match *self {
            RadialProfile::Circle { .. } => true,
            RadialProfile::ShiftedCircle { cx, cy, .. } => cx == 0.0 && cy == 0.0,
            RadialProfile::Limacon { a, .. } => a == 0.0,
            RadialProfile::Cosine { eps, k, .. } => eps == 0.0 || k % 2 == 0,
        }
    }
}

/// Star-shaped convex body given by its radial function about the origin.
#[derive(Debug, Clone)]
pub struct Radial2d {
    profile: RadialProfile,
    rho_max: f64,
}

impl Radial2d {
    /// Validates positivity and convexity of the profile on a dense sample.
    pub fn new(profile: RadialProfile) -> Result<Self> {
        if let RadialProfile::ShiftedCircle { radius, cx, cy } = profile {
            if !(radius > 0.0) || cx.hypot(cy) >= radius {
                return Err(invalid("origin is not inside the shifted circle"));
            }
        }
        let mut rho_max: f64 = 0.0;
        for k in 0..4096 {
            let u = 2.0 * PI * k as f64 / 4096.0;
            let (r, d1, d2) = profile.eval(u);
            if !(r > 0.0 && r.is_finite()) {
                return Err(invalid("radial function must be positive (origin interior)"));
            }
            if r * r + 2.0 * d1 * d1 - r * d2 < -1e-12 * r * r {
                return Err(invalid(format!("radial profile is not convex near u = {u:.4}")));
            }
            rho_max = rho_max.max(r);
        }
        Ok(Self {
            profile,
            rho_max: rho_max * 1.01,
        })
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    /// Excess of `|y|` over `ρ(arg y)` and its derivative along `v`.
    fn gap(&self, y: &Vector2, v: &Vector2) -> (f64, f64) {
        let r = y.norm();
        let u = y[1].atan2(y[0]);
        let (rho, d1, _) = self.profile.eval(u);
        let dr = y.dot(v) / r;
        let du = cross2(y, v) / (r * r);
        (r - rho, dr - d1 * du)
    }
}

impl ConvexBody<2> for Radial2d {
    fn kind(&self) -> BodyKind {
        BodyKind::Radial2d
    }

    fn contains(&self, x: &Vector2) -> bool {
        let r = x.norm();
        r == 0.0 || r < self.profile.eval(x[1].atan2(x[0])).0
    }

    fn exit_param(&self, x: &Vector2, v: &Vector2) -> Result<f64> {
        let vn = v.norm();
        if x.norm() == 0.0 {
            return Ok(self.profile.eval(v[1].atan2(v[0])).0 / vn);
        }
        // gap < 0 at lo, > 0 at hi; safeguarded Newton inside the bracket.
        let mut lo = 0.0;
        let mut hi = (x.norm() + self.rho_max) / vn;
        let mut t = 0.5 * hi;
        for _ in 0..200 {
            let y = x + v * t;
            let (g, dg) = self.gap(&y, v);
            if g > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let newton = t - g / dg;
            let next = if dg > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - t).abs() <= 4.0 * f64::EPSILON * t || hi - lo <= 4.0 * f64::EPSILON * hi {
                return Ok(next);
            }
            t = next;
        }
        Err(numerical(format!(
            "radial ray cast did not converge: bracket [{lo}, {hi}]"
        )))
    }

    fn frame(&self, direction: &Vector2) -> Result<BoundaryPoint<2>> {
        let u = direction[1].atan2(direction[0]);
        let (r, d1, d2) = self.profile.eval(u);
        let back = self.profile.eval(u + PI).0;
        let mut f = polar_frame(u, r, d1, d2, back / r);
        f.direction = dir2(u);
        Ok(f)
    }

    fn is_centrally_symmetric(&self) -> bool {
        self.profile.symmetric()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_circle_matches_geometry() {
        let body = Radial2d::new(RadialProfile::ShiftedCircle {
            radius: 1.0,
            cx: -0.3,
            cy: 0.0,
        })
        .unwrap();
        let f = body.frame(&Vector2::new(1.0, 0.0)).unwrap();
        assert!((f.position[0] - 0.7).abs() < 1e-14);
        assert!((f.curvature.unwrap() - 1.0).abs() < 1e-12);
        assert!((f.antipodal - 1.3 / 0.7).abs() < 1e-12);
        let g = body.frame(&dir2(1.1)).unwrap();
        assert!((g.curvature.unwrap() - 1.0).abs() < 1e-12);
        let c = Vector2::new(-0.3, 0.0);
        assert!(((g.position - c).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn newton_ray_cast_hits_the_boundary() {
        let body = Radial2d::new(RadialProfile::Limacon { b: 2.0, a: 0.7 }).unwrap();
        let x = Vector2::new(0.4, -0.3);
        let v = Vector2::new(-0.2, 1.0);
        let t = body.exit_param(&x, &v).unwrap();
        let y = x + v * t;
        let rho = body.profile.eval(y[1].atan2(y[0])).0;
        assert!((y.norm() - rho).abs() < 1e-14);
    }

    #[test]
    fn rejects_nonconvex_limacon() {
        assert!(Radial2d::new(RadialProfile::Limacon { b: 1.0, a: 0.8 }).is_err());
    }
}
