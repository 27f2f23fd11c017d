//! Hilbert distance, Finsler norm and the sphere parametrization.

use crate::error::{domain, Result};
use crate::geometry::{BoundaryPoint, ConvexBody, Vector};
use crate::numerics::{pairwise_sum, GaussLegendre};
use serde::Serialize;

/// Exit parameters of `x ± t v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Chord {
    pub t1: f64,
    pub t2: f64,
}

impl Chord {
    /// `½(1/t₁ + 1/t₂)`, with an infinite exit contributing zero.
    pub fn norm(&self) -> f64 {
        0.5 * (1.0 / self.t1 + 1.0 / self.t2)
    }
}

fn ensure_interior<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    x: &Vector<N>,
) -> Result<()> {
    if x.iter().all(|c| c.is_finite()) && body.contains(x) {
        Ok(())
    } else {
        Err(domain(format!("point {:?} is not interior", x.as_slice())))
    }
}

pub fn chord<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    x: &Vector<N>,
    v: &Vector<N>,
) -> Result<Chord> {
    ensure_interior(body, x)?;
    if v.norm() == 0.0 {
        return Err(domain("chord direction must be nonzero"));
    }
    Ok(Chord {
        t1: body.exit_param(x, v)?,
        t2: body.exit_param(x, &(-v))?,
    })
}

/// Hilbert distance `½|log [a, b, x, y]|`.
///
/// Evaluated as `½[log(1 + L/|x − a|) + log(1 + L/|y − b|)]` with `L = |y − x|`,
/// which keeps full relative accuracy for nearby points and near the boundary.
pub fn hilbert_distance<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    x: &Vector<N>,
    y: &Vector<N>,
) -> Result<f64> {
    ensure_interior(body, x)?;
    ensure_interior(body, y)?;
    let u = y - x;
    let len = u.norm();
    if len == 0.0 {
        return Ok(0.0);
    }
    let e = u / len;
    let back = body.exit_param(x, &(-e))?;
    let ahead = body.exit_param(y, &e)?;
    Ok(0.5 * ((len / back).ln_1p() + (len / ahead).ln_1p()))
}

/// Finsler norm `½(1/t₁ + 1/t₂)` of `v` at `x`.
pub fn finsler_norm<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    x: &Vector<N>,
    v: &Vector<N>,
) -> Result<f64> {
    ensure_interior(body, x)?;
    if v.norm() == 0.0 {
        return Ok(0.0);
    }
    Ok(Chord {
        t1: body.exit_param(x, v)?,
        t2: body.exit_param(x, &(-v))?,
    }
    .norm())
}

/// Radial scale of the sphere parametrization: returns `(λ, 1 − λ)` with
/// `λ = a(e^{2r} − 1)/(a e^{2r} + 1)`, both computed without cancellation.
pub fn sphere_scale(a: f64, r: f64) -> (f64, f64) {
    let q = (-2.0 * r).exp();
    let lam = a * (1.0 - q) / (a + q);
    let depth = q * (1.0 + a) / (a + q);
    (lam, depth)
}

/// `φ(p, r)`: the point at Hilbert distance `r` from the origin on the segment to `p`.
pub fn sphere_point<const N: usize>(frame: &BoundaryPoint<N>, r: f64) -> Vector<N> {
    frame.position * sphere_scale(frame.antipodal, r).0
}

/// A parametrized curve with its velocity.
pub trait Curve<const N: usize> {
    fn point(&self, t: f64) -> Vector<N>;
    fn velocity(&self, t: f64) -> Vector<N>;
}

/// Curve given by two closures.
pub struct FnCurve<P, V> {
    pub point: P,
    pub velocity: V,
}

impl<const N: usize, P, V> Curve<N> for FnCurve<P, V>
where
    P: Fn(f64) -> Vector<N>,
    V: Fn(f64) -> Vector<N>,
{
    fn point(&self, t: f64) -> Vector<N> {
        (self.point)(t)
    }

    fn velocity(&self, t: f64) -> Vector<N> {
        (self.velocity)(t)
    }
}

/// Straight segment from `a` to `b` on `[0, 1]`.
pub struct Segment<const N: usize> {
    pub a: Vector<N>,
    pub b: Vector<N>,
}

impl<const N: usize> Curve<N> for Segment<N> {
    fn point(&self, t: f64) -> Vector<N> {
        self.a + (self.b - self.a) * t
    }

    fn velocity(&self, _t: f64) -> Vector<N> {
        self.b - self.a
    }
}

/// Finsler length `∫ ‖c′(t)‖_{c(t)} dt` by 8-point Gauss–Legendre on every
/// interval of `partition`.
pub fn finsler_curve_length<const N: usize, B, C>(
    body: &B,
    curve: &C,
    partition: &[f64],
) -> Result<f64>
where
    B: ConvexBody<N> + ?Sized,
    C: Curve<N> + ?Sized,
{
    let rule = GaussLegendre::order8();
    let mut terms = Vec::with_capacity(8 * partition.len());
    for w in partition.windows(2) {
        for (t, wt) in rule.on_interval(w[0], w[1]) {
            let x = curve.point(t);
            if !body.contains(&x) {
                return Err(domain(format!(
                    "curve touches the boundary at t = {t} ({:?})",
                    x.as_slice()
                )));
            }
            terms.push(wt * finsler_norm(body, &x, &curve.velocity(t))?);
        }
    }
    Ok(pairwise_sum(&terms))
}

/// Length of a polyline as a sum of Hilbert distances (exact: segments are geodesics).
pub fn polyline_length<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    points: &[Vector<N>],
) -> Result<f64> {
    let terms = points
        .windows(2)
        .map(|w| hilbert_distance(body, &w[0], &w[1]))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Ellipsoid, Vector2};

    #[test]
    fn klein_distance_from_center() {
        let d = Ellipsoid::<2>::ball(1.0).unwrap();
        let r = hilbert_distance(&d, &Vector2::zeros(), &Vector2::new(0.5, 0.0)).unwrap();
        assert!((r - 0.5f64.atanh()).abs() < 1e-15);
    }

    #[test]
    fn sphere_scale_is_tanh_when_symmetric() {
        for r in [0.1, 1.0, 5.0, 30.0] {
            let (lam, depth) = sphere_scale(1.0, r);
            assert!((lam - f64::tanh(r)).abs() < 1e-15);
            let exact = 2.0 / ((2.0 * r).exp() + 1.0);
            assert!((depth - exact).abs() <= 1e-15 * exact);
        }
    }
}
