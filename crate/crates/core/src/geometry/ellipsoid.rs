use super::{BodyKind, BoundaryPoint, ConvexBody, Vector};
use crate::error::{invalid, Result};
use nalgebra::SMatrix;

/// Ellipsoid `{c + L y : |y| ≤ 1}` with the origin strictly inside.
#[derive(Debug, Clone)]
pub struct Ellipsoid<const N: usize> {
    center: Vector<N>,
    shape: SMatrix<f64, N, N>,
    shape_inv: SMatrix<f64, N, N>,
}

impl<const N: usize> Ellipsoid<N> {
    /// General form from a center and an invertible shape matrix `L`.
    pub fn from_shape(center: Vector<N>, shape: SMatrix<f64, N, N>) -> Result<Self> {
        let shape_inv = shape
            .try_inverse()
            .ok_or_else(|| invalid("ellipsoid shape matrix is singular"))?;
        if !shape_inv.iter().all(|x| x.is_finite()) {
            return Err(invalid("ellipsoid shape matrix is singular"));
        }
        let e = Self {
            center,
            shape,
            shape_inv,
        };
        if (e.shape_inv * (-center)).norm() >= 1.0 {
            return Err(invalid("origin is not interior to the ellipsoid"));
        }
        Ok(e)
    }

    /// Axis-aligned ellipsoid centered at the origin.
    pub fn axis_aligned(semi_axes: [f64; N]) -> Result<Self> {
        if semi_axes.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(invalid("semi-axes must be positive and finite"));
        }
        let shape = SMatrix::<f64, N, N>::from_diagonal(&Vector::<N>::from(semi_axes));
        Self::from_shape(Vector::<N>::zeros(), shape)
    }

    /// Euclidean ball of the given radius about the origin.
    pub fn ball(radius: f64) -> Result<Self> {
        Self::axis_aligned([radius; N])
    }

    /// Same body with the coordinate origin moved to `new_origin`
    /// (expressed in current coordinates).
    pub fn recentered(&self, new_origin: &Vector<N>) -> Result<Self> {
        Self::from_shape(self.center - new_origin, self.shape)
    }

    pub fn center(&self) -> &Vector<N> {
        &self.center
    }

    pub fn shape(&self) -> &SMatrix<f64, N, N> {
        &self.shape
    }

    fn quadric(&self) -> SMatrix<f64, N, N> {
        self.shape_inv.transpose() * self.shape_inv
    }
}

impl Ellipsoid<2> {
    /// Ellipse with semi-axes `a` (along the rotated x-axis) and `b`, rotated
    /// by `angle` and centered at `center`.
    pub fn ellipse(a: f64, b: f64, angle: f64, center: Vector<2>) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(invalid("semi-axes must be positive and finite"));
        }
        let (s, c) = angle.sin_cos();
        let rot = SMatrix::<f64, 2, 2>::new(c, -s, s, c);
        let shape = rot * SMatrix::<f64, 2, 2>::new(a, 0.0, 0.0, b);
        Self::from_shape(center, shape)
    }
}

impl<const N: usize> ConvexBody<N> for Ellipsoid<N> {
    fn kind(&self) -> BodyKind {
        BodyKind::Ellipsoid
    }

    fn contains(&self, x: &Vector<N>) -> bool {
        (self.shape_inv * (x - self.center)).norm_squared() < 1.0
    }

    fn exit_param(&self, x: &Vector<N>, v: &Vector<N>) -> Result<f64> {
        let w = self.shape_inv * (x - self.center);
        let d = self.shape_inv * v;
        let a = d.norm_squared();
        let b = 2.0 * w.dot(&d);
        let c = w.norm_squared() - 1.0;
        let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
        let t = if b >= 0.0 {
            -2.0 * c / (b + disc)
        } else {
            (disc - b) / (2.0 * a)
        };
        Ok(t.max(0.0))
    }

    fn frame(&self, direction: &Vector<N>) -> Result<BoundaryPoint<N>> {
        let origin = Vector::<N>::zeros();
        let e = direction / direction.norm();
        let t = self.exit_param(&origin, &e)?;
        let p = e * t;
        let q = self.quadric();
        let g = q * (p - self.center);
        let gn = g.norm();
        let normal = g / gn;
        let k = super::det(&q) / gn.powi(N as i32 + 1);
        let back = self.exit_param(&origin, &(-e))?;
        Ok(BoundaryPoint {
            direction: e,
            position: p,
            normal,
            curvature: Some(k),
            antipodal: back / t,
            support: p.dot(&normal),
        })
    }

    fn support(&self, w: &Vector<N>) -> f64 {
        w.dot(&self.center) + (self.shape.transpose() * w).norm()
    }

    fn is_centrally_symmetric(&self) -> bool {
        self.center.norm() == 0.0
    }
}
