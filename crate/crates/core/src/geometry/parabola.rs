use super::{BodyKind, BoundaryPoint, ConvexBody, Vector};
use crate::error::{invalid, unsupported, Result};

/// Unbounded region `y ≥ Σ c_i x_i² / 2`, where `y` is the last coordinate.
///
/// The vertex sits at the origin, so this body is used through ray casts and
/// densities from interior points only; it has no radial frames.
#[derive(Debug, Clone)]
pub struct Paraboloid<const N: usize> {
    coeffs: Vector<N>,
}

impl<const N: usize> Paraboloid<N> {
    /// `coeffs` are the `N - 1` curvatures at the vertex.
    pub fn new(coeffs: &[f64]) -> Result<Self> {
        if coeffs.len() + 1 != N {
            return Err(invalid(format!(
                "paraboloid in dimension {N} needs {} coefficients",
                N - 1
            )));
        }
        if coeffs.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return Err(invalid("paraboloid coefficients must be positive"));
        }
        let mut c = Vector::<N>::zeros();
        for (i, v) in coeffs.iter().enumerate() {
            c[i] = *v;
        }
        Ok(Self { coeffs: c })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs.as_slice()[..N - 1]
    }

    fn height(&self, x: &Vector<N>) -> f64 {
        (0..N - 1).map(|i| 0.5 * self.coeffs[i] * x[i] * x[i]).sum()
    }
}

impl Paraboloid<2> {
    pub fn planar(c: f64) -> Result<Self> {
        Self::new(&[c])
    }
}

impl<const N: usize> ConvexBody<N> for Paraboloid<N> {
    fn kind(&self) -> BodyKind {
        BodyKind::Parabola
    }

    fn contains(&self, x: &Vector<N>) -> bool {
        x[N - 1] > self.height(x)
    }

    fn exit_param(&self, x: &Vector<N>, v: &Vector<N>) -> Result<f64> {
        let a: f64 = (0..N - 1).map(|i| 0.5 * self.coeffs[i] * v[i] * v[i]).sum();
        let b: f64 = (0..N - 1).map(|i| self.coeffs[i] * x[i] * v[i]).sum::<f64>() - v[N - 1];
        let c = self.height(x) - x[N - 1];
        if a == 0.0 {
            return Ok(if b > 0.0 { -c / b } else { f64::INFINITY });
        }
        let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
        Ok(if b >= 0.0 {
            -2.0 * c / (b + disc)
        } else {
            (disc - b) / (2.0 * a)
        })
    }

    fn frame(&self, _direction: &Vector<N>) -> Result<BoundaryPoint<N>> {
        Err(unsupported("the paraboloid has its vertex at the origin; no radial frames"))
    }

    fn is_bounded(&self) -> bool {
        false
    }

    fn support(&self, w: &Vector<N>) -> f64 {
        let wy = w[N - 1];
        let lateral: f64 = (0..N - 1).map(|i| w[i] * w[i] / self.coeffs[i]).sum();
        if wy < 0.0 {
            -lateral / (2.0 * wy)
        } else if lateral == 0.0 && wy == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertical_ray_never_leaves() {
        let p = Paraboloid::<2>::planar(1.0).unwrap();
        let t = p
            .exit_param(&Vector::<2>::new(0.0, 1.0), &Vector::<2>::new(0.0, 1.0))
            .unwrap();
        assert!(t.is_infinite());
        let down = p
            .exit_param(&Vector::<2>::new(0.0, 1.0), &Vector::<2>::new(0.0, -1.0))
            .unwrap();
        assert!((down - 1.0).abs() < 1e-15);
    }

    #[test]
    fn horizontal_ray_hits_the_curve() {
        let p = Paraboloid::<2>::planar(2.0).unwrap();
        let t = p
            .exit_param(&Vector::<2>::new(0.0, 1.0), &Vector::<2>::new(1.0, 0.0))
            .unwrap();
        assert!((t - 1.0).abs() < 1e-15);
    }
}
