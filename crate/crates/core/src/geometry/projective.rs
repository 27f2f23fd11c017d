use super::{from2, to2, BodyKind, BoundaryPoint, ConvexBody, Vector, Vector2};
use crate::error::{domain, invalid, numerical, unsupported, Result};
use nalgebra::{DMatrix, SMatrix};
use rand::Rng;
use std::fmt;
use std::sync::Arc;

/// Projective transformation `x ↦ (A x + b) / (⟨c, x⟩ + d)`.
///
/// Stored in block form of the homogeneous matrix `[[A, b], [cᵀ, d]]` together
/// with its inverse in the same form.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMap<const N: usize> {
    linear: SMatrix<f64, N, N>,
    translation: Vector<N>,
    row: Vector<N>,
    scale: f64,
    inv_linear: SMatrix<f64, N, N>,
    inv_translation: Vector<N>,
    inv_row: Vector<N>,
    inv_scale: f64,
}

impl<const N: usize> ProjectiveMap<N> {
    pub fn new(
        linear: SMatrix<f64, N, N>,
        translation: Vector<N>,
        row: Vector<N>,
        scale: f64,
    ) -> Result<Self> {
        let h = assemble(&linear, &translation, &row, scale);
        let inv = h
            .clone()
            .try_inverse()
            .ok_or_else(|| invalid("projective matrix is singular"))?;
        let cond = h.norm() * inv.norm();
        if !cond.is_finite() || cond > 1e12 {
            return Err(invalid("projective matrix is numerically singular"));
        }
        let (il, it, ir, is) = split::<N>(&inv);
        Ok(Self {
            linear,
            translation,
            row,
            scale,
            inv_linear: il,
            inv_translation: it,
            inv_row: ir,
            inv_scale: is,
        })
    }

    /// From an `(N+1)×(N+1)` homogeneous matrix.
    pub fn from_homogeneous(h: &DMatrix<f64>) -> Result<Self> {
        if h.nrows() != N + 1 || h.ncols() != N + 1 {
            return Err(invalid(format!(
                "homogeneous matrix must be {}x{}",
                N + 1,
                N + 1
            )));
        }
        let (l, t, r, s) = split::<N>(h);
        Self::new(l, t, r, s)
    }

    pub fn identity() -> Self {
        Self::new(
            SMatrix::identity(),
            Vector::<N>::zeros(),
            Vector::<N>::zeros(),
            1.0,
        )
        .expect("identity is invertible")
    }

    pub fn linear(a: SMatrix<f64, N, N>) -> Result<Self> {
        Self::new(a, Vector::<N>::zeros(), Vector::<N>::zeros(), 1.0)
    }

    pub fn affine(a: SMatrix<f64, N, N>, b: Vector<N>) -> Result<Self> {
        Self::new(a, b, Vector::<N>::zeros(), 1.0)
    }

    /// Random origin-fixing map `x ↦ A x / (1 + ⟨c, x⟩)` with
    /// `A = I + strength·G` and `|c| ≤ strength·row_scale`.
    pub fn random_origin_fixing(rng: &mut impl Rng, strength: f64, row_scale: f64) -> Self {
        loop {
            let mut a = SMatrix::<f64, N, N>::identity();
            for v in a.iter_mut() {
                *v += strength * rng.gen_range(-1.0..1.0);
            }
            let mut c = Vector::<N>::zeros();
            for v in c.iter_mut() {
                *v = strength * row_scale * rng.gen_range(-1.0..1.0);
            }
            if super::det(&a).abs() < 0.2 {
                continue;
            }
            if let Ok(m) = Self::new(a, Vector::<N>::zeros(), c, 1.0) {
                return m;
            }
        }
    }

    pub fn homogeneous(&self) -> DMatrix<f64> {
        assemble(&self.linear, &self.translation, &self.row, self.scale)
    }

    pub fn fixes_origin(&self) -> bool {
        self.translation.norm() <= 1e-15 * (self.linear.norm() + self.scale.abs())
    }

    pub fn inverse(&self) -> Self {
        Self {
            linear: self.inv_linear,
            translation: self.inv_translation,
            row: self.inv_row,
            scale: self.inv_scale,
            inv_linear: self.linear,
            inv_translation: self.translation,
            inv_row: self.row,
            inv_scale: self.scale,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Self::from_homogeneous(&(self.homogeneous() * other.homogeneous()))
    }

    /// Denominator `⟨c, x⟩ + d`.
    pub fn denominator(&self, x: &Vector<N>) -> f64 {
        self.row.dot(x) + self.scale
    }

    pub fn apply(&self, x: &Vector<N>) -> Result<Vector<N>> {
        let d = self.denominator(x);
        if d == 0.0 || !d.is_finite() {
            return Err(domain("point is mapped to infinity"));
        }
        Ok((self.linear * x + self.translation) / d)
    }

    /// Derivative `DT(x)·v`.
    pub fn differential(&self, x: &Vector<N>, v: &Vector<N>) -> Vector<N> {
        let num = self.linear * x + self.translation;
        let den = self.denominator(x);
        (self.linear * v * den - num * self.row.dot(v)) / (den * den)
    }

    /// Second derivative `D²T(x)[v, v]`.
    pub fn second_differential(&self, x: &Vector<N>, v: &Vector<N>) -> Vector<N> {
        let num = self.linear * x + self.translation;
        let den = self.denominator(x);
        let cv = self.row.dot(v);
        let w = self.linear * v * den - num * cv;
        w * (-2.0 * cv / (den * den * den))
    }

    /// Jacobian determinant of `T` at `x`.
    pub fn jacobian_det(&self, x: &Vector<N>) -> f64 {
        let num = self.linear * x + self.translation;
        let den = self.denominator(x);
        let m = (self.linear * den - num * self.row.transpose()) / (den * den);
        super::det(&m)
    }

    fn negated(&self) -> Self {
        Self {
            linear: -self.linear,
            translation: -self.translation,
            row: -self.row,
            scale: -self.scale,
            inv_linear: self.inv_linear,
            inv_translation: self.inv_translation,
            inv_row: self.inv_row,
            inv_scale: self.inv_scale,
        }
    }
}

impl ProjectiveMap<2> {
    /// Cayley-type map taking the unit disc onto the parabola region
    /// `y ≥ x²/2`, with `(x, y) ↦ (x, (1 + y)/2) / (1 - y)`.
    pub fn disc_to_parabola() -> Self {
        Self::new(
            SMatrix::<f64, 2, 2>::new(1.0, 0.0, 0.0, 0.5),
            Vector2::new(0.0, 0.5),
            Vector2::new(0.0, -1.0),
            1.0,
        )
        .expect("Cayley map is invertible")
    }
}

fn assemble<const N: usize>(
    l: &SMatrix<f64, N, N>,
    t: &Vector<N>,
    r: &Vector<N>,
    s: f64,
) -> DMatrix<f64> {
    let mut h = DMatrix::<f64>::zeros(N + 1, N + 1);
    for i in 0..N {
        for j in 0..N {
            h[(i, j)] = l[(i, j)];
        }
        h[(i, N)] = t[i];
        h[(N, i)] = r[i];
    }
    h[(N, N)] = s;
    h
}

fn split<const N: usize>(h: &DMatrix<f64>) -> (SMatrix<f64, N, N>, Vector<N>, Vector<N>, f64) {
    let mut l = SMatrix::<f64, N, N>::zeros();
    let mut t = Vector::<N>::zeros();
    let mut r = Vector::<N>::zeros();
    for i in 0..N {
        for j in 0..N {
            l[(i, j)] = h[(i, j)];
        }
        t[i] = h[(i, N)];
        r[i] = h[(N, i)];
    }
    (l, t, r, h[(N, N)])
}

/// Image `T(K)` of a convex body under a projective map.
///
/// Queries are pulled back through `T⁻¹`, so ray exits are exact up to the
/// accuracy of the inner body.
#[derive(Clone)]
pub struct Mapped<const N: usize> {
    inner: Arc<dyn ConvexBody<N>>,
    map: ProjectiveMap<N>,
    bounded: bool,
}

impl<const N: usize> fmt::Debug for Mapped<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mapped")
            .field("inner", &self.inner)
            .field("map", &self.map.homogeneous())
            .finish()
    }
}

impl<const N: usize> Mapped<N> {
    /// Rejects maps whose hyperplane sent to infinity cuts the interior of the body.
    pub fn new(inner: Arc<dyn ConvexBody<N>>, map: ProjectiveMap<N>) -> Result<Self> {
        // Orient the homogeneous matrix so the denominator is positive on K.
        let probe = Vector::<N>::zeros();
        let probe = if inner.contains(&probe) {
            probe
        } else {
            interior_probe(inner.as_ref())?
        };
        let mut map = map;
        let d0 = map.denominator(&probe);
        if d0 == 0.0 {
            return Err(invalid("an interior point is mapped to infinity"));
        }
        if d0 < 0.0 {
            map = map.negated();
            let ProjectiveMap { linear, translation, row, scale, .. } = map.clone();
            map = ProjectiveMap::new(linear, translation, row, scale)?;
        }
        // min_K ⟨c, x⟩ + d = d - h_K(-c)
        let h = inner.support(&(-map.row));
        let min_den = map.scale - h;
        let tol = 1e-12 * (map.scale.abs() + map.row.norm());
        if h.is_nan() {
            return Err(numerical("support function evaluation failed"));
        }
        if min_den < -tol {
            return Err(invalid(
                "map sends an interior hyperplane to infinity; the image is not convex",
            ));
        }
        let bounded = inner.is_bounded() && min_den > tol;
        Ok(Self {
            inner,
            map,
            bounded,
        })
    }

    pub fn map(&self) -> &ProjectiveMap<N> {
        &self.map
    }

    pub fn inner(&self) -> &Arc<dyn ConvexBody<N>> {
        &self.inner
    }
}

/// Some interior point of an oracle whose origin is not interior: walk up
/// the last axis (paraboloids) or along the first axis.
fn interior_probe<const N: usize, B: ConvexBody<N> + ?Sized>(body: &B) -> Result<Vector<N>> {
    for axis in [N - 1, 0] {
        for s in [1.0, -1.0] {
            let mut x = Vector::<N>::zeros();
            x[axis] = s;
            if body.contains(&x) {
                return Ok(x);
            }
        }
    }
    Err(invalid("could not find an interior point of the body"))
}

impl<const N: usize> ConvexBody<N> for Mapped<N> {
    fn kind(&self) -> BodyKind {
        BodyKind::Mapped
    }

    fn contains(&self, y: &Vector<N>) -> bool {
        let inv = self.map.inverse();
        let den = inv.denominator(y);
        if den == 0.0 {
            return false;
        }
        let x = (inv.linear * y + inv.translation) / den;
        // The preimage must sit on the positive side of the denominator.
        self.map.denominator(&x) > 0.0 && self.inner.contains(&x)
    }

    fn exit_param(&self, y: &Vector<N>, w: &Vector<N>) -> Result<f64> {
        let inv = &self.map;
        let (il, it, ir, is) = (
            inv.inv_linear,
            inv.inv_translation,
            inv.inv_row,
            inv.inv_scale,
        );
        let mut pxy = il * y + it;
        let mut pz = ir.dot(y) + is;
        let mut qxy = il * w;
        let mut qz = ir.dot(w);
        if pz < 0.0 {
            pxy = -pxy;
            pz = -pz;
            qxy = -qxy;
            qz = -qz;
        }
        if pz == 0.0 {
            return Err(domain("point is not in the affine image"));
        }
        let x0 = pxy / pz;
        let dir = (qxy * pz - pxy * qz) / (pz * pz);
        if dir.norm() == 0.0 {
            return Err(numerical("degenerate pulled-back direction"));
        }
        let tau = self.inner.exit_param(&x0, &dir)?;
        if tau.is_infinite() {
            return Ok(if qz < 0.0 { -pz / qz } else { f64::INFINITY });
        }
        let den = pz - tau * qz;
        Ok(if den > 0.0 {
            tau * pz / den
        } else {
            f64::INFINITY
        })
    }

    fn frame(&self, direction: &Vector<N>) -> Result<BoundaryPoint<N>> {
        if N != 2 {
            return Err(unsupported("mapped frames are implemented in the plane"));
        }
        let origin = Vector::<N>::zeros();
        if !self.contains(&origin) {
            return Err(domain("origin is not interior to the mapped body"));
        }
        let e = direction / direction.norm();
        let t = self.exit_param(&origin, &e)?;
        if !t.is_finite() {
            return Err(unsupported("unbounded direction has no boundary frame"));
        }
        let y = e * t;
        let q = self.map.inverse().apply(&y)?;
        let qn = q.norm();
        let inner = if qn > 0.0 && self.inner.contains(&Vector::<N>::zeros()) {
            self.inner.frame(&(q / qn))?
        } else {
            return Err(unsupported("inner body has no radial frames"));
        };
        let n_in = to2(&inner.normal);
        let tau = from2::<N>(&Vector2::new(-n_in[1], n_in[0]));
        let d1 = to2(&self.map.differential(&inner.position, &tau));
        let curvature = inner.curvature.map(|k| {
            let acc = self.map.second_differential(&inner.position, &tau)
                + self.map.differential(&inner.position, &(-inner.normal * k));
            let d2 = to2(&acc);
            super::cross2(&d1, &d2).abs() / d1.norm().powi(3)
        });
        let mut normal = Vector2::new(d1[1], -d1[0]) / d1.norm();
        if normal.dot(&to2(&y)) < 0.0 {
            normal = -normal;
        }
        let normal = from2::<N>(&normal);
        let back = self.exit_param(&origin, &(-e))?;
        Ok(BoundaryPoint {
            direction: e,
            position: y,
            normal,
            curvature,
            antipodal: back / t,
            support: y.dot(&normal),
        })
    }

    fn is_bounded(&self) -> bool {
        self.bounded
    }

    fn breakpoints(&self) -> Vec<f64> {
        if N != 2 {
            return Vec::new();
        }
        let origin = Vector::<N>::zeros();
        self.inner
            .breakpoints()
            .into_iter()
            .filter_map(|u| {
                let d = from2::<N>(&super::dir2(u));
                let t = self.inner.exit_param(&origin, &d).ok()?;
                let y = self.map.apply(&(d * t)).ok()?;
                Some(super::wrap_angle(y[1].atan2(y[0])))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Ellipsoid;

    #[test]
    fn inverse_round_trip() {
        let m = ProjectiveMap::<2>::new(
            SMatrix::<f64, 2, 2>::new(1.2, 0.3, -0.1, 0.9),
            Vector2::new(0.1, 0.0),
            Vector2::new(0.2, -0.1),
            1.0,
        )
        .unwrap();
        let x = Vector2::new(0.3, -0.4);
        let back = m.inverse().apply(&m.apply(&x).unwrap()).unwrap();
        assert!((back - x).norm() < 1e-14);
    }

    #[test]
    fn linear_image_of_disc_is_ellipse() {
        let disc: Arc<dyn ConvexBody<2>> = Arc::new(Ellipsoid::<2>::ball(1.0).unwrap());
        let map = ProjectiveMap::linear(SMatrix::<f64, 2, 2>::new(2.0, 0.0, 0.0, 1.0)).unwrap();
        let img = Mapped::new(disc, map).unwrap();
        let ell = Ellipsoid::<2>::axis_aligned([2.0, 1.0]).unwrap();
        let x = Vector2::new(0.4, 0.2);
        let v = Vector2::new(0.3, 1.0);
        let a = img.exit_param(&x, &v).unwrap();
        let b = ell.exit_param(&x, &v).unwrap();
        assert!((a - b).abs() < 1e-14);
        let f = img.frame(&Vector2::new(1.0, 0.0)).unwrap();
        assert!((f.curvature.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cayley_image_is_the_parabola() {
        let disc: Arc<dyn ConvexBody<2>> = Arc::new(Ellipsoid::<2>::ball(1.0).unwrap());
        let img = Mapped::new(disc, ProjectiveMap::disc_to_parabola()).unwrap();
        assert!(!img.is_bounded());
        let x = Vector2::new(0.0, 1.0);
        assert!(img.exit_param(&x, &Vector2::new(0.0, 1.0)).unwrap().is_infinite());
        let t = img.exit_param(&x, &Vector2::new(1.0, 0.0)).unwrap();
        assert!((t - 2f64.sqrt()).abs() < 1e-12);
    }
}
