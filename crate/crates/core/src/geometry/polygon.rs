use super::{cross2, dir2, wrap_angle, BodyKind, BoundaryPoint, ConvexBody, Vector2};
use crate::error::{domain, invalid, Result};
use std::f64::consts::PI;

/// Above this vertex count ray casts locate the exit edge by angular bisection.
const SCAN_LIMIT: usize = 32;

/// Convex polygon, vertices counterclockwise, origin interior.
#[derive(Debug, Clone)]
pub struct Polygon {
    vertices: Vec<Vector2>,
    /// Outward unit normal of edge `j` (from vertex `j` to `j + 1`).
    normals: Vec<Vector2>,
    /// `⟨n_j, v_j⟩ > 0`.
    offsets: Vec<f64>,
    /// Polar angles of the vertices, unwrapped so they increase from `angles[0]`.
    angles: Vec<f64>,
    /// For polygons inscribed in the unit circle: angular gaps between
    /// consecutive vertices, with compensated prefix sums over two turns.
    circle: Option<CircleGaps>,
    symmetric: bool,
}

#[derive(Debug, Clone)]
struct CircleGaps {
    gaps: Vec<f64>,
    prefix_hi: Vec<f64>,
    prefix_lo: Vec<f64>,
}

impl CircleGaps {
    fn new(gaps: Vec<f64>) -> Self {
        let m = gaps.len();
        let mut prefix_hi = Vec::with_capacity(2 * m + 1);
        let mut prefix_lo = Vec::with_capacity(2 * m + 1);
        let (mut hi, mut lo) = (0.0f64, 0.0f64);
        prefix_hi.push(0.0);
        prefix_lo.push(0.0);
        for k in 0..2 * m {
            let g = gaps[k % m];
            // two-sum
            let s = hi + g;
            let bp = s - hi;
            let err = (hi - (s - bp)) + (g - bp);
            hi = s;
            lo += err;
            prefix_hi.push(hi);
            prefix_lo.push(lo);
        }
        Self {
            gaps,
            prefix_hi,
            prefix_lo,
        }
    }

    /// Angle swept from prefix index `a` to `b` (`a ≤ b ≤ 2m`).
    fn span(&self, a: usize, b: usize) -> f64 {
        (self.prefix_hi[b] - self.prefix_hi[a]) + (self.prefix_lo[b] - self.prefix_lo[a])
    }
}

impl Polygon {
    /// Validates a counterclockwise convex vertex list with the origin inside.
    pub fn new(vertices: Vec<Vector2>) -> Result<Self> {
        let m = vertices.len();
        if m < 3 {
            return Err(invalid("a polygon needs at least 3 vertices"));
        }
        if vertices.iter().any(|v| !v[0].is_finite() || !v[1].is_finite()) {
            return Err(invalid("polygon vertices must be finite"));
        }
        let mut turning = 0.0;
        for j in 0..m {
            let e0 = vertices[(j + 1) % m] - vertices[j];
            let e1 = vertices[(j + 2) % m] - vertices[(j + 1) % m];
            if e0.norm() == 0.0 {
                return Err(invalid(format!("repeated vertex at index {j}")));
            }
            let c = cross2(&e0, &e1);
            if c < -1e-12 * e0.norm() * e1.norm() {
                return Err(invalid(format!(
                    "vertices are not in counterclockwise convex position near index {}",
                    (j + 1) % m
                )));
            }
            turning += c.atan2(e0.dot(&e1));
        }
        if (turning - 2.0 * PI).abs() > 1e-6 {
            return Err(invalid("vertex list winds more than once or is clockwise"));
        }
        let mut normals = Vec::with_capacity(m);
        let mut offsets = Vec::with_capacity(m);
        for j in 0..m {
            let e = vertices[(j + 1) % m] - vertices[j];
            let n = Vector2::new(e[1], -e[0]) / e.norm();
            let h = n.dot(&vertices[j]);
            if h <= 1e-14 * vertices[j].norm().max(1.0) {
                return Err(invalid("origin is not interior to the polygon"));
            }
            normals.push(n);
            offsets.push(h);
        }
        let angles = unwrap_angles(vertices.iter().map(|v| v[1].atan2(v[0])));
        let symmetric = is_symmetric(&vertices);
        Ok(Self {
            vertices,
            normals,
            offsets,
            angles,
            circle: None,
            symmetric,
        })
    }

    /// Polygon inscribed in the unit circle with vertex `j` at angle
    /// `start + Σ_{l<j} gaps[l]`. The gaps must be positive, below π, and sum to 2π.
    pub fn from_circle_gaps(start: f64, gaps: Vec<f64>) -> Result<Self> {
        let m = gaps.len();
        if m < 3 {
            return Err(invalid("a polygon needs at least 3 vertices"));
        }
        if gaps.iter().any(|&g| !(g > 0.0 && g < PI)) {
            return Err(invalid("angular gaps must lie in (0, π)"));
        }
        let circle = CircleGaps::new(gaps);
        let total = circle.span(0, m);
        if (total - 2.0 * PI).abs() > 1e-9 {
            return Err(invalid(format!("angular gaps sum to {total}, not 2π")));
        }
        let mut angles = Vec::with_capacity(m);
        let mut vertices = Vec::with_capacity(m);
        let mut normals = Vec::with_capacity(m);
        let mut offsets = Vec::with_capacity(m);
        for j in 0..m {
            let a = start + circle.span(0, j);
            angles.push(a);
            vertices.push(dir2(a));
            let half = 0.5 * circle.gaps[j];
            normals.push(dir2(a + half));
            offsets.push(half.cos());
        }
        let symmetric = m % 2 == 0
            && (0..m / 2).all(|j| (circle.gaps[j] - circle.gaps[j + m / 2]).abs() <= 1e-15);
        Ok(Self {
            vertices,
            normals,
            offsets,
            angles,
            circle: Some(circle),
            symmetric,
        })
    }

    /// Regular polygon with `m` vertices on the circle of radius `circumradius`,
    /// the first at angle `phase`.
    pub fn regular(m: usize, circumradius: f64, phase: f64) -> Result<Self> {
        if m < 3 {
            return Err(invalid("a polygon needs at least 3 vertices"));
        }
        if !(circumradius > 0.0 && circumradius.is_finite()) {
            return Err(invalid("circumradius must be positive"));
        }
        let gaps = vec![2.0 * PI / m as f64; m];
        let unit = Self::from_circle_gaps(phase, gaps)?;
        if circumradius == 1.0 {
            return Ok(unit);
        }
        let mut poly = unit;
        poly.circle = None;
        for v in &mut poly.vertices {
            *v *= circumradius;
        }
        for h in &mut poly.offsets {
            *h *= circumradius;
        }
        Ok(poly)
    }

    /// Axis-aligned square `[-s, s]²`.
    pub fn square(half_side: f64) -> Result<Self> {
        let s = half_side;
        Self::new(vec![
            Vector2::new(s, -s),
            Vector2::new(s, s),
            Vector2::new(-s, s),
            Vector2::new(-s, -s),
        ])
    }

    pub fn vertices(&self) -> &[Vector2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn normals(&self) -> &[Vector2] {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// Angular gaps when the polygon is inscribed in the unit circle.
    pub fn circle_gaps(&self) -> Option<&[f64]> {
        self.circle.as_ref().map(|c| c.gaps.as_slice())
    }

    /// Polar angles of the vertices in `[0, 2π)`.
    pub fn vertex_angles(&self) -> Vec<f64> {
        self.angles.iter().map(|&a| wrap_angle(a)).collect()
    }

    /// Polygon scaled about the origin.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.vertices.iter().map(|v| v * factor).collect())
    }

    /// Polygon translated by `shift`; the origin must stay interior.
    pub fn translated(&self, shift: &Vector2) -> Result<Self> {
        Self::new(self.vertices.iter().map(|v| v + shift).collect())
    }

    fn exit_on(&self, j: usize, x: &Vector2, v: &Vector2) -> Option<f64> {
        let dn = self.normals[j].dot(v);
        (dn > 0.0).then(|| ((self.offsets[j] - self.normals[j].dot(x)) / dn).max(0.0))
    }

    /// Index of the edge crossed by the ray from `x` in direction `v`.
    fn locate_edge(&self, x: &Vector2, v: &Vector2) -> usize {
        let m = self.len();
        let rel = |k: usize| {
            let d = self.vertices[k] - x;
            d[1].atan2(d[0])
        };
        let base = rel(0);
        let target = wrap_angle(v[1].atan2(v[0]) - base);
        let (mut lo, mut hi) = (0usize, m);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if wrap_angle(rel(mid) - base) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn exit_impl(&self, x: &Vector2, v: &Vector2) -> (f64, usize) {
        let m = self.len();
        let mut best = (f64::INFINITY, 0);
        if m <= SCAN_LIMIT {
            for j in 0..m {
                if let Some(t) = self.exit_on(j, x, v) {
                    if t < best.0 {
                        best = (t, j);
                    }
                }
            }
        } else {
            let j0 = self.locate_edge(x, v);
            for j in [j0 + m - 1, j0, j0 + 1] {
                let j = j % m;
                if let Some(t) = self.exit_on(j, x, v) {
                    if t < best.0 {
                        best = (t, j);
                    }
                }
            }
        }
        best
    }

    /// Vertices of the Finsler unit ball at `x`, counterclockwise, duplicates
    /// and collinear points removed.
    pub fn tangent_ball_polygon(&self, x: &Vector2) -> Result<Vec<Vector2>> {
        let raw = self.tangent_ball_points(x)?;
        let n = raw.len();
        let scale = raw.iter().map(|w| w.norm()).fold(0.0, f64::max);
        let mut corners = Vec::new();
        for k in 0..n {
            let prev = raw[(k + n - 1) % n];
            let cur = raw[k];
            let next = raw[(k + 1) % n];
            if cross2(&(cur - prev), &(next - cur)) > 1e-10 * scale * scale {
                corners.push(cur);
            }
        }
        Ok(corners)
    }

    /// All candidate boundary points of the tangent unit ball, sorted by angle.
    fn tangent_ball_points(&self, x: &Vector2) -> Result<Vec<Vector2>> {
        if !self.contains(x) {
            return Err(domain(format!("point {:?} is not interior", x.as_slice())));
        }
        let mut dirs: Vec<(f64, Vector2)> = Vec::with_capacity(2 * self.len());
        for v in &self.vertices {
            let d = v - x;
            dirs.push((d[1].atan2(d[0]), d));
            dirs.push(((-d[1]).atan2(-d[0]), -d));
        }
        dirs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(dirs
            .into_iter()
            .map(|(_, d)| {
                let t1 = self.exit_impl(x, &d).0;
                let t2 = self.exit_impl(x, &(-d)).0;
                d / (0.5 * (1.0 / t1 + 1.0 / t2))
            })
            .collect())
    }

    /// Exact Lebesgue area of the Finsler unit ball at `x` (shoelace formula).
    pub fn tangent_ball_area(&self, x: &Vector2) -> Result<f64> {
        let pts = self.tangent_ball_points(x)?;
        let n = pts.len();
        let terms: Vec<f64> = (0..n).map(|k| cross2(&pts[k], &pts[(k + 1) % n])).collect();
        Ok(0.5 * crate::numerics::pairwise_sum(&terms))
    }

    /// Hilbert length of the segment from `(1-δ)v_j` to `(1-δ)v_{j+1}`.
    ///
    /// The chord endpoints are located from the vertex deficits below the
    /// support line of edge `j`, so the result stays accurate when `δ` is far
    /// below the spacing of representable coordinates.
    pub fn scaled_edge_length(&self, j: usize, delta: f64) -> f64 {
        let m = self.len();
        let j = j % m;
        let (half_len, base_fwd, base_bwd, h) = match &self.circle {
            Some(c) => {
                let half = 0.5 * c.gaps[j];
                (half.sin(), half.sin(), half.sin(), half.cos())
            }
            None => {
                let e = self.vertices[(j + 1) % m] - self.vertices[j];
                let ehat = e / e.norm();
                (
                    0.5 * e.norm(),
                    ehat.dot(&self.vertices[(j + 1) % m]),
                    -ehat.dot(&self.vertices[j]),
                    self.offsets[j],
                )
            }
        };
        let len = (1.0 - delta) * 2.0 * half_len;
        let tau_plus = self.chord_overhang(j, true, delta * h) + delta * base_fwd;
        let tau_minus = self.chord_overhang(j, false, delta * h) + delta * base_bwd;
        0.5 * ((len / tau_minus).ln_1p() + (len / tau_plus).ln_1p())
    }

    /// Along-edge offset, measured from the edge's end vertex, of the point
    /// where the boundary drops to depth `depth` below the support line of edge `j`.
    fn chord_overhang(&self, j: usize, forward: bool, depth: f64) -> f64 {
        let m = self.len();
        let max_step = if self.symmetric { m / 2 } else { m - 1 };
        // (deficit, offset) of step s, and increments between s-1 and s.
        let geom = |s: usize| -> (f64, f64) { self.step_geometry(j, forward, s) };
        let incr = |s: usize| -> (f64, f64) { self.step_increment(j, forward, s) };
        let first_above = if self.symmetric {
            let mut hi = 1usize;
            while hi < max_step && geom(hi).0 <= depth {
                hi = (2 * hi).min(max_step);
            }
            let mut lo = hi / 2;
            // geom(lo) <= depth < geom(hi), with geom(0) = 0.
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if geom(mid).0 <= depth {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            hi
        } else {
            (1..=max_step)
                .find(|&s| geom(s).0 > depth)
                .unwrap_or(max_step)
        };
        let (g0, s0) = geom(first_above - 1);
        let (dg, ds) = incr(first_above);
        let mu = ((depth - g0) / dg).clamp(0.0, 1.0);
        s0 + mu * ds
    }

    /// Deficit below edge `j`'s support line and along-edge offset of the
    /// vertex `s` steps past the edge (forward) or before it (backward).
    fn step_geometry(&self, j: usize, forward: bool, s: usize) -> (f64, f64) {
        let m = self.len();
        if s == 0 {
            return (0.0, 0.0);
        }
        match &self.circle {
            Some(c) => {
                let half = 0.5 * c.gaps[j];
                let phi = if forward {
                    c.span(j + 1, j + 1 + s)
                } else {
                    c.span(j + m - s, j + m)
                };
                let a = half + 0.5 * phi;
                let sp = (0.5 * phi).sin();
                (2.0 * a.sin() * sp, 2.0 * a.cos() * sp)
            }
            None => {
                let vj = self.vertices[j];
                let vj1 = self.vertices[(j + 1) % m];
                let e = vj1 - vj;
                let ehat = e / e.norm();
                let n = self.normals[j];
                if forward {
                    let vk = self.vertices[(j + 1 + s) % m];
                    (self.offsets[j] - n.dot(&vk), ehat.dot(&(vk - vj1)))
                } else {
                    let vk = self.vertices[(j + m - s % m) % m];
                    (self.offsets[j] - n.dot(&vk), -ehat.dot(&(vk - vj)))
                }
            }
        }
    }

    /// Differences of [`Self::step_geometry`] between steps `s - 1` and `s`.
    fn step_increment(&self, j: usize, forward: bool, s: usize) -> (f64, f64) {
        let m = self.len();
        match &self.circle {
            Some(c) => {
                let half = 0.5 * c.gaps[j];
                let (phi0, gap) = if forward {
                    (c.span(j + 1, j + s), c.gaps[(j + s) % m])
                } else {
                    (c.span(j + m + 1 - s, j + m), c.gaps[(j + m - s) % m])
                };
                let a = half + phi0 + 0.5 * gap;
                let sg = (0.5 * gap).sin();
                (2.0 * a.sin() * sg, 2.0 * a.cos() * sg)
            }
            None => {
                let (g1, s1) = self.step_geometry(j, forward, s);
                let (g0, s0) = self.step_geometry(j, forward, s - 1);
                (g1 - g0, s1 - s0)
            }
        }
    }

    /// Hilbert length of the sphere of radius `r` about the origin. Requires a
    /// centrally symmetric polygon, for which the sphere is the polygon scaled
    /// by `tanh r` and each scaled edge is a geodesic segment.
    pub fn symmetric_sphere_length(&self, r: f64) -> Result<f64> {
        if !self.symmetric {
            return Err(domain("sphere length by edges needs a centrally symmetric polygon"));
        }
        if r <= 0.0 {
            return Ok(0.0);
        }
        let delta = 2.0 / ((2.0 * r).exp() + 1.0);
        let terms: Vec<f64> = (0..self.len())
            .map(|j| self.scaled_edge_length(j, delta))
            .collect();
        Ok(crate::numerics::pairwise_sum(&terms))
    }
}

fn unwrap_angles(raw: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for a in raw {
        match out.last() {
            None => out.push(a),
            Some(&prev) => {
                let mut a = a;
                while a <= prev {
                    a += 2.0 * PI;
                }
                out.push(a);
            }
        }
    }
    out
}

fn is_symmetric(vertices: &[Vector2]) -> bool {
    let m = vertices.len();
    if m % 2 != 0 {
        return false;
    }
    let scale = vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
    (0..m / 2).all(|j| (vertices[j] + vertices[j + m / 2]).norm() <= 1e-12 * scale)
}

impl ConvexBody<2> for Polygon {
    fn kind(&self) -> BodyKind {
        BodyKind::Polygon2d
    }

    fn contains(&self, x: &Vector2) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(n, h)| n.dot(x) < *h)
    }

    fn exit_param(&self, x: &Vector2, v: &Vector2) -> Result<f64> {
        Ok(self.exit_impl(x, v).0)
    }

    fn frame(&self, direction: &Vector2) -> Result<BoundaryPoint<2>> {
        let origin = Vector2::zeros();
        let e = direction / direction.norm();
        let (t, j) = self.exit_impl(&origin, &e);
        let m = self.len();
        let p = e * t;
        // Angular position within the edge decides whether we sit on a corner.
        let u = wrap_angle(e[1].atan2(e[0]) - self.angles[j]);
        let span = wrap_angle(self.angles[(j + 1) % m] - self.angles[j]);
        let span = if span == 0.0 { 2.0 * PI } else { span };
        let tol = 1e-12 * span.max(1e-300);
        let (normal, curvature) = if u <= tol || u >= 2.0 * PI - tol {
            let n = self.normals[(j + m - 1) % m] + self.normals[j];
            (n / n.norm(), None)
        } else if (u - span).abs() <= tol {
            let n = self.normals[j] + self.normals[(j + 1) % m];
            (n / n.norm(), None)
        } else {
            (self.normals[j], Some(0.0))
        };
        let antipodal = if self.symmetric {
            1.0
        } else {
            self.exit_impl(&origin, &(-e)).0 / t
        };
        Ok(BoundaryPoint {
            direction: e,
            position: p,
            normal,
            curvature,
            antipodal,
            support: if curvature.is_some() {
                self.offsets[j]
            } else {
                p.dot(&normal)
            },
        })
    }

    fn support(&self, w: &Vector2) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(w))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.vertex_angles()
    }

    fn as_polygon(&self) -> Option<&Polygon> {
        Some(self)
    }

    fn boundary_distance_exact(&self, x: &Vector2) -> Option<f64> {
        Some(
            self.normals
                .iter()
                .zip(&self.offsets)
                .map(|(n, h)| h - n.dot(x))
                .fold(f64::INFINITY, f64::min),
        )
    }

    fn is_centrally_symmetric(&self) -> bool {
        self.symmetric
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_exit_and_frame() {
        let sq = Polygon::square(1.0).unwrap();
        let t = sq.exit_param(&Vector2::zeros(), &Vector2::new(1.0, 0.0)).unwrap();
        assert!((t - 1.0).abs() < 1e-15);
        let f = sq.frame(&Vector2::new(1.0, 0.0)).unwrap();
        assert_eq!(f.curvature, Some(0.0));
        assert!((f.antipodal - 1.0).abs() < 1e-15 && (f.support - 1.0).abs() < 1e-15);
        let corner = sq.frame(&Vector2::new(1.0, 1.0)).unwrap();
        assert!(corner.curvature.is_none());
    }

    #[test]
    fn rejects_clockwise_and_exterior_origin() {
        let cw = vec![
            Vector2::new(0.0, 1.0),
            Vector2::new(1.0, 0.0),
            Vector2::new(-1.0, -1.0),
        ];
        assert!(Polygon::new(cw).is_err());
        let off = vec![
            Vector2::new(1.0, 1.0),
            Vector2::new(2.0, 1.0),
            Vector2::new(1.5, 2.0),
        ];
        assert!(Polygon::new(off).is_err());
    }

    #[test]
    fn bisection_locator_matches_scan() {
        let big = Polygon::regular(200, 1.0, 0.1).unwrap();
        let small_scan = |x: &Vector2, v: &Vector2| {
            (0..big.len())
                .filter_map(|j| big.exit_on(j, x, v))
                .fold(f64::INFINITY, f64::min)
        };
        let x = Vector2::new(0.3, -0.2);
        for k in 0..50 {
            let v = dir2(0.37 * k as f64);
            let a = big.exit_param(&x, &v).unwrap();
            let b = small_scan(&x, &v);
            assert!((a - b).abs() <= 1e-14 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn edge_length_matches_direct_distance() {
        let hex = Polygon::regular(6, 1.0, 0.0).unwrap();
        let r: f64 = 1.3;
        let lam = r.tanh();
        let direct = crate::metric::hilbert_distance(
            &hex,
            &(hex.vertices()[0] * lam),
            &(hex.vertices()[1] * lam),
        )
        .unwrap();
        let edge = hex.scaled_edge_length(0, 1.0 - lam);
        assert!((direct - edge).abs() < 1e-12, "{direct} vs {edge}");
    }
}
