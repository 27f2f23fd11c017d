use super::{cross2, BodyKind, BoundaryPoint, ConvexBody, Vector2};
use crate::error::{invalid, numerical, Result};
use std::f64::consts::PI;

/// Parallel body `P ⊕ ρB` of a convex polygonal core (a segment is allowed).
///
/// The boundary alternates between translated core edges and circular arcs
/// of radius `ρ` around the core vertices, so it is `C^{1,1}` with curvature
/// jumping between `0` and `1/ρ`.
#[derive(Debug, Clone)]
pub struct RoundedPolygon {
    core: Vec<Vector2>,
    normals: Vec<Vector2>,
    offsets: Vec<f64>,
    radius: f64,
    symmetric: bool,
}

impl RoundedPolygon {
    /// `core` is a counterclockwise convex polygon or a two-point segment.
    pub fn new(core: Vec<Vector2>, radius: f64) -> Result<Self> {
        let m = core.len();
        if m < 2 {
            return Err(invalid("rounded polygon core needs at least two points"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid("rounding radius must be positive"));
        }
        let mut normals = Vec::with_capacity(m);
        let mut offsets = Vec::with_capacity(m);
        for j in 0..m {
            let e = core[(j + 1) % m] - core[j];
            if e.norm() == 0.0 {
                return Err(invalid("repeated core vertex"));
            }
            if m > 2 {
                let e1 = core[(j + 2) % m] - core[(j + 1) % m];
                if cross2(&e, &e1) <= 0.0 {
                    return Err(invalid("core vertices must be counterclockwise and convex"));
                }
            }
            let n = Vector2::new(e[1], -e[0]) / e.norm();
            offsets.push(n.dot(&core[j]));
            normals.push(n);
        }
        let symmetric = m % 2 == 0
            && (0..m / 2).all(|j| (core[j] + core[j + m / 2]).norm() <= 1e-12);
        let body = Self {
            core,
            normals,
            offsets,
            radius,
            symmetric,
        };
        if body.core_distance(&Vector2::zeros()) >= radius {
            return Err(invalid("origin is not interior to the rounded polygon"));
        }
        Ok(body)
    }

    /// Stadium: segment `[-L, L] × {0}` thickened by `radius`.
    pub fn stadium(half_length: f64, radius: f64) -> Result<Self> {
        if !(half_length > 0.0) {
            return Err(invalid("stadium half-length must be positive"));
        }
        Self::new(
            vec![Vector2::new(-half_length, 0.0), Vector2::new(half_length, 0.0)],
            radius,
        )
    }

    /// Regular `m`-gon inscribed in the unit circle with corners replaced by
    /// arcs of radius `corner`: `(1 - corner)·P_m ⊕ corner·B`.
    pub fn rounded_regular(m: usize, corner: f64) -> Result<Self> {
        if m < 3 {
            return Err(invalid("need at least 3 sides"));
        }
        if !(corner > 0.0 && corner < 1.0) {
            return Err(invalid("corner radius must lie in (0, 1)"));
        }
        let core = (0..m)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / m as f64;
                Vector2::new(a.cos(), a.sin()) * (1.0 - corner)
            })
            .collect();
        Self::new(core, corner)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn core(&self) -> &[Vector2] {
        &self.core
    }

    fn inside_core(&self, x: &Vector2) -> bool {
        self.core.len() > 2
            && self
                .normals
                .iter()
                .zip(&self.offsets)
                .all(|(n, h)| n.dot(x) <= *h)
    }

    fn core_distance(&self, x: &Vector2) -> f64 {
        if self.inside_core(x) {
            return 0.0;
        }
        let m = self.core.len();
        (0..m)
            .map(|j| segment_distance(x, &self.core[j], &self.core[(j + 1) % m]))
            .fold(f64::INFINITY, f64::min)
    }

    fn core_edges(&self) -> usize {
        if self.core.len() == 2 {
            2
        } else {
            self.core.len()
        }
    }

    /// Is unit vector `u` inside the normal cone at core vertex `k`?
    fn in_cone(&self, k: usize, u: &Vector2, tol: f64) -> bool {
        let m = self.core_edges();
        let before = self.normals[(k + m - 1) % m];
        let after = self.normals[k];
        cross2(&before, u) >= -tol && cross2(u, &after) >= -tol
    }

    /// Exit parameter and the boundary piece it lies on.
    fn exit_piece(&self, x: &Vector2, v: &Vector2) -> Result<(f64, Piece)> {
        let m = self.core_edges();
        let tol = 1e-12;
        let mut best: Option<(f64, Piece)> = None;
        let mut consider = |t: f64, piece: Piece| {
            if t > 0.0 && best.map_or(true, |(bt, _)| t > bt) {
                best = Some((t, piece));
            }
        };
        for j in 0..m {
            let n = self.normals[j];
            let dn = n.dot(v);
            if dn <= 0.0 {
                continue;
            }
            let t = (self.offsets[j] + self.radius - n.dot(x)) / dn;
            let y = x + v * t - n * self.radius;
            let a = self.core[j];
            let b = self.core[(j + 1) % self.core.len()];
            let e = b - a;
            let mu = (y - a).dot(&e) / e.norm_squared();
            if (-tol..=1.0 + tol).contains(&mu) {
                consider(t, Piece::Edge(j));
            }
        }
        for k in 0..self.core.len() {
            let w = x - self.core[k];
            let a = v.norm_squared();
            let b = 2.0 * w.dot(v);
            let c = w.norm_squared() - self.radius * self.radius;
            let disc = b * b - 4.0 * a * c;
            if disc < 0.0 {
                continue;
            }
            let sq = disc.sqrt();
            let t = if b >= 0.0 {
                -2.0 * c / (b + sq)
            } else {
                (sq - b) / (2.0 * a)
            };
            let u = (x + v * t - self.core[k]) / self.radius;
            if self.in_cone(k, &u, tol) {
                consider(t, Piece::Arc(k));
            }
        }
        best.ok_or_else(|| numerical("ray from an interior point found no boundary piece"))
    }
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Edge(usize),
    Arc(usize),
}

fn segment_distance(x: &Vector2, a: &Vector2, b: &Vector2) -> f64 {
    let e = b - a;
    let mu = ((x - a).dot(&e) / e.norm_squared()).clamp(0.0, 1.0);
    (x - (a + e * mu)).norm()
}

impl ConvexBody<2> for RoundedPolygon {
    fn kind(&self) -> BodyKind {
        BodyKind::RoundedPolygon
    }

    fn contains(&self, x: &Vector2) -> bool {
        self.core_distance(x) < self.radius
    }

    fn exit_param(&self, x: &Vector2, v: &Vector2) -> Result<f64> {
        Ok(self.exit_piece(x, v)?.0)
    }

    fn frame(&self, direction: &Vector2) -> Result<BoundaryPoint<2>> {
        let origin = Vector2::zeros();
        let e = direction / direction.norm();
        let (t, piece) = self.exit_piece(&origin, &e)?;
        let p = e * t;
        let (normal, k) = match piece {
            Piece::Edge(j) => (self.normals[j], 0.0),
            Piece::Arc(k) => ((p - self.core[k]) / self.radius, 1.0 / self.radius),
        };
        let back = self.exit_piece(&origin, &(-e))?.0;
        Ok(BoundaryPoint {
            direction: e,
            position: p,
            normal,
            curvature: Some(k),
            antipodal: back / t,
            support: p.dot(&normal),
        })
    }

    fn support(&self, w: &Vector2) -> f64 {
        self.core
            .iter()
            .map(|v| v.dot(w))
            .fold(f64::NEG_INFINITY, f64::max)
            + self.radius * w.norm()
    }

    fn breakpoints(&self) -> Vec<f64> {
        let m = self.core_edges();
        let mut out = Vec::with_capacity(2 * m);
        for k in 0..self.core.len() {
            for n in [self.normals[(k + m - 1) % m], self.normals[k]] {
                let q = self.core[k] + n * self.radius;
                out.push(super::wrap_angle(q[1].atan2(q[0])));
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        out
    }

    fn boundary_distance_exact(&self, x: &Vector2) -> Option<f64> {
        if self.inside_core(x) {
            let inner = self
                .normals
                .iter()
                .zip(&self.offsets)
                .map(|(n, h)| h - n.dot(x))
                .fold(f64::INFINITY, f64::min);
            Some(self.radius + inner)
        } else {
            Some(self.radius - self.core_distance(x))
        }
    }

    fn is_centrally_symmetric(&self) -> bool {
        self.symmetric
    }
}
