//! Busemann density `σ(x) = ω_n / 𝓛(Bₓ)`, the Jacobian of the sphere
//! parametrization and numerical checks of the density estimates.
//!
//! The tangent unit ball `Bₓ = {v : ‖v‖ₓ ≤ 1}` is measured exactly for planar
//! polygons (it is a polygon itself) and by quadrature of `(1/n)∫ ‖u‖ₓ^{-n} du`
//! over the unit sphere otherwise. Near the boundary `Bₓ` is extremely
//! elongated, so the quadrature first fits an ellipse to the gauge and works
//! in the frame where that ellipse is round.

use crate::error::{domain, numerical, unsupported, Result};
use crate::geometry::{
    boundary_distance, dir2, from2, to2, BoundaryPoint, ConvexBody, Polygon, Vector, Vector2,
};
use crate::metric::sphere_point;
use crate::numerics::{unit_ball_volume, GaussLegendre};
use nalgebra::{DMatrix, DVector, Matrix2, SMatrix};
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::OnceLock;

pub use crate::geometry::{pseudo_gauss_2d, PseudoGauss};

/// Closest approach to the boundary at which densities are evaluated directly.
pub const MIN_DEPTH: f64 = 1e-7;

/// How `𝓛(Bₓ)` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMethod {
    ExactPolygon,
    Quadrature,
}

/// Settings of the tangent-ball quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentQuadrature {
    /// First trapezoid level in the plane.
    pub min_nodes: usize,
    /// Node cap in the plane; spatial grids stop at 54 × 108 nodes.
    pub max_nodes: usize,
    pub rel_tol: f64,
    /// Fit and remove the quadratic part of the gauge before integrating.
    pub precondition: bool,
    /// Use the shoelace formula for polygons.
    pub exact_polygons: bool,
}

impl Default for TangentQuadrature {
    fn default() -> Self {
        Self {
            min_nodes: 16,
            max_nodes: 2048,
            rel_tol: 1e-11,
            precondition: true,
            exact_polygons: true,
        }
    }
}

/// Lebesgue volume of `Bₓ` with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentBall {
    pub volume: f64,
    pub method: DensityMethod,
    pub nodes: usize,
    /// Difference between the last two refinement levels (0 when exact).
    pub error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEval {
    pub point: Vec<f64>,
    pub density: f64,
    pub tangent_volume: f64,
    pub method: DensityMethod,
    pub nodes: usize,
    pub error_estimate: f64,
}

fn gauge<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    x: &Vector<N>,
    v: &Vector<N>,
) -> Result<f64> {
    let t1 = body.exit_param(x, v)?;
    let t2 = body.exit_param(x, &(-v))?;
    let g = 0.5 * (1.0 / t1 + 1.0 / t2);
    if g > 0.0 && g.is_finite() {
        Ok(g)
    } else {
        Err(numerical(format!(
            "degenerate Finsler norm {g} at {:?}",
            x.as_slice()
        )))
    }
}

/// `𝓛(Bₓ)` with the default settings.
pub fn tangent_ball_volume<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    x: &Vector<N>,
) -> Result<f64> {
    Ok(tangent_ball(body, x, &TangentQuadrature::default())?.volume)
}

/// `𝓛(Bₓ)` with explicit quadrature settings.
pub fn tangent_ball<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    x: &Vector<N>,
    cfg: &TangentQuadrature,
) -> Result<TangentBall> {
    if !x.iter().all(|c| c.is_finite()) || !body.contains(x) {
        return Err(domain(format!("point {:?} is not interior", x.as_slice())));
    }
    match N {
        2 => {
            let x2 = to2(x);
            if cfg.exact_polygons {
                if let Some(poly) = body.as_polygon() {
                    return Ok(TangentBall {
                        volume: poly.tangent_ball_area(&x2)?,
                        method: DensityMethod::ExactPolygon,
                        nodes: 2 * poly.len(),
                        error_estimate: 0.0,
                    });
                }
            }
            planar_quadrature(body, x, cfg)
        }
        3 => spatial_quadrature(body, x, cfg),
        _ => Err(unsupported("tangent balls are implemented in dimensions 2 and 3")),
    }
}

/// Busemann density `ω_n / 𝓛(Bₓ)`.
pub fn busemann_density<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    x: &Vector<N>,
) -> Result<DensityEval> {
    busemann_density_with(body, x, &TangentQuadrature::default())
}

pub fn busemann_density_with<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    x: &Vector<N>,
    cfg: &TangentQuadrature,
) -> Result<DensityEval> {
    let tb = tangent_ball(body, x, cfg)?;
    Ok(DensityEval {
        point: x.iter().copied().collect(),
        density: unit_ball_volume(N) / tb.volume,
        tangent_volume: tb.volume,
        method: tb.method,
        nodes: tb.nodes,
        error_estimate: tb.error_estimate,
    })
}

/// Plain density value.
pub fn density<const N: usize, B: ConvexBody<N> + ?Sized>(body: &B, x: &Vector<N>) -> Result<f64> {
    Ok(busemann_density(body, x)?.density)
}

// ---- planar quadrature ----

/// `P^{-1/2}` for a symmetric positive definite 2×2 matrix.
fn inv_sqrt_2x2(p: &Matrix2<f64>) -> Option<Matrix2<f64>> {
    let det = p.determinant();
    let tr = p.trace();
    if !(det > 0.0 && tr > 0.0) {
        return None;
    }
    let s = det.sqrt();
    let root = (p + Matrix2::identity() * s) / (tr + 2.0 * s).sqrt();
    root.try_inverse()
}

/// Frame `M` in which the gauge `w ↦ g(Mw)` is close to the Euclidean norm.
fn planar_frame(g: &impl Fn(&Vector2) -> Result<f64>) -> Result<Matrix2<f64>> {
    let mut m = Matrix2::identity();
    let dirs: Vec<Vector2> = (0..6).map(|k| dir2(k as f64 * PI / 6.0)).collect();
    for _ in 0..6 {
        // Samples of g² at 6 equispaced angles on [0, π) determine the
        // quadratic form exactly in the least-squares sense (Fourier modes 0, 2).
        let mut mean = 0.0;
        let mut c2 = 0.0;
        let mut s2 = 0.0;
        for (k, d) in dirs.iter().enumerate() {
            let y = g(&(m * d))?.powi(2);
            let a = k as f64 * PI / 3.0;
            mean += y / 6.0;
            c2 += y * a.cos() / 3.0;
            s2 += y * a.sin() / 3.0;
        }
        let p = Matrix2::new(mean + c2, s2, s2, mean - c2);
        if (p - Matrix2::identity()).abs().max() < 1e-3 {
            break;
        }
        match inv_sqrt_2x2(&p) {
            Some(q) => m *= q,
            None => break,
        }
    }
    Ok(m)
}

/// Directions from `x` (as angles modulo π in the frame `M`) where the gauge
/// has a kink: the chord through `x` meets a non-smooth boundary point.
fn kink_angles<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    x: &Vector2,
    m_inv: &Matrix2<f64>,
) -> Result<Vec<f64>> {
    let origin = Vector::<N>::zeros();
    let mut out = Vec::new();
    for u in body.breakpoints() {
        let d = dir2(u);
        let t = body.exit_param(&origin, &from2(&d))?;
        if !t.is_finite() {
            continue;
        }
        let w = m_inv * (d * t - x);
        out.push(w[1].atan2(w[0]).rem_euclid(PI));
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    if out.len() >= 2 && out[0] + PI - out[out.len() - 1] < 1e-14 {
        out.pop();
    }
    Ok(out)
}

fn planar_quadrature<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    x: &Vector<N>,
    cfg: &TangentQuadrature,
) -> Result<TangentBall> {
    let g = |w: &Vector2| gauge(body, x, &from2(w));
    let m = if cfg.precondition {
        planar_frame(&g)?
    } else {
        Matrix2::identity()
    };
    let det = m.determinant().abs();
    let m_inv = m
        .try_inverse()
        .ok_or_else(|| numerical("singular tangent-ball frame"))?;
    let f = |psi: f64| -> Result<f64> {
        let v = g(&(m * dir2(psi)))?;
        Ok(1.0 / (v * v))
    };
    let kinks = kink_angles(body, &to2(x), &m_inv)?;
    let (integral, nodes, err) = if kinks.is_empty() {
        periodic_trapezoid(&f, cfg)?
    } else {
        composite_gauss(&f, &kinks, cfg)?
    };
    Ok(TangentBall {
        volume: det * integral,
        method: DensityMethod::Quadrature,
        nodes,
        error_estimate: det * err,
    })
}

/// `∫₀^π f` for π-periodic `f` by trapezoid levels doubling from `min_nodes`.
fn periodic_trapezoid(
    f: &impl Fn(f64) -> Result<f64>,
    cfg: &TangentQuadrature,
) -> Result<(f64, usize, f64)> {
    let mut n = cfg.min_nodes.max(2);
    let mut sum = 0.0;
    for k in 0..n {
        sum += f(PI * k as f64 / n as f64)?;
    }
    let mut est = PI * sum / n as f64;
    let mut err = est.abs();
    while 2 * n <= cfg.max_nodes {
        let h = PI / (2 * n) as f64;
        for k in 0..n {
            sum += f(h * (2 * k + 1) as f64)?;
        }
        n *= 2;
        let next = PI * sum / n as f64;
        err = (next - est).abs();
        est = next;
        if err <= cfg.rel_tol * est.abs() {
            break;
        }
    }
    Ok((est, n, err))
}

/// Composite 8-point Gauss–Legendre on the periodic panels between `kinks`,
/// every panel split into `2^j` parts until the total settles.
fn composite_gauss(
    f: &impl Fn(f64) -> Result<f64>,
    kinks: &[f64],
    cfg: &TangentQuadrature,
) -> Result<(f64, usize, f64)> {
    let rule = GaussLegendre::order8();
    let k = kinks.len();
    let eval = |parts: usize| -> Result<f64> {
        let mut total = 0.0;
        for i in 0..k {
            let a = kinks[i];
            let b = if i + 1 < k { kinks[i + 1] } else { kinks[0] + PI };
            let w = (b - a) / parts as f64;
            for s in 0..parts {
                let lo = a + w * s as f64;
                for (t, wt) in rule.on_interval(lo, lo + w) {
                    total += wt * f(t)?;
                }
            }
        }
        Ok(total)
    };
    let mut parts = 1;
    let mut est = eval(parts)?;
    let mut err = est.abs();
    let cap = (cfg.max_nodes / (8 * k)).max(4);
    while 2 * parts <= cap {
        parts *= 2;
        let next = eval(parts)?;
        err = (next - est).abs();
        est = next;
        if err <= cfg.rel_tol * est.abs() {
            break;
        }
    }
    Ok((est, 8 * k * parts, err))
}

// ---- spatial quadrature ----

fn gl_rules() -> &'static [GaussLegendre; 4] {
    static RULES: OnceLock<[GaussLegendre; 4]> = OnceLock::new();
    RULES.get_or_init(|| {
        [
            GaussLegendre::new(6),
            GaussLegendre::new(12),
            GaussLegendre::new(24),
            GaussLegendre::new(54),
        ]
    })
}

/// Fit directions for a quadratic form in `N` variables: axes, face and body diagonals.
fn fit_directions<const N: usize>() -> Vec<Vector<N>> {
    let mut dirs = Vec::new();
    for i in 0..N {
        let mut v = Vector::<N>::zeros();
        v[i] = 1.0;
        dirs.push(v);
    }
    for i in 0..N {
        for j in i + 1..N {
            for s in [1.0, -1.0] {
                let mut v = Vector::<N>::zeros();
                v[i] = 1.0;
                v[j] = s;
                dirs.push(v.normalize());
            }
        }
    }
    for signs in 0..(1usize << (N - 1)) {
        let mut v = Vector::<N>::from_element(1.0);
        for i in 0..N - 1 {
            if signs >> i & 1 == 1 {
                v[i] = -1.0;
            }
        }
        dirs.push(v.normalize());
    }
    dirs
}

/// General-dimension version of [`planar_frame`] by least squares.
fn spatial_frame<const N: usize>(
    g: &impl Fn(&Vector<N>) -> Result<f64>,
) -> Result<SMatrix<f64, N, N>> {
    let dirs = fit_directions::<N>();
    let pairs: Vec<(usize, usize)> = (0..N).flat_map(|i| (i..N).map(move |j| (i, j))).collect();
    let design = DMatrix::from_fn(dirs.len(), pairs.len(), |r, c| {
        let (i, j) = pairs[c];
        let f = if i == j { 1.0 } else { 2.0 };
        f * dirs[r][i] * dirs[r][j]
    });
    let svd = design.svd(true, true);
    let mut m = SMatrix::<f64, N, N>::identity();
    for _ in 0..6 {
        let y = DVector::from_iterator(
            dirs.len(),
            dirs.iter()
                .map(|d| g(&(m * d)).map(|v| v * v))
                .collect::<Result<Vec<_>>>()?,
        );
        let coef = svd
            .solve(&y, 1e-12)
            .map_err(|e| numerical(format!("gauge fit: {e}")))?;
        let mut p = SMatrix::<f64, N, N>::zeros();
        for (c, &(i, j)) in pairs.iter().enumerate() {
            p[(i, j)] = coef[c];
            p[(j, i)] = coef[c];
        }
        if (p - SMatrix::<f64, N, N>::identity()).abs().max() < 1e-3 {
            break;
        }
        let eig = nalgebra::SymmetricEigen::new(DMatrix::from_column_slice(N, N, p.as_slice()));
        if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
            break;
        }
        let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
        let q = &eig.eigenvectors * d * eig.eigenvectors.transpose();
        m *= SMatrix::<f64, N, N>::from_column_slice(q.as_slice());
    }
    Ok(m)
}

fn spatial_quadrature<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    x: &Vector<N>,
    cfg: &TangentQuadrature,
) -> Result<TangentBall> {
    let g = |w: &Vector<N>| gauge(body, x, w);
    let m = if cfg.precondition {
        spatial_frame(&g)?
    } else {
        SMatrix::<f64, N, N>::identity()
    };
    let det = crate::geometry::det(&m).abs();
    let level = |rule: &GaussLegendre| -> Result<f64> {
        let nz = rule.len();
        let nphi = 2 * nz;
        let mut total = 0.0;
        for (&z, &wz) in rule.nodes.iter().zip(&rule.weights) {
            let rho = (1.0 - z * z).sqrt();
            let mut ring = 0.0;
            for j in 0..nphi {
                let (s, c) = (2.0 * PI * j as f64 / nphi as f64).sin_cos();
                let mut w = Vector::<N>::zeros();
                w[0] = rho * c;
                w[1] = rho * s;
                w[2] = z;
                ring += g(&(m * w))?.powi(-3);
            }
            total += wz * ring * 2.0 * PI / nphi as f64;
        }
        Ok(total / 3.0)
    };
    let rules = gl_rules();
    let mut est = level(&rules[0])?;
    let mut err = est.abs();
    let mut nodes = 2 * rules[0].len().pow(2);
    for rule in &rules[1..] {
        let next = level(rule)?;
        err = (next - est).abs();
        est = next;
        nodes = 2 * rule.len().pow(2);
        if err <= cfg.rel_tol * est.abs() {
            break;
        }
    }
    Ok(TangentBall {
        volume: det * est,
        method: DensityMethod::Quadrature,
        nodes,
        error_estimate: det * err,
    })
}

// ---- Jacobian of the sphere parametrization ----

/// `Jac φ(p, r) = (e^{2r}−1)^{n−1} e^{2r} / (a e^{2r}+1)^{n+1} · 2aⁿ(1+a)⟨p,n⟩`,
/// evaluated as `2aⁿ(1+a)⟨p,n⟩ · q(1−q)^{n−1}/(a+q)^{n+1}` with `q = e^{−2r}`.
pub fn jacobian_from_frame<const N: usize>(frame: &BoundaryPoint<N>, r: f64) -> f64 {
    let a = frame.antipodal;
    let q = (-2.0 * r).exp();
    let one_minus_q = -(-2.0 * r).exp_m1();
    let n = N as i32;
    2.0 * a.powi(n) * (1.0 + a) * frame.support * q * one_minus_q.powi(n - 1)
        / (a + q).powi(n + 1)
}

/// Jacobian of `(p, r) ↦ φ(p, r)` with respect to `dH^{n−1}(p) dr`.
pub fn jacobian_phi<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    direction: &Vector<N>,
    r: f64,
) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(domain("radius must be positive"));
    }
    let frame = body.frame(direction)?;
    frame.smooth_curvature()?;
    Ok(jacobian_from_frame(&frame, r))
}

/// `lim_{r→∞} e^{2r} Jac φ(p, r) = 2(1+a)⟨p,n⟩/a`.
pub fn jacobian_limit<const N: usize>(frame: &BoundaryPoint<N>) -> f64 {
    2.0 * (1.0 + frame.antipodal) * frame.support / frame.antipodal
}

/// Planar Jacobian by central differences of `(u, r) ↦ φ(p(u), r)`, divided
/// by the arc-length speed `|dp/du|`. Independent of the closed form.
pub fn jacobian_phi_fd<B: ConvexBody<2> + ?Sized>(body: &B, u: f64, r: f64, h: f64) -> Result<f64> {
    let frame = |t: f64| body.frame(&dir2(t));
    let (fp, fm, f0) = (frame(u + h)?, frame(u - h)?, frame(u)?);
    let d_u = (sphere_point(&fp, r) - sphere_point(&fm, r)) / (2.0 * h);
    let d_r = (sphere_point(&f0, r + h) - sphere_point(&f0, r - h)) / (2.0 * h);
    let speed = ((fp.position - fm.position) / (2.0 * h)).norm();
    Ok((d_u[0] * d_r[1] - d_u[1] * d_r[0]).abs() / speed)
}

// ---- verification reports ----

/// One entry of a verification sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub lambda: f64,
    pub value: f64,
    /// What `value` is compared with at this entry (target or bound).
    pub reference: f64,
}

/// Outcome of a density check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    /// Closed-form limit, or the λ-independent constant of a bound.
    pub target: f64,
    pub sequence: Vec<Sample>,
    /// Limit checks: relative error of the last entry (for a zero target,
    /// the last entry divided by the first). Bound checks: the largest
    /// relative excess `value/reference − 1`, floored at zero.
    pub max_violation: f64,
}

fn check_lambdas(lambdas: &[f64], lo: f64) -> Result<()> {
    if lambdas.is_empty() {
        return Err(domain("empty λ grid"));
    }
    for &l in lambdas {
        if !(l >= lo && 1.0 - l >= MIN_DEPTH) {
            return Err(domain(format!(
                "λ = {l} outside [{lo}, 1 − {MIN_DEPTH}]"
            )));
        }
    }
    Ok(())
}

/// Tracks `σ(λp)(1−λ)^{(n+1)/2}` against `√k/(2⟨p,n⟩)^{(n+1)/2}`.
pub fn verify_pointwise_limit<const N: usize, B: ConvexBody<N> + ?Sized>(
    body: &B,
    direction: &Vector<N>,
    lambdas: &[f64],
) -> Result<Report> {
    check_lambdas(lambdas, 0.0)?;
    let frame = body.frame(direction)?;
    let k = frame.smooth_curvature()?;
    let expo = (N as f64 + 1.0) / 2.0;
    let target = k.sqrt() / (2.0 * frame.support).powf(expo);
    let sequence = lambdas
        .iter()
        .map(|&l| {
            let s = density(body, &(frame.position * l))?;
            Ok(Sample {
                lambda: l,
                value: s * (1.0 - l).powf(expo),
                reference: target,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let last = sequence.last().expect("nonempty").value;
    let max_violation = if target > 0.0 {
        (last - target).abs() / target
    } else {
        last / sequence[0].value
    };
    Ok(Report {
        target,
        sequence,
        max_violation,
    })
}

/// Density quotient `σ_A(λp)/σ_B(λp)` of two bodies sharing a neighbourhood of `p`.
pub fn verify_truncation<const N: usize, A, B>(
    body_a: &A,
    body_b: &B,
    p: &Vector<N>,
    lambdas: &[f64],
) -> Result<Report>
where
    A: ConvexBody<N> + ?Sized,
    B: ConvexBody<N> + ?Sized,
{
    check_lambdas(lambdas, 0.0)?;
    let sequence = lambdas
        .iter()
        .map(|&l| {
            let x = p * l;
            Ok(Sample {
                lambda: l,
                value: density(body_a, &x)? / density(body_b, &x)?,
                reference: 1.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_violation = (sequence.last().expect("nonempty").value - 1.0).abs();
    Ok(Report {
        target: 1.0,
        sequence,
        max_violation,
    })
}

fn bound_report(target: f64, sequence: Vec<Sample>) -> Report {
    let max_violation = sequence
        .iter()
        .map(|s| s.value / s.reference - 1.0)
        .fold(0.0, f64::max);
    Report {
        target,
        sequence,
        max_violation,
    }
}

/// Planar bound `σ(λp) ≤ (π/2)(1−λ)^{−3/2} k̄(p)^{1/2}` for a body containing
/// the unit disc, `λ ∈ [½, 1)`.
pub fn verify_density_upper_bound<B: ConvexBody<2> + ?Sized>(
    body: &B,
    u: f64,
    lambdas: &[f64],
) -> Result<Report> {
    check_lambdas(lambdas, 0.5)?;
    if boundary_distance(body, &Vector2::zeros())? < 1.0 - 1e-9 {
        return Err(domain("the body must contain the unit disc"));
    }
    let kbar = pseudo_gauss_2d(body, u)?.value;
    let constant = unit_ball_volume(2) * 2.0 / 4.0 * kbar.sqrt();
    let p = body.frame(&dir2(u))?.position;
    let sequence = lambdas
        .iter()
        .map(|&l| {
            Ok(Sample {
                lambda: l,
                value: density(body, &(p * l))?,
                reference: constant * (1.0 - l).powf(-1.5),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(bound_report(constant, sequence))
}

/// Triangle `oab` with the marked point `o` at a vertex, for the triangle
/// density bound. Densities are computed in the translate whose origin is
/// the centroid, which leaves the Hilbert geometry unchanged.
#[derive(Debug, Clone)]
pub struct TriangleSetup {
    pub o: Vector2,
    pub a: Vector2,
    pub b: Vector2,
    polygon: Polygon,
    centroid: Vector2,
}

impl TriangleSetup {
    /// Checks `1 ≤ |oa|, |ob| ≤ 2` and `dist(o, ab) ≥ 1`.
    pub fn new(o: Vector2, a: Vector2, b: Vector2) -> Result<Self> {
        let (la, lb) = ((a - o).norm(), (b - o).norm());
        let ab = b - a;
        let dist = ((o - a)[0] * ab[1] - (o - a)[1] * ab[0]).abs() / ab.norm();
        if !(1.0..=2.0).contains(&la) || !(1.0..=2.0).contains(&lb) || dist < 1.0 {
            return Err(domain(format!(
                "triangle hypotheses fail: |oa| = {la}, |ob| = {lb}, dist = {dist}"
            )));
        }
        let centroid = (o + a + b) / 3.0;
        let mut verts = vec![o - centroid, a - centroid, b - centroid];
        if crate::geometry::cross2(&(verts[1] - verts[0]), &(verts[2] - verts[0])) < 0.0 {
            verts.swap(1, 2);
        }
        Ok(Self {
            o,
            a,
            b,
            polygon: Polygon::new(verts)?,
            centroid,
        })
    }

    /// `o = (0,0)`, `a = (1.5, −1)`, `b = (1.5, 1)`.
    pub fn canonical() -> Self {
        Self::new(Vector2::zeros(), Vector2::new(1.5, -1.0), Vector2::new(1.5, 1.0))
            .expect("canonical triangle is valid")
    }

    /// The translated triangle whose origin is the centroid.
    pub fn polygon(&self) -> &Polygon {
        &self.polygon
    }

    /// `λp` in the translated coordinates, `p = a + t(b − a)`.
    pub fn point(&self, t: f64, lambda: f64) -> Vector2 {
        let p = self.a + (self.b - self.a) * t;
        self.o + (p - self.o) * lambda - self.centroid
    }

    /// `σ(λp) ≤ 32π·max{1/(ε(1−λ)), 1/ε²}` with `ε = min(|ap|, |bp|)`.
    pub fn verify_bound(&self, t: f64, lambdas: &[f64]) -> Result<Report> {
        if !(t > 0.0 && t < 1.0) {
            return Err(domain("p must lie inside the side ab"));
        }
        check_lambdas(lambdas, 0.5)?;
        let eps = (self.b - self.a).norm() * t.min(1.0 - t);
        let sequence = lambdas
            .iter()
            .map(|&l| {
                Ok(Sample {
                    lambda: l,
                    value: density(&self.polygon, &self.point(t, l))?,
                    reference: 32.0 * PI * (1.0 / (eps * (1.0 - l))).max(1.0 / (eps * eps)),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(bound_report(32.0 * PI, sequence))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Ellipsoid, Paraboloid};

    #[test]
    fn disc_density_is_klein() {
        let d = Ellipsoid::<2>::ball(1.0).unwrap();
        for l in [0.0, 0.5, 0.99, 1.0 - 1e-6] {
            let s = density(&d, &Vector2::new(l, 0.0)).unwrap();
            let want = (1.0 - l * l).powf(-1.5);
            assert!((s / want - 1.0).abs() < 1e-10, "{l}: {s} vs {want}");
        }
    }

    #[test]
    fn square_ball_at_origin_is_the_square() {
        let sq = Polygon::square(1.0).unwrap();
        assert!((tangent_ball_volume(&sq, &Vector2::zeros()).unwrap() - 4.0).abs() < 1e-14);
        let cfg = TangentQuadrature {
            exact_polygons: false,
            ..Default::default()
        };
        let q = tangent_ball(&sq, &Vector2::new(0.3, -0.2), &cfg).unwrap();
        let e = tangent_ball_volume(&sq, &Vector2::new(0.3, -0.2)).unwrap();
        assert!((q.volume / e - 1.0).abs() < 1e-10, "{} {e}", q.volume);
    }

    #[test]
    fn parabola_density() {
        let p = Paraboloid::<2>::planar(2.0).unwrap();
        let l = 0.9;
        let s = density(&p, &Vector2::new(0.0, 1.0 - l)).unwrap();
        let want = 2f64.sqrt() / (2.0 * (1.0 - l)).powf(1.5);
        assert!((s / want - 1.0).abs() < 1e-9, "{s} {want}");
    }

    #[test]
    fn ball_density_in_space() {
        let b = Ellipsoid::<3>::ball(1.0).unwrap();
        let x = nalgebra::Vector3::new(0.3, 0.2, -0.5);
        let s = density(&b, &x).unwrap();
        let want = (1.0 - x.norm_squared()).powi(-2);
        assert!((s / want - 1.0).abs() < 1e-9, "{s} {want}");
    }

    #[test]
    fn disc_jacobian() {
        let d = Ellipsoid::<2>::ball(1.0).unwrap();
        let r = 1.3;
        let j = jacobian_phi(&d, &Vector2::new(1.0, 0.0), r).unwrap();
        assert!((j - r.sinh() / r.cosh().powi(3)).abs() < 1e-14);
        let fd = jacobian_phi_fd(&d, 0.4, r, 1e-5).unwrap();
        assert!((fd / j - 1.0).abs() < 1e-8);
    }

    #[test]
    fn triangle_hexagon() {
        let tri = TriangleSetup::canonical();
        let x = tri.point(0.3, 0.8);
        assert_eq!(tri.polygon().tangent_ball_polygon(&x).unwrap().len(), 6);
        let rep = tri.verify_bound(0.3, &[0.5, 0.9, 0.999]).unwrap();
        assert_eq!(rep.max_violation, 0.0);
    }
}
