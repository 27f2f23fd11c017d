//! Named verification suites behind `he check <suite>`.

use hilbert_core::areas::projective_invariance_check;
use hilbert_core::busemann::{
    density, jacobian_from_frame, jacobian_limit, jacobian_phi_fd, verify_density_upper_bound,
    verify_pointwise_limit, verify_truncation, TriangleSetup,
};
use hilbert_core::geometry::{
    boundary_frame, dir2, ConvexBody, Ellipsoid, HalfSpace, Intersection, Paraboloid, Polygon,
    ProjectiveMap, RoundedPolygon, Vector2,
};
use hilbert_core::growth::{coarea_check, growth_series, RollingGrid};
use hilbert_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

pub const SUITES: [&str; 8] = [
    "parabola",
    "pointwise-limit",
    "jacobian",
    "truncation",
    "density-bound",
    "coarea",
    "invariance",
    "schuett-werner",
];

#[derive(Debug, Clone, Serialize)]
pub struct Case {
    pub name: String,
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub max_violation: f64,
    pub cases: Vec<Case>,
}

fn case(name: impl Into<String>, max_violation: f64, tolerance: f64) -> Case {
    Case {
        name: name.into(),
        max_violation,
        tolerance,
        passed: max_violation <= tolerance,
    }
}

/// Runs the suite `name`; `None` for an unknown name.
pub fn run(name: &str, seed: u64) -> Option<Result<SuiteReport>> {
    let cases = match name {
        "parabola" => parabola(),
        "pointwise-limit" => pointwise_limit(),
        "jacobian" => jacobian(seed),
        "truncation" => truncation(),
        "density-bound" => density_bound(),
        "coarea" => coarea(),
        "invariance" => invariance(seed),
        "schuett-werner" => schuett_werner(seed),
        _ => return None,
    };
    Some(cases.map(|cases| SuiteReport {
        suite: name.to_string(),
        seed,
        passed: cases.iter().all(|c| c.passed),
        max_violation: cases.iter().map(|c| c.max_violation).fold(0.0, f64::max),
        cases,
    }))
}

fn ellipse() -> Ellipsoid<2> {
    Ellipsoid::ellipse(2.0, 1.0, 0.3, Vector2::zeros()).expect("valid ellipse")
}

fn parabola() -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for c in [0.5, 1.0, 2.0] {
        let body = Paraboloid::<2>::planar(c)?;
        let mut worst = 0.0f64;
        for l in [0.5, 0.9, 0.99] {
            let s = density(&body, &Vector2::new(0.0, 1.0 - l))?;
            let want = c.sqrt() / (2.0 * (1.0 - l)).powf(1.5);
            worst = worst.max((s / want - 1.0).abs());
        }
        out.push(case(format!("c = {c}"), worst, 1e-6));
    }
    Ok(out)
}

fn pointwise_limit() -> Result<Vec<Case>> {
    let lambdas = [0.9, 0.99, 0.999, 0.9999];
    let disc = Ellipsoid::<2>::ball(1.0)?;
    let shifted = disc.recentered(&Vector2::new(0.3, 0.0))?;
    let ell = ellipse();
    let mut out = Vec::new();
    for (name, body) in [
        ("disc", &disc as &dyn ConvexBody<2>),
        ("shifted disc", &shifted),
        ("ellipse", &ell),
    ] {
        let mut worst = 0.0f64;
        for k in 0..8 {
            let u = 2.0 * PI * k as f64 / 8.0 + 0.1;
            worst = worst.max(verify_pointwise_limit(body, &dir2(u), &lambdas)?.max_violation);
        }
        out.push(case(name, worst, 1e-2));
    }
    // Flat edges: the scaled density dies out.
    let sq = Polygon::square(1.0)?;
    let deep = [0.5, 0.9, 0.99, 0.999, 0.9999, 1.0 - 1e-5, 1.0 - 1e-6];
    let mut worst = 0.0f64;
    for d in [Vector2::new(1.0, 0.0), Vector2::new(0.0, 1.0)] {
        worst = worst.max(verify_pointwise_limit(&sq, &d, &deep)?.max_violation);
    }
    out.push(case("square edge midpoints (last/first)", worst, 1e-2));
    Ok(out)
}

fn jacobian(seed: u64) -> Result<Vec<Case>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bodies: Vec<(&str, Arc<dyn ConvexBody<2>>)> = vec![
        ("ellipse", Arc::new(ellipse())),
        ("shifted disc", Arc::new(Ellipsoid::<2>::ball(1.0)?.recentered(&Vector2::new(0.3, 0.0))?)),
    ];
    let mut out = Vec::new();
    for (name, body) in &bodies {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let u = rng.gen_range(0.0..2.0 * PI);
            let r = rng.gen_range(0.05..5.0);
            let exact = jacobian_from_frame(&boundary_frame(body.as_ref(), u)?, r);
            let fd = jacobian_phi_fd(body.as_ref(), u, r, 1e-5)?;
            worst = worst.max((fd / exact - 1.0).abs());
        }
        out.push(case(format!("{name}: closed form vs differences"), worst, 1e-5));
        let mut worst = 0.0f64;
        for k in 0..16 {
            let f = boundary_frame(body.as_ref(), 2.0 * PI * k as f64 / 16.0)?;
            let scaled = (20.0f64).exp() * jacobian_from_frame(&f, 10.0);
            worst = worst.max((scaled / jacobian_limit(&f) - 1.0).abs());
        }
        out.push(case(format!("{name}: e^(2r) Jac at r = 10"), worst, 1e-4));
    }
    Ok(out)
}

fn truncation() -> Result<Vec<Case>> {
    let lambdas: Vec<f64> = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6].iter().map(|d| 1.0 - d).collect();
    let disc: Arc<dyn ConvexBody<2>> = Arc::new(Ellipsoid::<2>::ball(1.0)?);
    let ell: Arc<dyn ConvexBody<2>> = Arc::new(ellipse());
    let mut out = Vec::new();
    for (name, body) in [("disc", disc), ("ellipse", ell)] {
        let cut = Intersection::new(vec![
            body.clone(),
            Arc::new(HalfSpace::new(Vector2::new(1.0, 0.0), 0.5)?),
        ])?;
        let p = boundary_frame(body.as_ref(), PI)?.position;
        let rep = verify_truncation(&cut, body.as_ref(), &p, &lambdas)?;
        out.push(case(format!("{name} cut at x = 0.5"), rep.max_violation, 1e-6));
    }
    Ok(out)
}

fn density_bound() -> Result<Vec<Case>> {
    let lambdas: Vec<f64> = (0..=24).map(|k| 1.0 - 0.5 * 10f64.powf(-0.25 * k as f64)).collect();
    let disc = Ellipsoid::<2>::ball(1.0)?;
    let ell = Ellipsoid::<2>::axis_aligned([2.0, 1.0])?;
    let mut out = Vec::new();
    for (name, body) in [("disc", &disc as &dyn ConvexBody<2>), ("ellipse", &ell)] {
        let mut worst = 0.0f64;
        for k in 0..12 {
            let u = 2.0 * PI * k as f64 / 12.0 + 0.05;
            worst = worst.max(verify_density_upper_bound(body, u, &lambdas)?.max_violation);
        }
        out.push(case(format!("{name}: pseudo-Gauss bound"), worst, 0.0));
    }
    let tri = TriangleSetup::canonical();
    let mut worst = 0.0f64;
    for t in [0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.95] {
        worst = worst.max(tri.verify_bound(t, &lambdas)?.max_violation);
    }
    out.push(case("canonical triangle: vertex-origin bound", worst, 0.0));
    Ok(out)
}

/// The co-area bracket is only asserted to be bounded and positive; the
/// reported violation is the distance of `V′/A` from `[0.1, 10]`.
fn coarea() -> Result<Vec<Case>> {
    let disc = Ellipsoid::<2>::ball(1.0)?;
    let ell = ellipse();
    let sq = Polygon::square(1.0)?;
    let mut out = Vec::new();
    for (name, body) in [
        ("disc", &disc as &dyn ConvexBody<2>),
        ("ellipse", &ell),
        ("square", &sq),
    ] {
        let rep = coarea_check(&growth_series(body, 0.5, 6.0, 12)?)?;
        let outside = (0.1 - rep.min_ratio).max(rep.max_ratio - 10.0).max(0.0);
        let violation = if rep.derivative_positive { outside } else { f64::INFINITY };
        out.push(case(
            format!("{name}: V'/A in [{:.4}, {:.4}]", rep.min_ratio, rep.max_ratio),
            violation,
            0.0,
        ));
    }
    Ok(out)
}

fn invariance(seed: u64) -> Result<Vec<Case>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bodies: Vec<(&str, Arc<dyn ConvexBody<2>>)> = vec![
        ("ellipse", Arc::new(ellipse())),
        ("shifted disc", Arc::new(Ellipsoid::<2>::ball(1.0)?.recentered(&Vector2::new(0.3, 0.0))?)),
    ];
    let mut out = Vec::new();
    for (name, body) in bodies {
        for k in 0..3 {
            let map = ProjectiveMap::<2>::random_origin_fixing(&mut rng, 0.3, 0.5);
            let rep = projective_invariance_check(body.clone(), &map, 50, seed + k)?;
            out.push(case(format!("{name}, map {k}: Hilbert distances"), rep.max_distance_rel_error, 1e-7));
            out.push(case(format!("{name}, map {k}: centro-projective area"), rep.area_rel_diff, 1e-3));
        }
    }
    Ok(out)
}

fn schuett_werner(seed: u64) -> Result<Vec<Case>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bodies: Vec<(&str, Box<dyn ConvexBody<2>>)> = vec![
        ("disc", Box::new(Ellipsoid::<2>::ball(1.0)?)),
        ("ellipse", Box::new(Ellipsoid::<2>::axis_aligned([2.0, 1.0])?)),
        ("square", Box::new(Polygon::square(1.0)?)),
        ("stadium", Box::new(RoundedPolygon::stadium(1.0, 1.0)?)),
    ];
    let mut out = Vec::new();
    for (name, body) in &bodies {
        let grid = RollingGrid::new(body.as_ref(), 1024)?;
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let arcs = random_arcs(&mut rng);
            let rep = grid.check(0.5, &arcs)?;
            worst = worst.max(rep.lhs / rep.rhs - 1.0);
        }
        out.push(case(*name, worst.max(0.0), 0.0));
    }
    Ok(out)
}

/// One to three arcs of polar angle with random positions and lengths.
pub fn random_arcs(rng: &mut impl Rng) -> Vec<(f64, f64)> {
    (0..rng.gen_range(1..=3))
        .map(|_| {
            let a = rng.gen_range(0.0..2.0 * PI);
            (a, a + rng.gen_range(0.01..2.0))
        })
        .collect()
}
