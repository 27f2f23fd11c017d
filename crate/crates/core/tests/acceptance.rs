//! Acceptance checks, one line per criterion.
//!
//! Reference values are computed here from closed forms (Klein model,
//! explicit ellipse geometry, bisection on the distance) rather than taken
//! from the code under test. The process exits nonzero only when a check
//! fails that is not listed as a known limitation.

use hilbert_core::areas::{centro_projective_area, gauge_hessian_check, semicontinuity_experiment};
use hilbert_core::busemann::{
    density, jacobian_phi, pseudo_gauss_2d, verify_density_upper_bound, verify_pointwise_limit,
    TriangleSetup,
};
use hilbert_core::geometry::{
    boundary_frame, dir2, make_nonint_example, ConvexBody, Ellipsoid, Mapped, Paraboloid, Polygon,
    ProjectiveMap, RoundedPolygon, Vector2,
};
use hilbert_core::growth::{
    entropy_fit, growth_series_with, nonint_growth_check, schuett_werner_constant, volume_profile,
    GrowthConfig, GrowthMode, RollingGrid, SeriesParts,
};
use hilbert_core::metric::{hilbert_distance, polyline_length, sphere_point};
use hilbert_core::numerics::linspace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

type CheckResult = Result<Outcome, String>;

struct Outcome {
    pass: bool,
    summary: String,
    /// Set when the failure is fully explained by a documented limitation.
    known: Option<&'static str>,
}

fn outcome(pass: bool, summary: String) -> CheckResult {
    Ok(Outcome { pass, summary, known: None })
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

// ---- closed-form references ----

/// Hilbert distance in the unit disc (Klein model).
fn klein_distance(x: &Vector2, y: &Vector2) -> f64 {
    let c = (1.0 - x.dot(y)) / ((1.0 - x.norm_squared()) * (1.0 - y.norm_squared())).sqrt();
    c.max(1.0).acosh()
}

/// Exit time from the origin along unit `d` for the unit circle centred at `c`.
fn circle_exit(c: &Vector2, d: &Vector2) -> f64 {
    let dc = d.dot(c);
    dc + (dc * dc + 1.0 - c.norm_squared()).sqrt()
}

/// Point, curvature and `⟨p, n⟩` of the axis-aligned ellipse at parameter `t`.
fn ellipse_point(a: f64, b: f64, t: f64) -> (Vector2, f64, f64) {
    let (s, c) = t.sin_cos();
    let p = Vector2::new(a * c, b * s);
    let k = a * b / (a * a * s * s + b * b * c * c).powf(1.5);
    let support = 1.0 / (c * c / (a * a) + s * s / (b * b)).sqrt();
    (p, k, support)
}

fn polar(p: &Vector2) -> f64 {
    p[1].atan2(p[0])
}

fn disc() -> Ellipsoid<2> {
    Ellipsoid::ball(1.0).expect("unit disc")
}

fn shifted_disc() -> Ellipsoid<2> {
    disc().recentered(&Vector2::new(0.3, 0.0)).expect("shifted disc")
}

fn ellipse() -> Ellipsoid<2> {
    Ellipsoid::axis_aligned([2.0, 1.0]).expect("ellipse")
}

// ---- criteria ----

fn ball_volume() -> CheckResult {
    let start = Instant::now();
    let radii: Vec<f64> = (1..=8).map(f64::from).collect();
    let prof = volume_profile(&disc(), &radii, &GrowthConfig::default()).map_err(e)?;
    let secs = start.elapsed().as_secs_f64();
    let worst = radii
        .iter()
        .zip(&prof.volume)
        .map(|(r, v)| (v - 2.0 * PI * (r.cosh() - 1.0)).abs() / v)
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-3 && secs <= 10.0,
        format!("max rel err {worst:.2e} (tol 1e-3), {secs:.2} s (limit 10 s)"),
    )
}

fn smooth_entropy() -> CheckResult {
    let start = Instant::now();
    let radii = linspace(4.0, 8.0, 17);
    let mut lines = Vec::new();
    let mut pass = true;
    for (name, body) in [("disc", disc()), ("ellipse", ellipse())] {
        let s = growth_series_with(&body, &radii, SeriesParts::Both, &GrowthConfig::default())
            .map_err(e)?;
        let ball = entropy_fit(&s, Some([4.0, 8.0]), GrowthMode::Ball).map_err(e)?;
        let sphere = entropy_fit(&s, Some([4.0, 8.0]), GrowthMode::Sphere).map_err(e)?;
        let ok = |x: f64| (0.98..=1.01).contains(&x);
        pass &= ok(ball.slope) && ok(sphere.slope) && (ball.slope - sphere.slope).abs() <= 0.02;
        lines.push(format!(
            "{name} ball {:.4} (rms {:.1e}) sphere {:.4} (rms {:.1e})",
            ball.slope, ball.residual_rms, sphere.slope, sphere.residual_rms
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        pass && secs <= 60.0,
        format!("{}; {secs:.1} s (limit 60 s)", lines.join("; ")),
    )
}

fn entropy_coefficient() -> CheckResult {
    let mut lines = Vec::new();
    let mut pass = true;
    let e2 = Ellipsoid::ellipse(2.0, 1.0, 0.3, Vector2::new(0.4, -0.2)).map_err(e)?;
    for (name, body) in [("disc", disc()), ("off-centre disc", shifted_disc()), ("ellipse", e2)] {
        let prof = volume_profile(&body, &[8.0], &GrowthConfig::default()).map_err(e)?;
        let coeff = prof.volume[0] / 8f64.sinh();
        let ap = centro_projective_area(&body).map_err(e)?.value;
        let dev = (coeff - ap).abs() / ap;
        // Every pointed ellipse is projectively the centred disc.
        pass &= dev <= 0.02 && (ap - 2.0 * PI).abs() < 1e-9;
        lines.push(format!("{name} V/sinh r = {coeff:.5} vs A_p = {ap:.5} ({:.2}%)", 100.0 * dev));
    }
    outcome(pass, lines.join("; "))
}

fn parabola_density() -> CheckResult {
    let mut worst = 0.0f64;
    for c in [0.5, 1.0, 2.0] {
        let body = Paraboloid::<2>::planar(c).map_err(e)?;
        for l in [0.5, 0.9, 0.99] {
            let s = density(&body, &Vector2::new(0.0, 1.0 - l)).map_err(e)?;
            let want = c.sqrt() / (2.0 * (1.0 - l)).powf(1.5);
            worst = worst.max((s / want - 1.0).abs());
        }
    }
    outcome(worst <= 1e-6, format!("max rel err {worst:.2e} over 9 cases (tol 1e-6)"))
}

fn pointwise_limit() -> CheckResult {
    let lambdas = [0.9, 0.99, 0.999, 0.9999];
    let mut worst = 0.0f64;
    let d = disc();
    for k in 0..8 {
        let u = 0.3 + 2.0 * PI * k as f64 / 8.0;
        let rep = verify_pointwise_limit(&d, &dir2(u), &lambdas).map_err(e)?;
        let target = 2f64.powf(-1.5);
        let last = rep.sequence.last().expect("nonempty").value;
        worst = worst.max((last / target - 1.0).abs());
    }
    let el = ellipse();
    for k in 0..8 {
        let (p, kappa, support) = ellipse_point(2.0, 1.0, 0.2 + 2.0 * PI * k as f64 / 8.0);
        let target = kappa.sqrt() / (2.0 * support).powf(1.5);
        let rep = verify_pointwise_limit(&el, &(p / p.norm()), &lambdas).map_err(e)?;
        let last = rep.sequence.last().expect("nonempty").value;
        worst = worst.max((last / target - 1.0).abs());
    }
    let sq = Polygon::square(1.0).map_err(e)?;
    let deep = [0.5, 0.9, 0.99, 0.999, 0.9999, 1.0 - 1e-5, 1.0 - 1e-6];
    let mut flat = 0.0f64;
    for dir in [Vector2::new(1.0, 0.0), Vector2::new(0.0, -1.0)] {
        let rep = verify_pointwise_limit(&sq, &dir, &deep).map_err(e)?;
        let s = &rep.sequence;
        flat = flat.max(s[s.len() - 1].value / s[0].value);
    }
    outcome(
        worst <= 1e-2 && flat < 1e-2,
        format!("smooth max rel err {worst:.2e} at 1-λ = 1e-4 (tol 1e-2); square last/first {flat:.2e} (< 1e-2)"),
    )
}

/// `φ(u, r)` with `λ` found by bisection on the Hilbert distance.
fn sphere_map(body: &dyn ConvexBody<2>, u: f64, r: f64) -> Result<Vector2, String> {
    let d = dir2(u);
    let rho = body.exit_param(&Vector2::zeros(), &d).map_err(e)?;
    let p = d * rho;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if hilbert_distance(body, &Vector2::zeros(), &(p * mid)).map_err(e)? < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(p * (0.5 * (lo + hi)))
}

fn jacobian() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sd = shifted_disc();
    let el = Ellipsoid::ellipse(2.0, 1.0, 0.3, Vector2::new(0.2, 0.1)).map_err(e)?;
    let bodies: [&dyn ConvexBody<2>; 2] = [&sd, &el];
    let mut worst = 0.0f64;
    for i in 0..100 {
        let body = bodies[i % 2];
        let u = rng.gen_range(0.0..2.0 * PI);
        let r = rng.gen_range(0.1..4.0);
        let (h, k) = (1e-4, 1e-4);
        let du = (sphere_map(body, u + h, r)? - sphere_map(body, u - h, r)?) / (2.0 * h);
        let dr = (sphere_map(body, u, r + k)? - sphere_map(body, u, r - k)?) / (2.0 * k);
        let rho = |t: f64| body.exit_param(&Vector2::zeros(), &dir2(t));
        let dp = (dir2(u + h) * rho(u + h).map_err(e)? - dir2(u - h) * rho(u - h).map_err(e)?)
            / (2.0 * h);
        let fd = (du[0] * dr[1] - du[1] * dr[0]).abs() / dp.norm();
        let exact = jacobian_phi(body, &dir2(u), r).map_err(e)?;
        worst = worst.max((fd / exact - 1.0).abs());
    }
    // e^{2r}·Jac at r = 10 against 2(1+a)⟨p,n⟩/a, with the shifted-disc
    // geometry computed from the circle directly.
    let c = Vector2::new(-0.3, 0.0);
    let mut limit_err = 0.0f64;
    for k in 0..16 {
        let d = dir2(2.0 * PI * k as f64 / 16.0);
        let (ahead, back) = (circle_exit(&c, &d), circle_exit(&c, &(-d)));
        let p = d * ahead;
        let support = p.dot(&(p - c));
        let a = back / ahead;
        let want = 2.0 * (1.0 + a) * support / a;
        let got = 20f64.exp() * jacobian_phi(&sd, &d, 10.0).map_err(e)?;
        limit_err = limit_err.max((got / want - 1.0).abs());
    }
    outcome(
        worst <= 1e-5 && limit_err <= 1e-4,
        format!("closed form vs differences {worst:.2e} on 100 (u, r) (tol 1e-5); r = 10 limit {limit_err:.2e} (tol 1e-4)"),
    )
}

fn density_bounds() -> CheckResult {
    let lambdas: Vec<f64> = (0..=24).map(|k| 1.0 - 0.5 * 10f64.powf(-0.25 * k as f64)).collect();
    let mut violations = 0usize;
    let mut checked = 0usize;
    // Disc: Klein density against (π/2)(1−λ)^{−3/2} with k̄ = 1.
    let d = disc();
    for k in 0..12 {
        let p = dir2(0.1 + 2.0 * PI * k as f64 / 12.0);
        for &l in &lambdas {
            let s = density(&d, &(p * l)).map_err(e)?;
            let klein = (1.0 - l * l).powf(-1.5);
            if (s / klein - 1.0).abs() > 1e-8 || s > 0.5 * PI * (1.0 - l).powf(-1.5) {
                violations += 1;
            }
            checked += 1;
        }
    }
    // Ellipse: k̄ lies between the curvature and the Blaschke bound b/a² = 1/(b²/a).
    let el = ellipse();
    for k in 0..12 {
        let (p, kappa, _) = ellipse_point(2.0, 1.0, 0.1 + 2.0 * PI * k as f64 / 12.0);
        let u = polar(&p);
        let kbar = pseudo_gauss_2d(&el, u).map_err(e)?.value;
        if kbar < kappa * (1.0 - 1e-6) || kbar > 2.0 * (1.0 + 1e-6) {
            violations += 1;
        }
        let rep = verify_density_upper_bound(&el, u, &lambdas).map_err(e)?;
        violations += rep.sequence.iter().filter(|s| s.value > s.reference).count();
        checked += rep.sequence.len() + 1;
    }
    let tri = TriangleSetup::canonical();
    for t in [0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.95] {
        let rep = tri.verify_bound(t, &lambdas).map_err(e)?;
        let eps = 2.0 * t.min(1.0 - t);
        for s in &rep.sequence {
            let bound = 32.0 * PI * (1.0 / (eps * (1.0 - s.lambda))).max(1.0 / (eps * eps));
            if s.value > bound {
                violations += 1;
            }
            checked += 1;
        }
    }
    outcome(violations == 0, format!("{violations} violations in {checked} evaluations"))
}

fn schuett_werner() -> CheckResult {
    let constant = schuett_werner_constant(2, 0.5);
    let want = 2.0 * (2f64.sqrt() / (1.0 - 0.5f64.sqrt())).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let bodies: Vec<(&str, Box<dyn ConvexBody<2>>)> = vec![
        ("disc", Box::new(disc())),
        ("ellipse", Box::new(ellipse())),
        ("square", Box::new(Polygon::square(1.0).map_err(e)?)),
        ("stadium", Box::new(RoundedPolygon::stadium(1.0, 1.0).map_err(e)?)),
    ];
    let mut violations = 0;
    let mut margin = f64::INFINITY;
    let mut disc_err = 0.0f64;
    for (name, body) in &bodies {
        let grid = RollingGrid::new(body.as_ref(), 1024).map_err(e)?;
        for _ in 0..10 {
            let arcs: Vec<(f64, f64)> = (0..rng.gen_range(1..=3))
                .map(|_| {
                    let a = rng.gen_range(0.0..2.0 * PI);
                    (a, a + rng.gen_range(0.01..2.0))
                })
                .collect();
            let rep = grid.check(0.5, &arcs).map_err(e)?;
            if !rep.holds {
                violations += 1;
            }
            margin = margin.min(rep.rhs / rep.lhs);
            if *name == "disc" {
                // R ≡ 1 on the unit circle, so the integral is the arc length.
                disc_err = disc_err.max((rep.lhs - rep.subset_length).abs());
            }
        }
    }
    outcome(
        violations == 0 && (constant - want).abs() < 1e-12 && (constant - 4.39474).abs() < 1e-5 && disc_err < 1e-9,
        format!("{violations} violations in 40 subsets, smallest rhs/lhs {margin:.3}, constant {constant:.5}"),
    )
}

fn polygon_entropy() -> CheckResult {
    let radii = linspace(4.0, 8.0, 17);
    let mut lines = Vec::new();
    let mut pass = true;
    let mut numerics_ok = true;
    let bodies = [
        ("square", Polygon::square(1.0).map_err(e)?),
        ("pentagon", Polygon::regular(5, 1.0, 0.0).map_err(e)?),
    ];
    for (name, poly) in &bodies {
        let s = growth_series_with(poly, &radii, SeriesParts::Both, &GrowthConfig::default())
            .map_err(e)?;
        let ball = entropy_fit(&s, Some([4.0, 8.0]), GrowthMode::Ball).map_err(e)?;
        let sphere = entropy_fit(&s, Some([4.0, 8.0]), GrowthMode::Sphere).map_err(e)?;
        let ap = centro_projective_area(poly).map_err(e)?.value;
        // Sphere length at r = 8 against a dense polyline through the sphere.
        let pts: Vec<Vector2> = (0..=40_000)
            .map(|k| {
                let f = boundary_frame(poly, 2.0 * PI * (k as f64 + 0.5) / 40_000.0)?;
                Ok(sphere_point(&f, 8.0))
            })
            .collect::<hilbert_core::Result<_>>()
            .map_err(e)?;
        let line = polyline_length(poly, &pts).map_err(e)?;
        let a8 = *s.sphere.last().expect("nonempty");
        numerics_ok &= ap == 0.0 && (a8 / line - 1.0).abs() < 1e-3;
        pass &= ap == 0.0 && ball.slope <= 0.15 && sphere.slope <= 0.15;
        lines.push(format!(
            "{name} ball {:.3} sphere {:.3} A_p = {ap}",
            ball.slope, sphere.slope
        ));
    }
    Ok(Outcome {
        pass,
        summary: format!("{} (limit 0.15)", lines.join("; ")),
        known: numerics_ok.then_some(
            "A(r) is linear in r for polygons, so any [4,8] slope is about log 2/4 = 0.17; zero entropy is only asymptotic",
        ),
    })
}

fn nonint_example() -> CheckResult {
    let ex = make_nonint_example(3.0, 2000, 0.9).map_err(e)?;
    let rep = nonint_growth_check(&ex, None, 32).map_err(e)?;
    // Middle segments recomputed from the distance itself.
    let mut direct_err = 0.0f64;
    for c in rep.segments.iter().filter(|c| c.r <= 10.0).step_by(7) {
        let j = ex.middle_edge(c.i);
        let v = ex.polygon.vertices();
        let t = c.r.tanh();
        let d = hilbert_distance(&ex.polygon, &(v[j] * t), &(v[(j + 1) % v.len()] * t))
            .map_err(e)?;
        direct_err = direct_err.max((d - c.length).abs() / d);
    }
    let slope_ok = (1.0 / 3.0 - 0.1..=0.8 + 0.1).contains(&rep.fit.slope);
    let dim_ok = rep.dimension.dimension <= 0.6;
    let seg_ok = rep.segment_violations == 0;
    let pass = slope_ok && dim_ok && seg_ok;
    let explained = slope_ok && dim_ok && rep.sin_alpha_violations == 0 && direct_err < 1e-9;
    Ok(Outcome {
        pass,
        summary: format!(
            "slope {:.3} over [{:.2}, {:.2}] (rms {:.1e}, band [0.233, 0.9]); printed segment bound violated {}/{}, sin α form {}; dimension {:.3} (≤ 0.6)",
            rep.fit.slope,
            rep.fit.window[0],
            rep.fit.window[1],
            rep.fit.residual_rms,
            rep.segment_violations,
            rep.segments.len(),
            rep.sin_alpha_violations,
            rep.dimension.dimension
        ),
        known: (!pass && explained).then_some(
            "the printed closed-form segment bound uses sin 2α where the exact chord length gives sin α",
        ),
    })
}

fn projective_invariance() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let d: Arc<dyn ConvexBody<2>> = Arc::new(disc());
    let mut dist_err = 0.0f64;
    let mut area_err = 0.0f64;
    for _ in 0..5 {
        let map = ProjectiveMap::<2>::random_origin_fixing(&mut rng, 0.3, 0.5);
        let image = Mapped::new(d.clone(), map.clone()).map_err(e)?;
        for _ in 0..50 {
            let mut pt = || dir2(rng.gen_range(0.0..2.0 * PI)) * rng.gen_range(0.0..0.95);
            let (x, y) = (pt(), pt());
            let want = klein_distance(&x, &y);
            let got = hilbert_distance(&image, &map.apply(&x).map_err(e)?, &map.apply(&y).map_err(e)?)
                .map_err(e)?;
            dist_err = dist_err.max((got - want).abs() / want.max(1e-12));
        }
        let ap = centro_projective_area(&image).map_err(e)?.value;
        area_err = area_err.max((ap - 2.0 * PI).abs() / (2.0 * PI));
    }
    outcome(
        dist_err <= 1e-7 && area_err <= 1e-3,
        format!("distance rel err {dist_err:.2e} on 250 pairs (tol 1e-7); A_p rel err {area_err:.2e} on 5 maps (tol 1e-3)"),
    )
}

fn gauge_hessian() -> CheckResult {
    let c = Vector2::new(-0.3, 0.0);
    let exit = |x: &Vector2| circle_exit(&c, &(x / x.norm()));
    let gauge = |x: &Vector2| x.norm() / exit(x);
    let gplus = |x: &Vector2| {
        let (ahead, back, r) = (exit(x), exit(&(-x)), x.norm());
        2.0 * (back + ahead) * r / ((back + r) * ahead)
    };
    let sd = shifted_disc();
    let mut worst = 0.0f64;
    let mut agree = 0.0f64;
    for k in 0..20 {
        let d = dir2(0.05 + 2.0 * PI * k as f64 / 20.0);
        let p = d * exit(&d);
        let n = p - c;
        let v = Vector2::new(-n[1], n[0]);
        let h = 1e-4;
        let second = |g: &dyn Fn(&Vector2) -> f64| (g(&(p + v * h)) - 2.0 * g(&p) + g(&(p - v * h))) / (h * h);
        let (hf, hg) = (second(&gauge), second(&gplus));
        let a = exit(&(-d)) / exit(&d);
        worst = worst.max((hg / (2.0 * a / (1.0 + a) * hf) - 1.0).abs());
        let lib = gauge_hessian_check(&sd, &d, None).map_err(e)?;
        agree = agree.max((lib.hess_g / hg - 1.0).abs()).max(lib.rel_error);
    }
    outcome(
        worst <= 1e-4 && agree <= 1e-4,
        format!("identity rel err {worst:.2e} at 20 points (tol 1e-4); library evaluation within {agree:.2e}"),
    )
}

fn semicontinuity() -> CheckResult {
    let ms = [4, 6, 8, 12, 16, 24, 32, 48, 64];
    let mut rows = Vec::new();
    let mut pass = true;
    for (name, body) in [("disc", disc()), ("ellipse", ellipse())] {
        let rep = semicontinuity_experiment(&body, &ms).map_err(e)?;
        let reference = 2.0 * PI;
        pass &= (rep.reference - reference).abs() < 1e-9
            && rep.rows.iter().all(|r| r.inscribed == 0.0)
            && rep.max_mollified <= reference * 1.01;
        rows.push(format!(
            "{name}: inscribed max {} < {:.4}, mollified max {:.4}",
            rep.max_inscribed, rep.reference, rep.max_mollified
        ));
    }
    outcome(pass, rows.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> CheckResult); 13] = [
        ("hyperbolic ball volume", ball_volume),
        ("entropy of disc and ellipse", smooth_entropy),
        ("entropy coefficient", entropy_coefficient),
        ("parabola density", parabola_density),
        ("pointwise density limit", pointwise_limit),
        ("sphere-map Jacobian", jacobian),
        ("density upper bounds", density_bounds),
        ("Schütt–Werner inequality", schuett_werner),
        ("polygon entropy", polygon_entropy),
        ("non-integer entropy example", nonint_example),
        ("projective invariance", projective_invariance),
        ("gauge-Hessian identity", gauge_hessian),
        ("semicontinuity pattern", semicontinuity),
    ];
    let mut unexplained = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = check();
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(o) if o.pass => println!("PASS {:>2} {name}: {} [{secs:.1} s]", k + 1, o.summary),
            Ok(o) => {
                match o.known {
                    Some(why) => println!("FAIL {:>2} {name}: {} [{secs:.1} s] (known: {why})", k + 1, o.summary),
                    None => {
                        unexplained += 1;
                        println!("FAIL {:>2} {name}: {} [{secs:.1} s]", k + 1, o.summary);
                    }
                }
            }
            Err(msg) => {
                unexplained += 1;
                println!("FAIL {:>2} {name}: error: {msg} [{secs:.1} s]", k + 1);
            }
        }
    }
    if unexplained > 0 {
        std::process::exit(1);
    }
}
