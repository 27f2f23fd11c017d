use hilbert_core::busemann::{density, verify_truncation};
use hilbert_core::geometry::{
    boundary_frame, dir2, ConvexBody, Ellipsoid, HalfSpace, Intersection, Mapped, Paraboloid,
    Polygon, ProjectiveMap, Vector, Vector2,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Arc;

#[test]
fn disc_density_is_klein_everywhere() {
    let disc = Ellipsoid::<2>::ball(1.0).unwrap();
    for r in [0.0, 0.3, 0.9, 0.999, 1.0 - 1e-7] {
        let x = dir2(1.1) * r;
        let s = density(&disc, &x).unwrap();
        let want = (1.0 - r * r).powf(-1.5);
        assert!((s / want - 1.0).abs() < 1e-9, "r = {r}: {s} vs {want}");
    }
}

#[test]
fn ball_density_in_space() {
    // Klein model of hyperbolic 3-space: (1 − |x|²)^{−2}.
    let ball = Ellipsoid::<3>::ball(1.0).unwrap();
    for r in [0.0, 0.5, 0.9] {
        let x = Vector::<3>::new(0.3, -0.4, 0.5).normalize() * r;
        let s = density(&ball, &x).unwrap();
        let want = (1.0 - r * r).powi(-2);
        assert!((s / want - 1.0).abs() < 1e-6, "r = {r}: {s} vs {want}");
    }
}

#[test]
fn parabola_density_closed_form() {
    for c in [0.25, 1.0, 4.0] {
        let body = Paraboloid::<2>::planar(c).unwrap();
        for h in [0.5, 1e-2, 1e-5] {
            let s = density(&body, &Vector2::new(0.0, h)).unwrap();
            assert!((s / (c.sqrt() / (2.0 * h).powf(1.5)) - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn square_density_at_centre() {
    // The tangent ball at the centre is the square itself, of area 4.
    let sq = Polygon::square(1.0).unwrap();
    assert!((density(&sq, &Vector2::zeros()).unwrap() - PI / 4.0).abs() < 1e-12);
}

#[test]
fn truncation_is_invisible_near_an_untouched_boundary_point() {
    let disc: Arc<dyn ConvexBody<2>> = Arc::new(Ellipsoid::<2>::ball(1.0).unwrap());
    let cut = Intersection::new(vec![
        disc.clone(),
        Arc::new(HalfSpace::new(Vector2::new(1.0, 0.0), 0.5).unwrap()),
    ])
    .unwrap();
    let p = boundary_frame(disc.as_ref(), PI).unwrap().position;
    let lambdas = [0.99, 0.999, 0.9999, 1.0 - 1e-6];
    let rep = verify_truncation(&cut, disc.as_ref(), &p, &lambdas).unwrap();
    assert!(rep.max_violation < 1e-6, "{}", rep.max_violation);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn density_transforms_with_the_jacobian(
        seed in any::<u64>(),
        u in 0.0..2.0 * PI,
        f in 0.0..0.9f64,
        square in any::<bool>(),
    ) {
        let body: Arc<dyn ConvexBody<2>> = if square {
            Arc::new(Polygon::square(1.0).unwrap())
        } else {
            Arc::new(Ellipsoid::ellipse(2.0, 1.0, 0.3, Vector2::new(0.3, 0.1)).unwrap())
        };
        let map = ProjectiveMap::<2>::random_origin_fixing(&mut ChaCha8Rng::seed_from_u64(seed), 0.3, 0.5);
        let image = Mapped::new(body.clone(), map.clone()).unwrap();
        let d = dir2(u);
        let x = d * (f * body.exit_param(&Vector2::zeros(), &d).unwrap());
        let lhs = density(&image, &map.apply(&x).unwrap()).unwrap() * map.jacobian_det(&x).abs();
        let rhs = density(body.as_ref(), &x).unwrap();
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-6, "{} vs {}", lhs, rhs);
    }
}
