use hilbert_core::geometry::{
    boundary_frame, dir2, ConvexBody, Ellipsoid, Mapped, Polygon, ProjectiveMap, Vector2,
};
use hilbert_core::metric::{chord, finsler_norm, hilbert_distance, sphere_point};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Arc;

fn klein(x: &Vector2, y: &Vector2) -> f64 {
    let c = (1.0 - x.dot(y)) / ((1.0 - x.norm_squared()) * (1.0 - y.norm_squared())).sqrt();
    c.max(1.0).acosh()
}

/// Interior point at fraction `f` of the way to the boundary in direction `u`.
fn inner<B: ConvexBody<2> + ?Sized>(body: &B, u: f64, f: f64) -> Vector2 {
    let d = dir2(u);
    d * (f * body.exit_param(&Vector2::zeros(), &d).unwrap())
}

fn ellipse_strategy() -> impl Strategy<Value = Ellipsoid<2>> {
    (0.5..3.0f64, 0.5..3.0f64, 0.0..PI, 0.0..2.0 * PI, 0.0..0.4f64).prop_map(
        |(a, b, angle, cu, cf)| {
            let c = dir2(cu) * (cf * a.min(b));
            Ellipsoid::ellipse(a, b, angle, c).unwrap()
        },
    )
}

#[test]
fn disc_distance_is_klein() {
    let disc = Ellipsoid::<2>::ball(1.0).unwrap();
    for (x, y) in [
        (Vector2::new(0.1, 0.2), Vector2::new(-0.5, 0.3)),
        (Vector2::new(0.9, 0.0), Vector2::new(0.0, -0.9)),
        (Vector2::new(0.999, 0.0), Vector2::new(0.998, 0.001)),
    ] {
        let d = hilbert_distance(&disc, &x, &y).unwrap();
        assert!((d - klein(&x, &y)).abs() < 1e-12 * d.max(1.0), "{d}");
    }
}

#[test]
fn distance_rejects_exterior_points() {
    let sq = Polygon::square(1.0).unwrap();
    assert!(hilbert_distance(&sq, &Vector2::zeros(), &Vector2::new(1.0, 0.0)).is_err());
    assert!(hilbert_distance(&sq, &Vector2::new(f64::NAN, 0.0), &Vector2::zeros()).is_err());
}

#[test]
fn sphere_points_sit_at_radius_r() {
    let bodies: Vec<Box<dyn ConvexBody<2>>> = vec![
        Box::new(Ellipsoid::ellipse(2.0, 1.0, 0.4, Vector2::new(0.5, 0.2)).unwrap()),
        Box::new(Polygon::regular(5, 1.0, 0.1).unwrap()),
    ];
    for body in &bodies {
        for k in 0..12 {
            let f = boundary_frame(body.as_ref(), 0.3 + k as f64).unwrap();
            for r in [0.1, 1.0, 5.0, 12.0] {
                let d = hilbert_distance(body.as_ref(), &Vector2::zeros(), &sphere_point(&f, r)).unwrap();
                // Coordinates carry one ulp; the depth below the boundary is about e^{−2r}.
                let tol = 1e-10 + 8.0 * f64::EPSILON * (2.0 * r).exp();
                assert!((d - r).abs() < tol, "r = {r}, d = {d}");
            }
        }
    }
}

#[test]
fn norm_of_square_at_origin() {
    let sq = Polygon::square(1.0).unwrap();
    let c = chord(&sq, &Vector2::zeros(), &Vector2::new(1.0, 1.0)).unwrap();
    assert_eq!((c.t1, c.t2), (1.0, 1.0));
    assert_eq!(finsler_norm(&sq, &Vector2::zeros(), &Vector2::new(0.3, -0.2)).unwrap(), 0.3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triangle_inequality_and_symmetry(
        body in ellipse_strategy(),
        us in prop::array::uniform3(0.0..2.0 * PI),
        fs in prop::array::uniform3(0.0..0.98f64),
    ) {
        let p: Vec<Vector2> = (0..3).map(|i| inner(&body, us[i], fs[i])).collect();
        let d = |i: usize, j: usize| hilbert_distance(&body, &p[i], &p[j]).unwrap();
        prop_assert!((d(0, 1) - d(1, 0)).abs() <= 1e-12 * d(0, 1).max(1.0));
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-10);
    }

    #[test]
    fn polygon_triangle_inequality(
        m in 3usize..9,
        phase in 0.0..PI,
        us in prop::array::uniform3(0.0..2.0 * PI),
        fs in prop::array::uniform3(0.0..0.98f64),
    ) {
        let poly = Polygon::regular(m, 1.0, phase).unwrap();
        let p: Vec<Vector2> = (0..3).map(|i| inner(&poly, us[i], fs[i])).collect();
        let d = |i: usize, j: usize| hilbert_distance(&poly, &p[i], &p[j]).unwrap();
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-10);
    }

    #[test]
    fn norm_is_positively_homogeneous(
        body in ellipse_strategy(),
        u in 0.0..2.0 * PI,
        f in 0.0..0.95f64,
        w in 0.0..2.0 * PI,
        s in 0.01..100.0f64,
    ) {
        let x = inner(&body, u, f);
        let v = dir2(w);
        let n1 = finsler_norm(&body, &x, &v).unwrap();
        let ns = finsler_norm(&body, &x, &(v * s)).unwrap();
        let nm = finsler_norm(&body, &x, &(-v)).unwrap();
        prop_assert!((ns - s * n1).abs() <= 1e-12 * ns);
        prop_assert!((nm - n1).abs() <= 1e-12 * n1);
    }

    #[test]
    fn projective_maps_preserve_distances(
        seed in any::<u64>(),
        us in prop::array::uniform2(0.0..2.0 * PI),
        fs in prop::array::uniform2(0.0..0.9f64),
    ) {
        let disc: Arc<dyn ConvexBody<2>> = Arc::new(Ellipsoid::<2>::ball(1.0).unwrap());
        let map = ProjectiveMap::<2>::random_origin_fixing(&mut ChaCha8Rng::seed_from_u64(seed), 0.3, 0.5);
        let image = Mapped::new(disc, map.clone()).unwrap();
        let x = dir2(us[0]) * fs[0];
        let y = dir2(us[1]) * fs[1];
        let want = klein(&x, &y);
        let got = hilbert_distance(&image, &map.apply(&x).unwrap(), &map.apply(&y).unwrap()).unwrap();
        prop_assert!((got - want).abs() <= 1e-9 * want.max(1e-3));
    }
}
