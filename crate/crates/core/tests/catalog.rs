use hilbert_core::geometry::{make_body, make_nonint_example, BodySpec};
use hilbert_core::growth::{default_eps_grid, minkowski_dimension, vertex_angles};
use hilbert_core::metric::hilbert_distance;
use hilbert_core::numerics::zeta_upper;
use hilbert_core::GeomError;

#[test]
fn spec_forms_build_bodies() {
    for (text, dim) in [
        (r#"{"kind": "disc"}"#, 2),
        (r#"{"kind": "polygon2d", "vertices": [[1, 0], [0, 1], [-1, -1]]}"#, 2),
        (r#"{"kind": "ellipse", "semi_axes": [2, 1], "angle": 0.3, "origin": [0.2, 0.1]}"#, 2),
        (r#"{"kind": "square", "half_side": 2}"#, 2),
        (r#"{"kind": "regular_polygon", "m": 5}"#, 2),
        (r#"{"kind": "triangle"}"#, 2),
        (r#"{"kind": "stadium", "half_length": 1, "radius": 1}"#, 2),
        (r#"{"kind": "ellipsoid", "semi_axes": [1, 2, 3]}"#, 3),
    ] {
        let spec = BodySpec::from_json(text).unwrap();
        let body = make_body(&spec).unwrap();
        assert_eq!(body.dimension(), dim, "{text}");
        let again = BodySpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(make_body(&again).unwrap().dimension(), dim);
    }
}

#[test]
fn malformed_specs_are_invalid_input() {
    for text in [r#"{"kind": "disk"}"#, r#"{"kind": "ellipse"}"#, "[1, 2"] {
        assert!(matches!(BodySpec::from_json(text), Err(GeomError::InvalidSpec(_))), "{text}");
    }
    let bad_origin = BodySpec::from_json(r#"{"kind": "disc", "origin": [2, 0]}"#).unwrap();
    assert!(make_body(&bad_origin).is_err());
}

#[test]
fn nonint_example_geometry() {
    let ex = make_nonint_example(3.0, 500, 0.9).unwrap();
    // Three vertices per term on each half.
    assert_eq!(ex.polygon.len(), 3000);
    let band = ex.entropy_band();
    assert!((band[0] - 1.0 / 3.0).abs() < 1e-15 && (band[1] - 0.8).abs() < 1e-15);
    // Three angles per term, C_s chosen so that their total stays below 0.9π.
    assert!((3.0 * ex.c_s * zeta_upper(3.0, 1_000_000) - 0.9 * std::f64::consts::PI).abs() < 1e-12);
    assert!((ex.alpha(2) - ex.c_s / 8.0).abs() < 1e-15);
    let v = ex.polygon.vertices();
    for i in [1, 2, 10, 100] {
        let j = ex.middle_edge(i);
        for r in [1.0f64, 4.0] {
            let t = r.tanh();
            let d = hilbert_distance(&ex.polygon, &(v[j] * t), &(v[j + 1] * t)).unwrap();
            assert!((d - ex.middle_segment_length(i, r)).abs() < 1e-9 * d, "i = {i}, r = {r}");
            assert!(d >= ex.segment_bound_sin_alpha(i, r) * (1.0 - 1e-9));
        }
    }
    let dim = minkowski_dimension(&vertex_angles(&ex.polygon), &default_eps_grid()).unwrap();
    assert!(dim.dimension <= 0.6, "{}", dim.dimension);
}
