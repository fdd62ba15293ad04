use std::f64::consts::PI;
use std::path::PathBuf;

use rieszcap::geometry::{
    hausdorff_distance, mean_width, minkowski_interpolate, perimeter_2d, sample_points, support_function, BodyKind,
    ConvexBody, Direction, SampleMode,
};
use rieszcap::Error;

fn bodies_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../bodies")
}

#[test]
fn shipped_body_files_parse_and_round_trip() {
    let mut count = 0;
    for entry in std::fs::read_dir(bodies_dir()).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let body = ConvexBody::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(!body.is_degenerate());
        let again = ConvexBody::from_json(&body.to_json()).unwrap();
        assert_eq!(again, body);
        count += 1;
    }
    assert!(count >= 6);
}

#[test]
fn malformed_specs_name_the_field() {
    let cases = [
        (r#"{"dim": 2, "kind": "ball", "center": [0, 0]}"#, "radius"),
        (r#"{"dim": 2, "kind": "ball", "center": [0, 0], "radius": -1}"#, "radius"),
        (r#"{"dim": 2, "kind": "ellipsoid", "center": [0, 0], "semi_axes": [1]}"#, "semi_axes"),
        (r#"{"dim": 2, "kind": "polytope", "vertices": [[0, 0], [1]]}"#, "vertices"),
    ];
    for (text, field) in cases {
        match ConvexBody::from_json(text) {
            Err(Error::BodySpec(msg)) => assert!(msg.contains(field), "{msg} should mention {field}"),
            other => panic!("expected a body-spec error for {text}, got {other:?}"),
        }
    }
}

#[test]
fn mean_width_is_perimeter_over_pi_in_the_plane() {
    let bodies = [
        ConvexBody::unit_ball(2).scaled(1.7),
        ConvexBody::cuboid(&[0.3, -0.2], &[1.0, 0.5]).unwrap(),
        ConvexBody::regular_polygon(5, 1.2, 0.3).unwrap(),
        ConvexBody::ellipsoid(vec![0.0, 0.0], vec![2.0, 1.0]).unwrap(),
    ];
    for b in &bodies {
        let m = mean_width(b, 1 << 14).unwrap();
        let p = perimeter_2d(b).unwrap();
        assert!((m - p / PI).abs() < 1e-6 * m, "{m} vs {}", p / PI);
    }
    let m3 = mean_width(&ConvexBody::unit_ball(3), 32).unwrap();
    assert!((m3 - 2.0).abs() < 1e-10);
}

#[test]
fn dilation_is_at_hausdorff_distance_epsilon() {
    let k = ConvexBody::regular_polygon(3, 1.0, 0.0).unwrap();
    for eps in [0.05, 0.2, 1.0] {
        let d = hausdorff_distance(&k, &k.dilated(eps).unwrap(), 256).unwrap();
        assert!((d - eps).abs() < 1e-12, "{d} vs {eps}");
    }
}

#[test]
fn interpolation_between_balls_is_a_ball() {
    let a = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
    let b = ConvexBody::ball(vec![4.0, 0.0], 3.0).unwrap();
    let mid = minkowski_interpolate(&a, &b, 0.25).unwrap();
    assert!(matches!(mid.kind(), BodyKind::Blend(_)));
    for k in 0..16 {
        let nu = Direction::from_angle(k as f64 * 0.4);
        let h = support_function(&mid, &nu).unwrap();
        let expected = 1.0 * nu.as_slice()[0] + 1.5;
        assert!((h - expected).abs() < 1e-14);
    }
}

#[test]
fn sample_weights_cover_the_body() {
    let disk = ConvexBody::unit_ball(2);
    let interior = sample_points(&disk, SampleMode::Interior, 800).unwrap();
    // The clipped lattice covers the inscribed polygon of the boundary discretization.
    assert!((interior.total_weight() - PI).abs() < 1e-3);
    let boundary = sample_points(&disk, SampleMode::Boundary, 400).unwrap();
    // Arc length of the inscribed boundary polygon.
    assert!((boundary.total_weight() - 2.0 * PI).abs() < 1e-5);
    let sphere = sample_points(&ConvexBody::unit_ball(3), SampleMode::Boundary, 2000).unwrap();
    assert!((sphere.total_weight() - 4.0 * PI).abs() < 0.01 * 4.0 * PI);
}

#[test]
fn lattice_is_anchored_to_the_body() {
    let k = ConvexBody::regular_polygon(6, 1.0, 0.1).unwrap();
    let shift = [3.25, -1.5];
    let a = sample_points(&k, SampleMode::Interior, 300).unwrap();
    let b = sample_points(&k.translated(&shift), SampleMode::Interior, 300).unwrap();
    assert_eq!(a.len(), b.len());
    for (p, q) in a.points().iter().zip(b.points()) {
        assert!((q[0] - p[0] - shift[0]).abs() < 1e-12 && (q[1] - p[1] - shift[1]).abs() < 1e-12);
    }
}
