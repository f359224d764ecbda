mod common;

use std::f64::consts::PI;

use hypersticks::geometry::{make_stick, HPoint};
use proptest::prelude::*;

fn point(max_rho: f64) -> impl Strategy<Value = HPoint> {
    (0.0..max_rho, 0.0..2.0 * PI).prop_map(|(r, t)| HPoint::new(r, t))
}

fn check(r: common::Check) -> Result<(), TestCaseError> {
    r.map_err(TestCaseError::fail)
}

proptest! {
    #[test]
    fn translation_is_an_isometry(x in point(12.0), p in point(12.0), q in point(12.0)) {
        check(common::isometry(x, p, q))?;
    }

    #[test]
    fn dist_is_a_metric(p in point(30.0), q in point(30.0), r in point(30.0)) {
        check(common::metric(p, q, r))?;
    }

    #[test]
    fn chord_distance_matches_dist(rho in 0.0..20.0f64, phi in 0.0..PI) {
        check(common::chord(rho, phi))?;
    }

    #[test]
    fn triangles_obey_the_sine_rule(a in 0.05..15.0f64, b in 0.05..15.0f64, u in 0.02..0.98f64) {
        let c = (a - b).abs() + u * (a + b - (a - b).abs());
        check(common::triangle(a, b, c))?;
    }

    #[test]
    fn disc_round_trip(p in point(5.0)) {
        check(common::disc_round_trip(p))?;
    }

    #[test]
    fn stick_endpoints_are_half_a_length_away(x in point(10.0), phi in 0.0..PI, l in 0.1..20.0f64) {
        check(common::stick_endpoints(x, phi, l))?;
    }

    #[test]
    fn hitting_triples_round_trip(
        rho in 0.01..8.0f64,
        phi in 0.01..PI - 0.01,
        u in -0.99..0.99f64,
        l in 0.5..10.0f64,
        ray in 0.0..2.0 * PI,
    ) {
        check(common::triple_round_trip(rho, phi, u * l / 2.0, l, ray))?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn segment_intersection_matches_oracle(
        c1 in point(2.0), c2 in point(2.0),
        p1 in 0.0..PI, p2 in 0.0..PI,
        l1 in 0.5..4.0f64, l2 in 0.5..4.0f64,
    ) {
        let s1 = make_stick(c1, p1, l1).unwrap().endpoints();
        let s2 = make_stick(c2, p2, l2).unwrap().endpoints();
        if let Some(r) = common::intersection_agrees(&s1, &s2) {
            check(r)?;
        }
    }
}

#[test]
fn circle_cover_exhaustive() {
    for rho in [3.0, 5.0, 8.0] {
        common::circle_cover(rho).unwrap();
    }
    assert_eq!(hypersticks::geometry::circle_cover_points(3.0).len(), 32);
}

#[test]
fn ball_volume_matches_quadrature() {
    for rho in [1.0, 5.0, 10.0] {
        common::ball_volume_quadrature(rho).unwrap();
    }
}

#[test]
fn touching_and_crossing_segments() {
    let a = make_stick(HPoint::ORIGIN, 0.0, 2.0).unwrap().endpoints();
    let b = make_stick(HPoint::ORIGIN, PI / 2.0, 2.0).unwrap().endpoints();
    assert_eq!(common::intersection_agrees(&a, &b), Some(Ok(())));
    let far = make_stick(HPoint::new(3.0, PI / 2.0), 0.3, 1.0).unwrap().endpoints();
    assert_eq!(common::intersection_agrees(&a, &far), Some(Ok(())));
}
