use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};

use proptest::prelude::*;
use wrsp_core::optics::{
    angular_spacing, critical_angle, find_hit_at_angle, refract, refract_direction, snell_residual,
    trace_ray, Angle, EdgeFrame, HitQuery, RefractionOutcome, SpacingClamp, TinyReal,
};
use wrsp_core::subdivision::{MeshStats, RawMesh};
use wrsp_core::{PlanarSubdivision, Point2};

/// Horizontal bands `[i, i + 1] × [0, 10]`, two triangles each.
fn bands(weights: &[u32]) -> PlanarSubdivision {
    let mut raw = RawMesh::default();
    for i in 0..=weights.len() {
        raw.push_vertex(Point2::new(0.0, i as f64));
        raw.push_vertex(Point2::new(10.0, i as f64));
    }
    for (i, &w) in weights.iter().enumerate() {
        let (a0, b0, a1, b1) = (2 * i, 2 * i + 1, 2 * i + 2, 2 * i + 3);
        raw.push_face(a0, b0, b1, w);
        raw.push_face(a0, b1, a1, w);
    }
    PlanarSubdivision::from_raw(&raw).unwrap()
}

#[test]
fn critical_angle_five_three() {
    // Frozen from a 40-digit evaluation of arcsin(3/5).
    let c = critical_angle(5, 3).unwrap().radians();
    assert!((c - 0.643_501_108_793_284_4).abs() < 1e-12);
}

#[test]
fn refraction_two_to_one_at_twenty_degrees() {
    // Frozen from a 40-digit evaluation of arcsin(2 sin 20°).
    let out = refract(Angle::degrees(20.0), 2, 1);
    let RefractionOutcome::Refracted(a) = out else {
        panic!("expected refraction, got {out:?}");
    };
    assert!((a.radians() - 0.753_287_208_352_992).abs() < 1e-12);
}

#[test]
fn three_band_chain() {
    let sub = bands(&[3, 2, 1]);
    let start = Point2::new(2.0, 0.5);
    let dir = Point2::from_angle(FRAC_PI_2 - 10f64.to_radians());
    let face = sub.locate(start, 0.0).unwrap();
    let rec = trace_ray(&sub, start, dir, face, 16, 1e-9).unwrap();
    let horizontal: Vec<_> = rec
        .crossings
        .iter()
        .filter(|c| {
            let (a, b) = sub.edge_points(c.edge);
            a.y == b.y
        })
        .collect();
    assert_eq!(horizontal.len(), 3);
    let s1 = 3.0 * horizontal[0].incidence.radians().sin();
    let s2 = 2.0 * horizontal[1].incidence.radians().sin();
    assert!((horizontal[0].incidence.radians() - 10f64.to_radians()).abs() < 1e-12);
    assert!((s1 - s2).abs() < 1e-10);
    // Frozen from a 40-digit evaluation of the Snell chain.
    assert!((horizontal[1].incidence.radians() - 0.263_511_322_011_277_7).abs() < 1e-10);
    let RefractionOutcome::Refracted(third) = horizontal[1].outcome else {
        panic!("second interface should refract");
    };
    assert!((third.radians() - 0.547_957_118_634_746_8).abs() < 1e-10);
    assert!((s1 - third.radians().sin()).abs() < 1e-10);
}

#[test]
fn hit_at_angle_three_bands() {
    let sub = bands(&[3, 2, 1]);
    let origin = Point2::new(1.0, 0.5);
    let face = sub.locate(origin, 0.0).unwrap();
    let edges = [
        sub.find_edge(2, 3).unwrap(),
        sub.find_edge(2, 5).unwrap(),
        sub.find_edge(4, 5).unwrap(),
    ];
    let (p, q) = sub.edge_points(edges[2]);
    let q = HitQuery {
        origin,
        origin_face: face,
        edges: &edges,
        theta: critical_angle(2, 1).unwrap(),
        tangent_sign: (q.x - p.x).signum(),
        interval: (0.0, 1.0),
    };
    let hit = find_hit_at_angle(&sub, &q).unwrap();
    // 3 sin β = 2 sin(π/6) = 1.
    let beta = (1.0f64 / 3.0).asin();
    assert!(hit.launch_dir.dist(Point2::new(beta.sin(), beta.cos())) < 1e-9);
    let expect = Point2::new(1.0 + 0.5 * beta.tan() + FRAC_PI_6.tan(), 2.0);
    assert!(hit.point.dist(expect) < 1e-9);
    assert!((hit.incidence.radians() - FRAC_PI_6).abs() < 1e-9);
}

#[test]
fn hit_at_angle_outside_interval_is_nil() {
    let sub = bands(&[3, 2, 1]);
    let origin = Point2::new(1.0, 0.5);
    let face = sub.locate(origin, 0.0).unwrap();
    let edges = [
        sub.find_edge(2, 3).unwrap(),
        sub.find_edge(2, 5).unwrap(),
        sub.find_edge(4, 5).unwrap(),
    ];
    let (p, q) = sub.edge_points(edges[2]);
    let hit_u = (1.0 + 0.5 * (1.0f64 / 3.0).asin().tan() + FRAC_PI_6.tan() - p.x) / (q.x - p.x);
    let interval = if hit_u > 0.5 { (0.0, 0.1) } else { (0.9, 1.0) };
    let q = HitQuery {
        origin,
        origin_face: face,
        edges: &edges,
        theta: critical_angle(2, 1).unwrap(),
        tangent_sign: (q.x - p.x).signum(),
        interval,
    };
    assert_eq!(find_hit_at_angle(&sub, &q), None);
}

#[test]
fn spacing_example() {
    let stats = MeshStats {
        n: 10,
        faces: 1,
        edges: 3,
        max_edge_length: 2.0,
        min_weight: 1,
        max_weight: 4,
    };
    let sp = angular_spacing(&stats, 0.05, 16.0, SpacingClamp::default());
    // Frozen from a 40-digit evaluation.
    let eps_prime = 4.629_629_629_629_629_6e-5;
    assert!((sp.epsilon_prime - eps_prime).abs() <= 1e-12 * eps_prime);
    assert_eq!(sp.gamma_theory.exp2, -1858);
    assert!((sp.gamma_theory.mantissa - 1.655_064_124_206_489_7).abs() < 1e-12);
    assert!((sp.gamma_theory_log10 + 559.094_917_118_828_4).abs() < 1e-9);
    assert!(sp.clamped);
    assert_eq!(sp.gamma, SpacingClamp::default().min_angle);
    assert_eq!(sp.ray_count, 1 << 20);
}

proptest! {
    #[test]
    fn refraction_obeys_snell(theta in 0.0..1.55f64, a_in in 1u32..10, a_out in 1u32..10) {
        match refract(Angle::new(theta), a_in, a_out) {
            RefractionOutcome::Refracted(out) | RefractionOutcome::NoCritical(out) => {
                let lhs = a_in as f64 * theta.sin();
                let rhs = a_out as f64 * out.radians().sin();
                prop_assert!((lhs - rhs).abs() < 1e-12);
            }
            RefractionOutcome::AtCritical(_) | RefractionOutcome::BeyondCritical(_) => {
                let c = critical_angle(a_in, a_out).unwrap().radians();
                prop_assert!(theta >= c - 1e-9);
            }
        }
    }

    #[test]
    fn direction_refraction_has_zero_residual(phi in -3.0..-0.15f64, a_in in 1u32..10, a_out in 1u32..10) {
        let frame = EdgeFrame {
            a: Point2::new(0.0, 0.0),
            b: Point2::new(1.0, 0.0),
            tangent: Point2::new(1.0, 0.0),
            normal: Point2::new(0.0, -1.0),
        };
        let d = Point2::from_angle(phi);
        if let Some(out) = refract_direction(&frame, d, a_in, a_out) {
            prop_assert!(snell_residual(frame.tangent, d, out, a_in as f64, a_out as f64).abs() < 1e-12);
            prop_assert!(out.y < 0.0);
            prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        } else {
            prop_assert!(a_in > a_out);
        }
    }

    #[test]
    fn tiny_real_tracks_logarithms(x in 1e-300..1e300f64, y in 1e-300..1e300f64, k in 0u64..5000) {
        let (a, b) = (TinyReal::from_f64(x), TinyReal::from_f64(y));
        prop_assert!((1.0..2.0).contains(&a.mantissa));
        prop_assert!(((a * b).ln() - (x.ln() + y.ln())).abs() < 1e-9 * (1.0 + x.ln().abs() + y.ln().abs()));
        let p = a.powi(k);
        prop_assert!((p.ln() - k as f64 * x.ln()).abs() <= 1e-12 * (1.0 + (k as f64 * x.ln()).abs()));
    }
}
