use wrsp_core::oracle::{
    build_steiner_graph, oracle_distance, oracle_estimate, snell_two_region_optimum, Placement,
    SteinerGraph,
};
use wrsp_core::{parse_mesh, Point2};

const TWO_FACES: &str = "v 0 0\nv 3 0\nv 3 2\nv 0 2\nf 0 1 2 1\nf 0 2 3 4\n";

#[test]
fn vertices_only_graph() {
    let sub = parse_mesh(TWO_FACES).unwrap();
    let g = build_steiner_graph(&sub, 0);
    assert_eq!(g.nodes().len(), 4);
    // 1 and 3 share no face: the best is 1 → 0 (weight 1) then 0 → 3 (weight 4).
    let p = oracle_distance(&g, 1, 3).unwrap();
    assert_eq!(p.cost, 3.0 + 4.0 * 2.0);
    assert_eq!(p.nodes, vec![1, 0, 3]);
}

#[test]
fn nested_refinement_is_monotone() {
    let sub = parse_mesh(TWO_FACES).unwrap();
    let mut last = f64::INFINITY;
    for m in 1..=6 {
        let g = SteinerGraph::build(&sub, Placement::Nested(m));
        let c = oracle_distance(&g, 1, 3).unwrap().cost;
        assert!(c <= last + 1e-12, "level {m}: {c} > {last}");
        last = c;
    }
}

#[test]
fn golden_section_example() {
    let opt = snell_two_region_optimum(
        1.0,
        2.0,
        Point2::new(-5.0, 0.0),
        Point2::new(5.0, 0.0),
        Point2::new(0.0, 1.0),
        Point2::new(1.0, -1.0),
    );
    // Frozen from a 40-digit root of the derivative.
    assert!((opt.crossing.x - 0.700_534_534_079_933_5).abs() < 1e-6);
    assert!((opt.cost - 3.308_716_533_692_559_3).abs() < 1e-12);
    assert!((opt.param - (opt.crossing.x + 5.0) / 10.0).abs() < 1e-15);
}

#[test]
fn two_strips_close_to_analytic() {
    let sub = parse_mesh(
        "v 0 0\nv 4 0\nv 4 1\nv 0 1\nv 0 2\nv 4 2\nf 0 1 2 1\nf 0 2 3 1\nf 3 2 5 2\nf 3 5 4 2\n",
    )
    .unwrap();
    let g = build_steiner_graph(&sub, 256);
    let oracle = oracle_distance(&g, 0, 5).unwrap().cost;
    let opt = snell_two_region_optimum(
        1.0,
        2.0,
        Point2::new(0.0, 1.0),
        Point2::new(4.0, 1.0),
        Point2::new(0.0, 0.0),
        Point2::new(4.0, 2.0),
    );
    assert!(oracle >= opt.cost - 1e-12);
    assert!((oracle - opt.cost) / opt.cost < 0.005);
}

#[test]
fn estimate_reports_both_levels() {
    let sub = parse_mesh(TWO_FACES).unwrap();
    let est = oracle_estimate(&sub, 1, 3, 8).unwrap();
    assert_eq!((est.k, est.fine_k), (8, 32));
    assert_eq!(est.slack, (est.cost - est.fine_cost).abs());
}
