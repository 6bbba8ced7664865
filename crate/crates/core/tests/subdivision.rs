use proptest::prelude::*;
use wrsp_core::subdivision::{parse_raw_mesh, random_mesh, validate, GenOptions, Issue};
use wrsp_core::{parse_mesh, serialize_mesh};

#[test]
fn shared_and_boundary_edges() {
    let sub = parse_mesh("v 0 0\nv 1 0\nv 1 1\nv 0 1\nf 0 1 2 1\nf 0 2 3 2\n").unwrap();
    let shared = sub.find_edge(0, 2).unwrap();
    let mut faces = sub.faces_of_edge(shared).unwrap().to_vec();
    faces.sort();
    assert_eq!(faces, vec![0, 1]);
    assert_eq!(sub.edge(shared).weight, 1);
    assert_eq!(
        sub.faces_of_edge(sub.find_edge(0, 1).unwrap()).unwrap(),
        &[0]
    );
}

#[test]
fn fan_vertex_degree() {
    let mut text = String::from("v 0 0\n");
    for i in 0..5 {
        let a = i as f64 * std::f64::consts::TAU / 5.0;
        text += &format!("v {} {}\n", a.cos(), a.sin());
    }
    for i in 0..5 {
        text += &format!("f 0 {} {} 1\n", 1 + i, 1 + (i + 1) % 5);
    }
    let sub = parse_mesh(&text).unwrap();
    assert_eq!(sub.edges_of_vertex(0).unwrap().len(), 5);
    assert_eq!(sub.faces_of_vertex(0).unwrap().len(), 5);
    assert_eq!(sub.edges_of_vertex(1).unwrap().len(), 3);
}

#[test]
fn validation_examples() {
    let ok = parse_raw_mesh("v 0 0\nv 1 0\nv 1 1\nv 0 1\nf 0 1 2 1\nf 0 2 3 2\n").unwrap();
    assert!(validate(&ok).is_empty());

    let fin =
        parse_raw_mesh("v 0 0\nv 1 0\nv 0 1\nv 1 1\nv -1 -1\nf 0 1 2 1\nf 1 3 2 1\nf 2 4 1 1\n")
            .unwrap();
    let report = validate(&fin);
    assert!(report
        .issues
        .iter()
        .any(|i| matches!(i, Issue::NonManifoldEdge { a: 1, b: 2, .. })));

    let zero = parse_raw_mesh("v 0 0\nv 1 0\nv 0 1\nf 0 1 2 0\n").unwrap();
    let report = validate(&zero);
    assert!(report
        .issues
        .iter()
        .any(|i| i.to_string().contains("weight below 1")));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_meshes_are_valid(seed in 0u64..10_000, points in 0usize..12) {
        let opts = GenOptions { interior_points: points, ..GenOptions::default() };
        let sub = random_mesh(seed, &opts).unwrap();
        prop_assert!(sub.validate().is_empty());
        // Euler: V − E + F = 1 for a triangulated disk.
        let (v, e, f) = (sub.vertex_count() as i64, sub.edges().len() as i64, sub.faces().len() as i64);
        prop_assert_eq!(v - e + f, 1);
        prop_assert_eq!(f, 2 * (points as i64) + 2);
        for (id, edge) in sub.edges().iter().enumerate() {
            let w = edge.faces.iter().map(|&g| sub.face(g).weight).min().unwrap();
            prop_assert_eq!(edge.weight, w, "edge {}", id);
        }
        let again = parse_mesh(&serialize_mesh(&sub)).unwrap();
        prop_assert_eq!(again.vertices(), sub.vertices());
        prop_assert_eq!(again.faces(), sub.faces());
    }
}
