//! Seeded random triangulations of a rectangle.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{MeshError, PlanarSubdivision, RawMesh};
use crate::geometry::{orient, point_segment_distance, Point2};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenOptions {
    /// Points inserted strictly inside the rectangle.
    pub interior_points: usize,
    pub width: f64,
    pub height: f64,
    pub min_weight: u32,
    pub max_weight: u32,
    /// Rejection distance from existing vertices and edges, relative to
    /// the shorter side.
    pub clearance: f64,
}

impl Default for GenOptions {
    fn default() -> Self {
        Self {
            interior_points: 6,
            width: 10.0,
            height: 10.0,
            min_weight: 1,
            max_weight: 5,
            clearance: 0.04,
        }
    }
}

/// Random Delaunay triangulation of `[0, width] × [0, height]` with the four
/// corners first and i.i.d. integer face weights.
pub fn random_mesh(seed: u64, opts: &GenOptions) -> Result<PlanarSubdivision, MeshError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (opts.width, opts.height);
    let mut raw = RawMesh::default();
    for p in [(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)] {
        raw.push_vertex(Point2::new(p.0, p.1));
    }
    raw.push_face(0, 1, 2, 1);
    raw.push_face(0, 2, 3, 1);
    let mut sub = PlanarSubdivision::from_raw(&raw)?;
    let gap = opts.clearance * w.min(h);
    let mut placed = 0;
    let mut attempts = 0;
    while placed < opts.interior_points && attempts < 1000 * (opts.interior_points + 1) {
        attempts += 1;
        let p = Point2::new(rng.gen_range(0.0..w), rng.gen_range(0.0..h));
        let near_vertex = sub.vertices().iter().any(|v| v.dist(p) < gap);
        let near_edge = sub.edges().iter().any(|e| {
            let a = sub.point(e.ends[0]);
            let b = sub.point(e.ends[1]);
            point_segment_distance(p, a, b).0 < gap
        });
        if near_vertex || near_edge {
            continue;
        }
        sub = sub.insert_point(p, 0.0)?.0;
        sub = delaunay_flips(&sub)?;
        placed += 1;
    }
    let mut raw = sub.to_raw();
    for f in &mut raw.faces {
        f.weight = rng.gen_range(opts.min_weight..=opts.max_weight) as f64;
    }
    PlanarSubdivision::from_raw(&raw)
}

fn in_circle(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let (ax, ay) = (a.x - d.x, a.y - d.y);
    let (bx, by) = (b.x - d.x, b.y - d.y);
    let (cx, cy) = (c.x - d.x, c.y - d.y);
    let det = (ax * ax + ay * ay) * (bx * cy - cx * by) - (bx * bx + by * by) * (ax * cy - cx * ay)
        + (cx * cx + cy * cy) * (ax * by - bx * ay);
    det > 1e-12 * (ax * ax + ay * ay + bx * bx + by * by + cx * cx + cy * cy).powi(2)
}

/// Lawson flips until every interior edge is locally Delaunay. Weights are
/// ignored (all faces still have the same weight at this point).
fn delaunay_flips(sub: &PlanarSubdivision) -> Result<PlanarSubdivision, MeshError> {
    let mut raw = sub.to_raw();
    let pts = raw.vertices.clone();
    for _ in 0..1000 {
        let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, f) in raw.faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (f.vertices[k], f.vertices[(k + 1) % 3]);
                by_edge.entry((a.min(b), a.max(b))).or_default().push(i);
            }
        }
        let mut keys: Vec<_> = by_edge.keys().copied().collect();
        keys.sort_unstable();
        let flip = keys.into_iter().find_map(|(a, b)| {
            let fs = &by_edge[&(a, b)];
            if fs.len() != 2 {
                return None;
            }
            let apex = |f: usize| {
                *raw.faces[f]
                    .vertices
                    .iter()
                    .find(|&&v| v != a && v != b)
                    .expect("apex")
            };
            let (c, d) = (apex(fs[0]), apex(fs[1]));
            let (pa, pb, pc, pd) = (pts[a], pts[b], pts[c], pts[d]);
            let (pa, pb) = if orient(pa, pb, pc) > 0.0 {
                (pa, pb)
            } else {
                (pb, pa)
            };
            let convex = orient(pc, pd, pa) * orient(pc, pd, pb) < 0.0;
            (convex && in_circle(pa, pb, pc, pd)).then_some((fs[0], fs[1], a, b, c, d))
        });
        let Some((f0, f1, a, b, c, d)) = flip else {
            return PlanarSubdivision::from_raw(&raw);
        };
        raw.faces[f0].vertices = [c, d, a];
        raw.faces[f1].vertices = [d, c, b];
    }
    PlanarSubdivision::from_raw(&raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_valid() {
        let opts = GenOptions::default();
        let a = random_mesh(7, &opts).unwrap();
        let b = random_mesh(7, &opts).unwrap();
        assert_eq!(a.to_raw(), b.to_raw());
        assert_eq!(a.vertex_count(), 4 + opts.interior_points);
        assert_eq!(a.faces().len(), 2 + 2 * opts.interior_points);
        assert!(a.validate().issues.is_empty());
    }
}
