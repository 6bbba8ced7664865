use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::RawMesh;
use crate::geometry::{orient, point_segment_distance, segments_cross};

/// One violated subdivision invariant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Issue {
    TooFewVertices {
        count: usize,
    },
    NoFaces,
    NonFiniteCoordinate {
        vertex: usize,
    },
    UnknownVertex {
        face: usize,
        vertex: usize,
    },
    DegenerateFace {
        face: usize,
    },
    WeightBelowOne {
        face: usize,
        weight: f64,
    },
    NonIntegerWeight {
        face: usize,
        weight: f64,
    },
    NonManifoldEdge {
        a: usize,
        b: usize,
        faces: Vec<usize>,
    },
    FoldedEdge {
        a: usize,
        b: usize,
    },
    CrossingEdges {
        first: [usize; 2],
        second: [usize; 2],
    },
    VertexOnEdge {
        vertex: usize,
        a: usize,
        b: usize,
    },
    VertexInsideFace {
        vertex: usize,
        face: usize,
    },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::TooFewVertices { count } => {
                write!(f, "too few vertices: {count} (need at least 3)")
            }
            Issue::NoFaces => write!(f, "no faces"),
            Issue::NonFiniteCoordinate { vertex } => {
                write!(f, "non-finite coordinate at vertex {vertex}")
            }
            Issue::UnknownVertex { face, vertex } => {
                write!(f, "face {face} references unknown vertex {vertex}")
            }
            Issue::DegenerateFace { face } => write!(f, "degenerate face {face}"),
            Issue::WeightBelowOne { face, weight } => {
                write!(f, "weight below 1 on face {face} ({weight})")
            }
            Issue::NonIntegerWeight { face, weight } => {
                write!(f, "non-integer weight on face {face} ({weight})")
            }
            Issue::NonManifoldEdge { a, b, faces } => {
                write!(f, "non-manifold edge {a}-{b} shared by faces {faces:?}")
            }
            Issue::FoldedEdge { a, b } => {
                write!(f, "folded edge {a}-{b}: both faces lie on one side")
            }
            Issue::CrossingEdges { first, second } => write!(
                f,
                "crossing edges {}-{} and {}-{}",
                first[0], first[1], second[0], second[1]
            ),
            Issue::VertexOnEdge { vertex, a, b } => {
                write!(f, "vertex {vertex} lies on edge {a}-{b}")
            }
            Issue::VertexInsideFace { vertex, face } => {
                write!(f, "vertex {vertex} lies inside face {face}")
            }
        }
    }
}

/// Every problem found in a mesh; empty iff the mesh is a valid subdivision.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn len(&self) -> usize {
        self.issues.len()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.issues.len();
        write!(f, "{n} issue{}", if n == 1 { "" } else { "s" })?;
        for issue in &self.issues {
            write!(f, "\n  {issue}")?;
        }
        Ok(())
    }
}

/// Checks every subdivision invariant on unvalidated mesh contents.
pub fn validate(raw: &RawMesh) -> ValidationReport {
    let mut issues = Vec::new();
    let nv = raw.vertices.len();
    if nv < 3 {
        issues.push(Issue::TooFewVertices { count: nv });
    }
    if raw.faces.is_empty() {
        issues.push(Issue::NoFaces);
    }
    let mut finite = vec![true; nv];
    for (v, p) in raw.vertices.iter().enumerate() {
        if !p.is_finite() {
            finite[v] = false;
            issues.push(Issue::NonFiniteCoordinate { vertex: v });
        }
    }

    let scale = raw
        .vertices
        .iter()
        .filter(|p| p.is_finite())
        .fold(0.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs()))
        .max(f64::MIN_POSITIVE);
    let area_tol = 1e-14 * scale * scale;
    let dist_tol = 1e-12 * scale;

    // Faces that survive the per-face checks, as counter-clockwise triples.
    let mut good: Vec<(usize, [usize; 3])> = Vec::new();
    for (fid, rf) in raw.faces.iter().enumerate() {
        let mut ok = true;
        for &v in &rf.vertices {
            if v >= nv {
                issues.push(Issue::UnknownVertex {
                    face: fid,
                    vertex: v,
                });
                ok = false;
            }
        }
        if rf.weight.is_nan() || rf.weight < 1.0 {
            issues.push(Issue::WeightBelowOne {
                face: fid,
                weight: rf.weight,
            });
        } else if rf.weight.fract() != 0.0 || rf.weight > u32::MAX as f64 {
            issues.push(Issue::NonIntegerWeight {
                face: fid,
                weight: rf.weight,
            });
        }
        if !ok {
            continue;
        }
        let [a, b, c] = rf.vertices;
        if !(finite[a] && finite[b] && finite[c]) {
            continue;
        }
        let area = orient(raw.vertices[a], raw.vertices[b], raw.vertices[c]);
        if a == b || b == c || a == c || area.abs() <= area_tol {
            issues.push(Issue::DegenerateFace { face: fid });
            continue;
        }
        good.push((fid, if area > 0.0 { [a, b, c] } else { [a, c, b] }));
    }

    let mut edge_faces: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for &(fid, corners) in &good {
        for k in 0..3 {
            let p = corners[(k + 1) % 3];
            let q = corners[(k + 2) % 3];
            edge_faces
                .entry((p.min(q), p.max(q)))
                .or_default()
                .push((fid, corners[k]));
        }
    }
    for (&(a, b), fs) in &edge_faces {
        if fs.len() > 2 {
            issues.push(Issue::NonManifoldEdge {
                a,
                b,
                faces: fs.iter().map(|x| x.0).collect(),
            });
        } else if fs.len() == 2 {
            let (pa, pb) = (raw.vertices[a], raw.vertices[b]);
            let s1 = orient(pa, pb, raw.vertices[fs[0].1]);
            let s2 = orient(pa, pb, raw.vertices[fs[1].1]);
            if s1 * s2 > 0.0 {
                issues.push(Issue::FoldedEdge { a, b });
            }
        }
    }

    let edges: Vec<(usize, usize)> = edge_faces.keys().copied().collect();
    for (i, &(a, b)) in edges.iter().enumerate() {
        for &(c, d) in &edges[i + 1..] {
            if a == c || a == d || b == c || b == d {
                continue;
            }
            let v = &raw.vertices;
            if segments_cross(v[a], v[b], v[c], v[d], area_tol) {
                issues.push(Issue::CrossingEdges {
                    first: [a, b],
                    second: [c, d],
                });
            }
        }
    }

    let used: Vec<bool> = {
        let mut u = vec![false; nv];
        for &(_, c) in &good {
            for v in c {
                u[v] = true;
            }
        }
        u
    };
    for v in 0..nv {
        if !used[v] || !finite[v] {
            continue;
        }
        let p = raw.vertices[v];
        for &(a, b) in &edges {
            if v == a || v == b {
                continue;
            }
            if point_segment_distance(p, raw.vertices[a], raw.vertices[b]).0 <= dist_tol {
                issues.push(Issue::VertexOnEdge { vertex: v, a, b });
            }
        }
        for &(fid, [a, b, c]) in &good {
            if v == a || v == b || v == c {
                continue;
            }
            let (pa, pb, pc) = (raw.vertices[a], raw.vertices[b], raw.vertices[c]);
            if orient(pa, pb, p) > area_tol
                && orient(pb, pc, p) > area_tol
                && orient(pc, pa, p) > area_tol
            {
                issues.push(Issue::VertexInsideFace {
                    vertex: v,
                    face: fid,
                });
            }
        }
    }

    ValidationReport { issues }
}
