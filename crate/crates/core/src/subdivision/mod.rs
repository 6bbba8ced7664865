//! Weighted triangulated planar subdivisions: the immutable mesh model,
//! adjacency queries, validation and the text mesh format.

mod generate;
mod io;
mod validate;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{orient, Point2};

pub use generate::{random_mesh, GenOptions};
pub use io::{parse_mesh, parse_raw_mesh, serialize_mesh};
pub use validate::{validate, Issue, ValidationReport};

pub type VertexId = usize;
pub type FaceId = usize;
pub type EdgeId = usize;

/// A triangle as written in a mesh file, before any validation.
#[derive(Clone, Debug, PartialEq)]
pub struct RawFace {
    pub vertices: [usize; 3],
    pub weight: f64,
    /// 1-based source line, or 0 when built in memory.
    pub line: usize,
}

/// Unvalidated mesh contents.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawMesh {
    pub vertices: Vec<Point2>,
    pub faces: Vec<RawFace>,
}

impl RawMesh {
    pub fn push_vertex(&mut self, p: Point2) -> usize {
        self.vertices.push(p);
        self.vertices.len() - 1
    }

    pub fn push_face(&mut self, a: usize, b: usize, c: usize, weight: u32) {
        self.faces.push(RawFace {
            vertices: [a, b, c],
            weight: weight as f64,
            line: 0,
        });
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    /// Counter-clockwise corners.
    pub vertices: [VertexId; 3],
    pub weight: u32,
    /// `edges[k]` is the edge opposite `vertices[k]`.
    pub edges: [EdgeId; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    /// Endpoints with `ends[0] < ends[1]`.
    pub ends: [VertexId; 2],
    /// One incident face on the boundary, two in the interior.
    pub faces: Vec<FaceId>,
    pub length: f64,
    pub weight: u32,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.faces.len() == 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshStats {
    pub n: usize,
    pub faces: usize,
    pub edges: usize,
    /// Maximum edge length.
    pub max_edge_length: f64,
    pub min_weight: u32,
    pub max_weight: u32,
}

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid subdivision: {0}")]
    Invalid(ValidationReport),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("unknown face {0}")]
    UnknownFace(usize),
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("edge {edge} is not a side of face {face}")]
    NotIncident { edge: EdgeId, face: FaceId },
    #[error("point {0} lies outside the subdivision")]
    OutsideDomain(Point2),
}

/// A validated weighted triangulation. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarSubdivision {
    vertices: Vec<Point2>,
    faces: Vec<Face>,
    edges: Vec<Edge>,
    vertex_faces: Vec<Vec<FaceId>>,
    vertex_edges: Vec<Vec<EdgeId>>,
    edge_index: HashMap<(VertexId, VertexId), EdgeId>,
    stats: MeshStats,
}

impl PlanarSubdivision {
    /// Validates `raw` and derives edges, adjacency and statistics.
    /// Clockwise faces are reoriented.
    pub fn from_raw(raw: &RawMesh) -> Result<Self, MeshError> {
        let report = validate(raw);
        if !report.is_empty() {
            return Err(MeshError::Invalid(report));
        }
        Ok(Self::build_unchecked(raw))
    }

    fn build_unchecked(raw: &RawMesh) -> Self {
        let vertices = raw.vertices.clone();
        let mut faces = Vec::with_capacity(raw.faces.len());
        let mut edges: Vec<Edge> = Vec::new();
        let mut edge_index = HashMap::new();
        let mut vertex_faces = vec![Vec::new(); vertices.len()];
        let mut vertex_edges = vec![Vec::new(); vertices.len()];

        for (fid, rf) in raw.faces.iter().enumerate() {
            let [a, b, c] = rf.vertices;
            let corners = if orient(vertices[a], vertices[b], vertices[c]) > 0.0 {
                [a, b, c]
            } else {
                [a, c, b]
            };
            let weight = rf.weight as u32;
            let mut fe = [0; 3];
            for k in 0..3 {
                let p = corners[(k + 1) % 3];
                let q = corners[(k + 2) % 3];
                let key = (p.min(q), p.max(q));
                let eid = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        ends: [key.0, key.1],
                        faces: Vec::new(),
                        length: vertices[key.0].dist(vertices[key.1]),
                        weight: u32::MAX,
                    });
                    vertex_edges[key.0].push(edges.len() - 1);
                    vertex_edges[key.1].push(edges.len() - 1);
                    edges.len() - 1
                });
                edges[eid].faces.push(fid);
                edges[eid].weight = edges[eid].weight.min(weight);
                fe[k] = eid;
            }
            for &v in &corners {
                vertex_faces[v].push(fid);
            }
            faces.push(Face {
                vertices: corners,
                weight,
                edges: fe,
            });
        }

        let stats = MeshStats {
            n: vertices.len(),
            faces: faces.len(),
            edges: edges.len(),
            max_edge_length: edges.iter().map(|e| e.length).fold(0.0, f64::max),
            min_weight: faces.iter().map(|f| f.weight).min().unwrap_or(1),
            max_weight: faces.iter().map(|f| f.weight).max().unwrap_or(1),
        };

        Self {
            vertices,
            faces,
            edges,
            vertex_faces,
            vertex_edges,
            edge_index,
            stats,
        }
    }

    /// The raw form this subdivision serializes to.
    pub fn to_raw(&self) -> RawMesh {
        RawMesh {
            vertices: self.vertices.clone(),
            faces: self
                .faces
                .iter()
                .map(|f| RawFace {
                    vertices: f.vertices,
                    weight: f.weight as f64,
                    line: 0,
                })
                .collect(),
        }
    }

    /// Re-runs validation on the stored contents; always empty for a value
    /// built through [`PlanarSubdivision::from_raw`].
    pub fn validate(&self) -> ValidationReport {
        validate(&self.to_raw())
    }

    pub fn stats(&self) -> &MeshStats {
        &self.stats
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Unchecked accessors used on hot paths; identifiers come from the mesh.
    pub fn point(&self, v: VertexId) -> Point2 {
        self.vertices[v]
    }

    pub fn face(&self, f: FaceId) -> &Face {
        &self.faces[f]
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn edge_points(&self, e: EdgeId) -> (Point2, Point2) {
        let [a, b] = self.edges[e].ends;
        (self.vertices[a], self.vertices[b])
    }

    pub fn face_points(&self, f: FaceId) -> [Point2; 3] {
        self.faces[f].vertices.map(|v| self.vertices[v])
    }

    pub fn find_edge(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.edge_index.get(&(a.min(b), a.max(b))).copied()
    }

    /// The face across `e` from `f`, if `e` is interior.
    pub fn other_face(&self, e: EdgeId, f: FaceId) -> Option<FaceId> {
        self.edges[e].faces.iter().copied().find(|&g| g != f)
    }

    /// The corner of `f` not on `e`.
    pub fn apex(&self, e: EdgeId, f: FaceId) -> VertexId {
        let face = &self.faces[f];
        let k = face
            .edges
            .iter()
            .position(|&x| x == e)
            .expect("edge of face");
        face.vertices[k]
    }

    /// The vertex shared by two distinct edges.
    pub fn shared_vertex(&self, e1: EdgeId, e2: EdgeId) -> Option<VertexId> {
        let [a, b] = self.edges[e1].ends;
        let other = self.edges[e2].ends;
        [a, b].into_iter().find(|v| other.contains(v))
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), MeshError> {
        (v < self.vertices.len())
            .then_some(())
            .ok_or(MeshError::UnknownVertex(v))
    }

    fn check_face(&self, f: FaceId) -> Result<(), MeshError> {
        (f < self.faces.len())
            .then_some(())
            .ok_or(MeshError::UnknownFace(f))
    }

    fn check_edge(&self, e: EdgeId) -> Result<(), MeshError> {
        (e < self.edges.len())
            .then_some(())
            .ok_or(MeshError::UnknownEdge(e))
    }

    pub fn faces_of_edge(&self, e: EdgeId) -> Result<&[FaceId], MeshError> {
        self.check_edge(e)?;
        Ok(&self.edges[e].faces)
    }

    pub fn edges_of_face(&self, f: FaceId) -> Result<[EdgeId; 3], MeshError> {
        self.check_face(f)?;
        Ok(self.faces[f].edges)
    }

    pub fn faces_of_vertex(&self, v: VertexId) -> Result<&[FaceId], MeshError> {
        self.check_vertex(v)?;
        Ok(&self.vertex_faces[v])
    }

    pub fn edges_of_vertex(&self, v: VertexId) -> Result<&[EdgeId], MeshError> {
        self.check_vertex(v)?;
        Ok(&self.vertex_edges[v])
    }

    pub fn opposite_vertex(&self, e: EdgeId, f: FaceId) -> Result<VertexId, MeshError> {
        self.check_edge(e)?;
        self.check_face(f)?;
        if !self.faces[f].edges.contains(&e) {
            return Err(MeshError::NotIncident { edge: e, face: f });
        }
        Ok(self.apex(e, f))
    }

    /// Face whose closure contains `p`, with barycentric slack `tol`.
    pub fn locate(&self, p: Point2, tol: f64) -> Option<FaceId> {
        self.faces.iter().position(|f| {
            let [a, b, c] = f.vertices.map(|v| self.vertices[v]);
            let area = orient(a, b, c);
            orient(a, b, p) / area >= -tol
                && orient(b, c, p) / area >= -tol
                && orient(c, a, p) / area >= -tol
        })
    }

    /// Returns a subdivision in which `p` is a vertex. A point inside a face
    /// splits it into three triangles of the same weight; a point on an edge
    /// splits the edge and both incident faces. A point within `snap` of an
    /// existing vertex reuses it.
    pub fn insert_point(&self, p: Point2, snap: f64) -> Result<(Self, VertexId), MeshError> {
        if !p.is_finite() {
            return Err(MeshError::OutsideDomain(p));
        }
        if let Some(v) = (0..self.vertices.len()).find(|&v| self.vertices[v].dist(p) <= snap) {
            return Ok((self.clone(), v));
        }
        let f = self.locate(p, 1e-12).ok_or(MeshError::OutsideDomain(p))?;
        let mut raw = self.to_raw();
        let nv = raw.push_vertex(p);

        let on_edge = self.faces[f].edges.iter().copied().find(|&e| {
            let (a, b) = self.edge_points(e);
            crate::geometry::point_segment_distance(p, a, b).0 <= snap
        });
        let split: Vec<FaceId> = match on_edge {
            Some(e) => self.edges[e].faces.clone(),
            None => vec![f],
        };
        let mut keep: Vec<RawFace> = raw
            .faces
            .iter()
            .enumerate()
            .filter(|(i, _)| !split.contains(i))
            .map(|(_, rf)| rf.clone())
            .collect();
        for &g in &split {
            let face = &self.faces[g];
            for k in 0..3 {
                if on_edge == Some(face.edges[k]) {
                    continue;
                }
                let a = face.vertices[(k + 1) % 3];
                let b = face.vertices[(k + 2) % 3];
                keep.push(RawFace {
                    vertices: [a, b, nv],
                    weight: face.weight as f64,
                    line: 0,
                });
            }
        }
        raw.faces = keep;
        Ok((Self::from_raw(&raw)?, nv))
    }
}

impl fmt::Display for MeshStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} faces={} edges={} L={} w={} W={}",
            self.n, self.faces, self.edges, self.max_edge_length, self.min_weight, self.max_weight
        )
    }
}
