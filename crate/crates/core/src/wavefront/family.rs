//! Logical ray families, trees of rays and critical segments.

use serde::{Deserialize, Serialize};

use crate::geometry::{Point2, Vec2};
use crate::subdivision::{EdgeId, FaceId, VertexId};

/// How a ray came into existence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceType {
    /// Fanned out from a vertex.
    Vertex,
    /// Critically reflected off a critical segment.
    Critseg,
    /// Steiner ray from a critical point of entry.
    Critptentry,
}

/// A one-parameter family of rays. Integer parameters are the discrete rays
/// of the fan; real parameters in between are used only for exact solves.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyKind {
    /// Rays from a vertex at absolute angle `(param + 0.5) · step`.
    VertexFan {
        vertex: VertexId,
        origin: Point2,
        step: f64,
    },
    /// Rays from `origin` at angle `psi0 + param · step` measured from
    /// `along` towards `normal`.
    Steiner {
        origin: Point2,
        psi0: f64,
        step: f64,
        along: Vec2,
        normal: Vec2,
    },
    /// Parallel rays leaving `start + along · param · spacing / edge_weight`
    /// in direction `dir`; consecutive rays are `spacing` apart in weighted
    /// length along the segment.
    CritSeg {
        start: Point2,
        along: Vec2,
        dir: Vec2,
        spacing: f64,
        edge_weight: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Family {
    pub kind: FamilyKind,
    /// Face every ray starts in.
    pub face: FaceId,
    /// Edge the origin lies on, skipped when looking for the first exit.
    pub host_edge: Option<EdgeId>,
    /// Weighted distance from the global source at the origin of ray 0.
    pub base: f64,
    pub tree: usize,
    pub node: usize,
    /// Critical segment that spawned this family.
    pub segment: Option<usize>,
}

impl Family {
    pub fn source_type(&self) -> SourceType {
        match self.kind {
            FamilyKind::VertexFan { .. } => SourceType::Vertex,
            FamilyKind::Steiner { .. } => SourceType::Critptentry,
            FamilyKind::CritSeg { .. } => SourceType::Critseg,
        }
    }

    pub fn origin(&self, param: f64) -> Point2 {
        match self.kind {
            FamilyKind::VertexFan { origin, .. } | FamilyKind::Steiner { origin, .. } => origin,
            FamilyKind::CritSeg {
                start,
                along,
                spacing,
                edge_weight,
                ..
            } => start + along * (param * spacing / edge_weight),
        }
    }

    pub fn dir(&self, param: f64) -> Vec2 {
        match self.kind {
            FamilyKind::VertexFan { step, .. } => Point2::from_angle((param + 0.5) * step),
            FamilyKind::Steiner {
                psi0,
                step,
                along,
                normal,
                ..
            } => {
                let (s, c) = (psi0 + param * step).sin_cos();
                along * c + normal * s
            }
            FamilyKind::CritSeg { dir, .. } => dir,
        }
    }

    /// Weighted distance from the global source at the ray's origin.
    pub fn base_dist(&self, param: f64) -> f64 {
        match self.kind {
            FamilyKind::CritSeg { spacing, .. } => self.base + param * spacing,
            _ => self.base,
        }
    }

    /// Whether all rays share one origin point.
    pub fn is_point_source(&self) -> bool {
        !matches!(self.kind, FamilyKind::CritSeg { .. })
    }

    /// Continuous parameter of the ray leaving in direction `d`, chosen
    /// nearest to `near` for angular families.
    pub fn param_of_dir(&self, d: Vec2, near: f64) -> Option<f64> {
        match self.kind {
            FamilyKind::VertexFan { step, .. } => {
                let base = (near + 0.5) * step;
                let mut delta = d.angle() - base.rem_euclid(std::f64::consts::TAU);
                delta = (delta + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU)
                    - std::f64::consts::PI;
                Some(near + delta / step)
            }
            FamilyKind::Steiner {
                psi0,
                step,
                along,
                normal,
                ..
            } => Some((d.dot(normal).atan2(d.dot(along)) - psi0) / step),
            FamilyKind::CritSeg { .. } => None,
        }
    }
}

/// Reference to one (possibly non-grid) ray of a family together with the
/// edges it has crossed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayRef {
    pub family: usize,
    pub param: f64,
    pub seq: super::engine::SeqId,
}

/// Node of a tree of rays: the root vertex or a critical point of entry.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub point: Point2,
    pub parent: Option<usize>,
    pub segment: Option<usize>,
    pub families: Vec<usize>,
}

/// All rays descending from one vertex source.
#[derive(Clone, Debug, PartialEq)]
pub struct RayTree {
    pub root: VertexId,
    pub nodes: Vec<TreeNode>,
}

/// Portion of an edge along which a critically incident path slides before
/// leaving back into the heavier face at the critical angle.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalSegment {
    pub edge: EdgeId,
    /// Critical point of entry (a vertex for segments started at one).
    pub p1: Point2,
    /// Endpoint of the edge the slide heads towards.
    pub far: VertexId,
    pub theta_c: f64,
    /// Heavier face the reflected rays return into.
    pub reflect_face: FaceId,
    /// Lighter face across the edge.
    pub light_face: FaceId,
    /// Unit vector from `p1` towards `far`.
    pub along: Vec2,
    /// Weighted spacing of the reflected rays.
    pub delta: f64,
    /// Weighted distance from the global source at `p1`.
    pub dist: f64,
    /// Ray that struck the edge at the critical angle, with the edge as the
    /// last element of its sequence. `None` when `p1` is a vertex.
    pub creator: Option<RayRef>,
    pub origin_vertex: Option<VertexId>,
    pub tree: usize,
    pub node: usize,
}
