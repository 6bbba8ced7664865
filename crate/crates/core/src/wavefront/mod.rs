//! Continuous-Dijkstra wavefront propagation over a weighted triangulation.
//!
//! Discrete rays are fanned out from every settled vertex and from every
//! critical point of entry, and critically reflected rays are emitted along
//! every critical segment. Rays are grouped into beams bounded by sibling
//! pairs; a beam is only split when its siblings leave a face through
//! different edges or disagree about passing an edge.

mod engine;
pub mod family;
mod path;
mod queue;
pub mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point2;
use crate::optics::{angular_spacing, SpacingClamp, TinyReal};
use crate::subdivision::{EdgeId, FaceId, PlanarSubdivision, VertexId};

pub use family::SourceType;
pub use path::{CrossingCheck, CrossingKind, PathPoint, PathSegment, SegmentKind};
pub use queue::{Event, EventKind, EventQueue};

/// User-facing solver parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Relative accuracy target, in `(0, 1)`.
    pub epsilon: f64,
    /// The constant `K ≥ 1` in the angular spacing.
    pub k_const: f64,
    /// Spacing of critically reflected rays; `None` selects `ε′/2`.
    pub delta: Option<f64>,
    /// Lower clamp on the angular spacing.
    pub min_angle: f64,
    /// Upper clamp on rays per full turn.
    pub max_rays: u64,
    pub max_events: u64,
    pub max_traced_rays: u64,
    /// Vertex snapping tolerance as a multiple of the longest edge.
    pub vertex_snap_factor: f64,
    /// A ray may cross one edge at most this many times `n`.
    pub edge_repeat_factor: u64,
    /// A ray tree may hold at most this many times `n²` nodes.
    pub tree_node_factor: u64,
    /// Check sibling invariants after every event.
    pub audit: bool,
    /// Locally optimize the reconstructed path.
    pub polish: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            k_const: 16.0,
            delta: None,
            min_angle: std::f64::consts::TAU / (1u64 << 20) as f64,
            max_rays: 1 << 20,
            max_events: 10_000_000,
            max_traced_rays: 1_000_000,
            vertex_snap_factor: 1e-9,
            edge_repeat_factor: 8,
            tree_node_factor: 8,
            audit: false,
            polish: true,
        }
    }
}

/// Parameters after deriving the spacing from the mesh.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EffectiveConfig {
    pub epsilon: f64,
    pub epsilon_prime: f64,
    pub k_const: f64,
    pub delta: f64,
    pub gamma_theory: TinyReal,
    pub gamma_theory_log10: f64,
    pub gamma: f64,
    pub ray_count: u64,
    pub step: f64,
    pub clamped: bool,
    pub min_angle: f64,
    pub max_rays: u64,
    pub max_events: u64,
    pub max_traced_rays: u64,
    pub vertex_snap_tol: f64,
    pub edge_repeat_factor: u64,
    pub tree_node_factor: u64,
    pub audit: bool,
    pub polish: bool,
}

impl SolverConfig {
    pub fn resolve(&self, sub: &PlanarSubdivision) -> Result<EffectiveConfig, SolverError> {
        let bad = |field: &'static str, value: f64| Err(SolverError::BadConfig { field, value });
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon", self.epsilon);
        }
        if !(self.k_const >= 1.0 && self.k_const.is_finite()) {
            return bad("k_const", self.k_const);
        }
        if !(self.min_angle > 0.0 && self.min_angle <= std::f64::consts::PI) {
            return bad("min_angle", self.min_angle);
        }
        if self.max_rays == 0 {
            return bad("max_rays", 0.0);
        }
        if !(self.vertex_snap_factor >= 0.0 && self.vertex_snap_factor.is_finite()) {
            return bad("vertex_snap_factor", self.vertex_snap_factor);
        }
        if self.edge_repeat_factor == 0 {
            return bad("edge_repeat_factor", 0.0);
        }
        if self.tree_node_factor == 0 {
            return bad("tree_node_factor", 0.0);
        }
        let stats = sub.stats();
        let clamp = SpacingClamp {
            min_angle: self.min_angle,
            max_rays: self.max_rays,
        };
        let sp = angular_spacing(stats, self.epsilon, self.k_const, clamp);
        let delta = self.delta.unwrap_or(sp.epsilon_prime / 2.0);
        if !(delta > 0.0 && delta < sp.epsilon_prime) {
            return bad("delta", delta);
        }
        Ok(EffectiveConfig {
            epsilon: self.epsilon,
            epsilon_prime: sp.epsilon_prime,
            k_const: self.k_const,
            delta,
            gamma_theory: sp.gamma_theory,
            gamma_theory_log10: sp.gamma_theory_log10,
            gamma: sp.gamma,
            ray_count: sp.ray_count,
            step: sp.step,
            clamped: sp.clamped,
            min_angle: self.min_angle,
            max_rays: self.max_rays,
            max_events: self.max_events,
            max_traced_rays: self.max_traced_rays,
            vertex_snap_tol: self.vertex_snap_factor * stats.max_edge_length,
            edge_repeat_factor: self.edge_repeat_factor,
            tree_node_factor: self.tree_node_factor,
            audit: self.audit,
            polish: self.polish,
        })
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("invalid configuration: {field} = {value}")]
    BadConfig { field: &'static str, value: f64 },
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
}

/// Which resource cap stopped a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapKind {
    Events,
    TracedRays,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    /// The target was settled.
    Complete,
    /// A cap was hit first; any reported path is the best found so far.
    Partial { cap: CapKind },
    /// The queue emptied without reaching the target.
    NoPath,
}

/// Counters collected during a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SolverStats {
    pub events_processed: u64,
    pub vertex_events: u64,
    pub strike_events: u64,
    pub critical_events: u64,
    pub vertex_sources: u64,
    pub critical_entries: u64,
    pub critical_entries_found: u64,
    pub critical_entries_nil: u64,
    pub critically_reflected: u64,
    pub splits: u64,
    pub beams_created: u64,
    pub rays_traced: u64,
    pub binary_search_probes: u64,
    pub dropped_beams: u64,
    pub late_pushes: u64,
    pub settled_improvements: u64,
    pub max_edge_repeat: u64,
    pub max_tree_nodes: u64,
    pub queue_peak: u64,
}

/// Invariant monitoring. Sibling checks only run in audit mode.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AuditReport {
    pub pop_order_violations: u64,
    pub last_key: f64,
    pub sibling_checks: u64,
    pub sibling_violations: u64,
    pub edge_repeat_violations: u64,
    pub tree_cap_hits: u64,
    /// Labels below `w·|s v|`, which no path can beat.
    pub label_floor_violations: u64,
}

/// A critical segment discovered during the run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SegmentSummary {
    pub edge: EdgeId,
    pub start: Point2,
    pub far: VertexId,
    pub theta_c: f64,
    pub reflect_face: FaceId,
}

/// Outcome of a shortest-path query.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathResult {
    #[serde(flatten)]
    pub status: Status,
    pub source: VertexId,
    pub target: VertexId,
    /// Weighted length of the reported (polished) path.
    pub cost: Option<f64>,
    /// Label of the target when it was settled or last improved.
    pub label_cost: Option<f64>,
    pub polyline: Vec<Point2>,
    pub points: Vec<PathPoint>,
    pub segments: Vec<PathSegment>,
    pub checks: Vec<CrossingCheck>,
    pub max_snell_residual: f64,
    pub max_slide_angle_error: f64,
    /// No two critical slides follow each other without a vertex between.
    pub slides_separated: bool,
    pub labels: Vec<Option<f64>>,
    pub critical_segments: Vec<SegmentSummary>,
    pub stats: SolverStats,
    pub audit: AuditReport,
    pub config: EffectiveConfig,
}

impl PathResult {
    pub fn found(&self) -> bool {
        self.cost.is_some()
    }
}

/// Approximate weighted shortest path from vertex `s` to vertex `t`.
pub fn shortest_path(
    sub: &PlanarSubdivision,
    s: VertexId,
    t: VertexId,
    cfg: &SolverConfig,
) -> Result<PathResult, SolverError> {
    let n = sub.vertex_count();
    for v in [s, t] {
        if v >= n {
            return Err(SolverError::UnknownVertex(v));
        }
    }
    let eff = cfg.resolve(sub)?;
    let mut eng = engine::Engine::new(sub, eff, s, t);
    let status = if s == t {
        eng.labels[s] = 0.0;
        eng.via[s] = engine::Via::Source;
        Status::Complete
    } else {
        eng.run()
    };
    let label_cost = eng.labels[t].is_finite().then_some(eng.labels[t]);
    let built = label_cost.and_then(|_| path::reconstruct(&eng, t));
    let mut result = PathResult {
        status,
        source: s,
        target: t,
        cost: None,
        label_cost,
        polyline: Vec::new(),
        points: Vec::new(),
        segments: Vec::new(),
        checks: Vec::new(),
        max_snell_residual: 0.0,
        max_slide_angle_error: 0.0,
        slides_separated: true,
        labels: eng
            .labels
            .iter()
            .map(|&d| d.is_finite().then_some(d))
            .collect(),
        critical_segments: eng
            .segments
            .iter()
            .map(|c| SegmentSummary {
                edge: c.edge,
                start: c.p1,
                far: c.far,
                theta_c: c.theta_c,
                reflect_face: c.reflect_face,
            })
            .collect(),
        stats: eng.stats.clone(),
        audit: eng.audit.clone(),
        config: eng.cfg.clone(),
    };
    if let Some(raw) = built {
        let fin = path::finish(sub, raw, eng.cfg.polish);
        result.cost = Some(fin.cost);
        result.polyline = fin.points.iter().map(|p| p.point()).collect();
        result.points = fin.points;
        result.segments = fin.segments;
        result.checks = fin.checks;
        result.max_snell_residual = fin.max_snell_residual;
        result.max_slide_angle_error = fin.max_slide_angle_error;
        result.slides_separated = fin.slides_separated;
    } else if status == Status::NoPath {
        result.label_cost = None;
    }
    Ok(result)
}
