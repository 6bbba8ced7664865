use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{refract, refract_direction, Angle, EdgeFrame, RefractionOutcome};
use crate::geometry::{orient, ray_line_hit, Point2, Vec2};
use crate::subdivision::{EdgeId, FaceId, PlanarSubdivision, VertexId};

/// Slack on edge parameters when deciding that a ray crosses an edge.
const EDGE_PARAM_TOL: f64 = 1e-12;

/// One edge crossing of a traced ray.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub edge: EdgeId,
    pub point: Point2,
    /// Position along the edge, 0 at `ends[0]`, 1 at `ends[1]`.
    pub param: f64,
    pub incidence: Angle,
    pub outcome: RefractionOutcome,
    /// Face entered; `None` when the ray stops here.
    pub entered: Option<FaceId>,
    /// Weighted length from the start to this crossing.
    pub weighted: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TerminalCause {
    HitVertex { vertex: VertexId },
    BeyondCritical { edge: EdgeId, point: Point2 },
    Boundary { edge: EdgeId, point: Point2 },
    CrossingCap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub start: Point2,
    pub dir: Vec2,
    pub start_face: FaceId,
    pub crossings: Vec<Crossing>,
    pub end: Point2,
    pub end_face: FaceId,
    pub weighted_length: f64,
    pub terminal: TerminalCause,
}

#[derive(Debug, Error, PartialEq)]
pub enum TraceError {
    #[error("start point {0} is not in face {1}")]
    StartOutsideFace(Point2, FaceId),
    #[error("direction is not a unit vector")]
    NotUnit,
    #[error("ray has no exit from face {0}")]
    NoExit(FaceId),
}

/// Exit of a ray from a triangle: edge, hit point, edge parameter and
/// Euclidean distance from the ray's position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exit {
    pub edge: EdgeId,
    pub point: Point2,
    pub param: f64,
    pub dist: f64,
}

/// First edge of `face` hit by the ray, skipping `skip` and edges the ray
/// starts on.
pub fn face_exit(
    sub: &PlanarSubdivision,
    face: FaceId,
    pos: Point2,
    dir: Vec2,
    skip: Option<EdgeId>,
) -> Option<Exit> {
    let scale = sub.stats().max_edge_length;
    let mut best: Option<((f64, f64), Exit)> = None;
    for &e in &sub.face(face).edges {
        if Some(e) == skip {
            continue;
        }
        let (a, b) = sub.edge_points(e);
        let Some((s, u)) = ray_line_hit(pos, dir, a, b) else {
            continue;
        };
        if s <= 1e-13 * scale {
            continue;
        }
        // Rounding can put a grazing hit marginally outside the segment.
        let outside = (-u).max(u - 1.0).max(0.0);
        if outside > 1e-9 {
            continue;
        }
        let uc = u.clamp(0.0, 1.0);
        let cand = Exit {
            edge: e,
            point: a.lerp(b, uc),
            param: uc,
            dist: s,
        };
        let rank = (outside, s);
        if best.as_ref().is_none_or(|(r, _)| rank < *r) {
            best = Some((rank, cand));
        }
    }
    best.map(|(_, x)| x)
}

fn contains(sub: &PlanarSubdivision, f: FaceId, p: Point2) -> bool {
    let [a, b, c] = sub.face_points(f);
    let area = orient(a, b, c);
    let tol = 1e-9;
    orient(a, b, p) / area >= -tol
        && orient(b, c, p) / area >= -tol
        && orient(c, a, p) / area >= -tol
}

/// Traces a ray through the subdivision, refracting at every interior edge,
/// until it hits a vertex, a boundary edge, an edge beyond its critical
/// angle, or `cap` crossings.
pub fn trace_ray(
    sub: &PlanarSubdivision,
    start: Point2,
    dir: Vec2,
    start_face: FaceId,
    cap: usize,
    vertex_snap_tol: f64,
) -> Result<TraceRecord, TraceError> {
    if (dir.norm() - 1.0).abs() > 1e-12 {
        return Err(TraceError::NotUnit);
    }
    if start_face >= sub.faces().len() || !contains(sub, start_face, start) {
        return Err(TraceError::StartOutsideFace(start, start_face));
    }
    let mut pos = start;
    let mut d = dir;
    let mut face = start_face;
    let mut skip = None;
    let mut total = 0.0;
    let mut crossings = Vec::new();
    let terminal = loop {
        if crossings.len() >= cap {
            break TerminalCause::CrossingCap;
        }
        let exit = face_exit(sub, face, pos, d, skip).ok_or(TraceError::NoExit(face))?;
        let alpha = sub.face(face).weight;
        total += alpha as f64 * exit.dist;
        let edge = sub.edge(exit.edge);
        let frame = EdgeFrame::new(sub, exit.edge, face);
        let incidence = frame.incidence(d);
        pos = exit.point;
        let near_end = [0usize, 1]
            .into_iter()
            .find(|&k| sub.point(edge.ends[k]).dist(pos) <= vertex_snap_tol);
        if let Some(k) = near_end {
            let v = edge.ends[k];
            pos = sub.point(v);
            break TerminalCause::HitVertex { vertex: v };
        }
        let Some(next) = sub.other_face(exit.edge, face) else {
            crossings.push(Crossing {
                edge: exit.edge,
                point: pos,
                param: exit.param,
                incidence,
                outcome: RefractionOutcome::Refracted(incidence),
                entered: None,
                weighted: total,
            });
            break TerminalCause::Boundary {
                edge: exit.edge,
                point: pos,
            };
        };
        let beta = sub.face(next).weight;
        let outcome = refract(incidence, alpha, beta);
        let passes = outcome.exit().is_some();
        crossings.push(Crossing {
            edge: exit.edge,
            point: pos,
            param: exit.param,
            incidence,
            outcome,
            entered: passes.then_some(next),
            weighted: total,
        });
        if !passes {
            break TerminalCause::BeyondCritical {
                edge: exit.edge,
                point: pos,
            };
        }
        d = match refract_direction(&frame, d, alpha, beta) {
            Some(nd) => nd,
            None => {
                break TerminalCause::BeyondCritical {
                    edge: exit.edge,
                    point: pos,
                }
            }
        };
        face = next;
        skip = Some(exit.edge);
    };
    Ok(TraceRecord {
        start,
        dir,
        start_face,
        crossings,
        end: pos,
        end_face: face,
        weighted_length: total,
        terminal,
    })
}

/// State after following a prescribed edge sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct Walk {
    /// Crossing points and edge parameters, one per sequence edge.
    pub points: Vec<(Point2, f64)>,
    /// Direction after the last crossing.
    pub dir: Vec2,
    /// Face entered after the last crossing (the start face for an empty
    /// sequence).
    pub face: FaceId,
    /// Weighted length from the start to the last crossing.
    pub weighted: f64,
    /// Direction just before the last crossing (the start direction for an
    /// empty sequence).
    pub dir_before_last: Vec2,
}

impl Walk {
    pub fn last_point(&self, start: Point2) -> Point2 {
        self.points.last().map_or(start, |p| p.0)
    }
}

#[derive(Clone, Copy, Debug, Error, PartialEq)]
pub enum WalkError {
    #[error("edge {index} of the sequence is not a side of the current face")]
    NotAdjacent { index: usize },
    #[error("ray misses edge {index} of the sequence")]
    LeftSequence { index: usize },
    #[error("ray is at or beyond the critical angle at edge {index}")]
    Blocked { index: usize },
}

/// Follows a ray through `edges` in order, refracting at each. When
/// `stop_before_last_refraction` is set the final edge is struck but not
/// crossed (its crossing point is still recorded).
pub fn walk_sequence(
    sub: &PlanarSubdivision,
    start: Point2,
    dir: Vec2,
    face: FaceId,
    edges: &[EdgeId],
    stop_before_last_refraction: bool,
) -> Result<Walk, WalkError> {
    let mut pos = start;
    let mut d = dir;
    let mut before = dir;
    let mut f = face;
    let mut weighted = 0.0;
    let mut points = Vec::with_capacity(edges.len());
    for (index, &e) in edges.iter().enumerate() {
        if !sub.face(f).edges.contains(&e) {
            return Err(WalkError::NotAdjacent { index });
        }
        let (a, b) = sub.edge_points(e);
        let (s, u) = ray_line_hit(pos, d, a, b).ok_or(WalkError::LeftSequence { index })?;
        if s <= 0.0 || !(-EDGE_PARAM_TOL..=1.0 + EDGE_PARAM_TOL).contains(&u) {
            return Err(WalkError::LeftSequence { index });
        }
        let alpha = sub.face(f).weight;
        weighted += alpha as f64 * s;
        pos = a.lerp(b, u);
        points.push((pos, u));
        before = d;
        if stop_before_last_refraction && index + 1 == edges.len() {
            break;
        }
        let next = sub
            .other_face(e, f)
            .ok_or(WalkError::LeftSequence { index })?;
        let frame = EdgeFrame::new(sub, e, f);
        d = refract_direction(&frame, d, alpha, sub.face(next).weight)
            .ok_or(WalkError::Blocked { index })?;
        f = next;
    }
    Ok(Walk {
        points,
        dir: d,
        face: f,
        weighted,
        dir_before_last: before,
    })
}

/// Input to [`find_hit_at_angle`].
#[derive(Clone, Debug)]
pub struct HitQuery<'a> {
    pub origin: Point2,
    pub origin_face: FaceId,
    /// Edges crossed from `origin_face`, ending with the target edge.
    pub edges: &'a [EdgeId],
    /// Required incidence at the target edge.
    pub theta: Angle,
    /// Sign of the tangential component (along `ends[0] → ends[1]`) of the
    /// arriving ray, taken from the reference ray.
    pub tangent_sign: f64,
    /// Accepted interval of the target edge parameter.
    pub interval: (f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HitAtAngle {
    pub point: Point2,
    pub param: f64,
    pub launch_dir: Vec2,
    /// Incidence at the target edge as realized by the forward trace.
    pub incidence: Angle,
    /// Weighted length from the origin to the hit point.
    pub weighted: f64,
}

/// Solves backwards through the edge sequence for the launch direction that
/// arrives at the target edge at the required angle, then traces forwards
/// and returns the hit if it stays on the sequence and inside the interval.
pub fn find_hit_at_angle(sub: &PlanarSubdivision, q: &HitQuery<'_>) -> Option<HitAtAngle> {
    let (&target, prefix) = q.edges.split_last()?;
    let mut faces = Vec::with_capacity(q.edges.len());
    let mut f = q.origin_face;
    for &e in q.edges {
        if !sub.face(f).edges.contains(&e) {
            return None;
        }
        faces.push(f);
        f = match sub.other_face(e, f) {
            Some(g) => g,
            None if e == target => f,
            None => return None,
        };
    }

    let last_face = *faces.last()?;
    let frame = EdgeFrame::new(sub, target, last_face);
    let th = q.theta.radians();
    let mut d: Vec2 =
        frame.normal * th.cos() + frame.tangent * (q.tangent_sign.signum() * th.sin());
    for (k, &e) in prefix.iter().enumerate().rev() {
        let fr = EdgeFrame::new(sub, e, faces[k]);
        let t = d.dot(fr.tangent) * sub.face(faces[k + 1]).weight as f64
            / sub.face(faces[k]).weight as f64;
        if t.abs() >= 1.0 {
            return None;
        }
        d = fr.tangent * t + fr.normal * (1.0 - t * t).sqrt();
    }

    let walk = walk_sequence(sub, q.origin, d, q.origin_face, q.edges, true).ok()?;
    let (point, param) = *walk.points.last()?;
    let (lo, hi) = (
        q.interval.0.min(q.interval.1),
        q.interval.0.max(q.interval.1),
    );
    if param < lo - EDGE_PARAM_TOL || param > hi + EDGE_PARAM_TOL {
        return None;
    }
    Some(HitAtAngle {
        point,
        param,
        launch_dir: d,
        incidence: frame.incidence(walk.dir_before_last),
        weighted: walk.weighted,
    })
}
