//! Path reconstruction from vertex labels, local polishing and optimality
//! checks.

use serde::Serialize;

use super::engine::{Engine, Via};
use super::family::{FamilyKind, RayRef};
use crate::geometry::{ray_line_hit, Point2, Vec2};
use crate::optics::walk_sequence;
use crate::subdivision::{EdgeId, FaceId, PlanarSubdivision, VertexId};

/// A vertex of the reported polyline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathPoint {
    Vertex {
        vertex: VertexId,
        point: Point2,
    },
    /// Interior point of an edge at parameter `t` from its first endpoint.
    OnEdge {
        edge: EdgeId,
        t: f64,
        point: Point2,
    },
}

impl PathPoint {
    pub fn point(&self) -> Point2 {
        match *self {
            PathPoint::Vertex { point, .. } | PathPoint::OnEdge { point, .. } => point,
        }
    }

    pub fn is_vertex(&self) -> bool {
        matches!(self, PathPoint::Vertex { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    /// Straight piece through a face.
    Refraction,
    /// Along an edge, entered or left at an interior point.
    CriticalSlide,
    /// Along a whole edge between two vertices.
    Vertex,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathSegment {
    pub from: usize,
    pub to: usize,
    pub kind: SegmentKind,
    pub face: Option<FaceId>,
    pub edge: Option<EdgeId>,
    pub weight: u32,
    pub length: f64,
    pub cost: f64,
    /// Incidence at the start point against its edge, when it has one.
    pub angle_in: Option<f64>,
    /// Incidence at the end point against its edge, when it has one.
    pub angle_out: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingKind {
    Refraction,
    SlideEntry,
    SlideExit,
}

/// Local optimality measurement at one interior path point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrossingCheck {
    pub point: usize,
    pub edge: EdgeId,
    pub kind: CrossingKind,
    /// Snell residual `|α_in sin θ_in − α_out sin θ_out|` for refractions,
    /// `|θ − θ_c|` for slide endpoints.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct SegDesc {
    face: Option<FaceId>,
    edge: Option<EdgeId>,
    weight: u32,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct RawPath {
    points: Vec<PathPoint>,
    segs: Vec<SegDesc>,
}

impl RawPath {
    fn push(&mut self, seg: SegDesc, p: PathPoint) {
        self.segs.push(seg);
        self.points.push(p);
    }
}

pub(crate) struct Finished {
    pub points: Vec<PathPoint>,
    pub segments: Vec<PathSegment>,
    pub checks: Vec<CrossingCheck>,
    pub cost: f64,
    pub max_snell_residual: f64,
    pub max_slide_angle_error: f64,
    pub slides_separated: bool,
}

const MAX_DEPTH: usize = 100_000;

fn vertex_point(sub: &PlanarSubdivision, v: VertexId) -> PathPoint {
    PathPoint::Vertex {
        vertex: v,
        point: sub.point(v),
    }
}

fn edge_point(sub: &PlanarSubdivision, e: EdgeId, p: Point2) -> PathPoint {
    let (a, b) = sub.edge_points(e);
    let t = ((p - a).dot(b - a) / (b - a).norm_sq()).clamp(0.0, 1.0);
    PathPoint::OnEdge {
        edge: e,
        t,
        point: a.lerp(b, t),
    }
}

fn face_seg(sub: &PlanarSubdivision, f: FaceId) -> SegDesc {
    SegDesc {
        face: Some(f),
        edge: None,
        weight: sub.face(f).weight,
    }
}

fn edge_seg(sub: &PlanarSubdivision, e: EdgeId) -> SegDesc {
    SegDesc {
        face: None,
        edge: Some(e),
        weight: sub.edge(e).weight,
    }
}

/// Rebuilds the path to `v` from the labels' provenance.
pub(crate) fn reconstruct(eng: &Engine<'_>, v: VertexId) -> Option<RawPath> {
    vertex_path(eng, v, 0)
}

fn vertex_path(eng: &Engine<'_>, v: VertexId, depth: usize) -> Option<RawPath> {
    if depth > MAX_DEPTH {
        return None;
    }
    let sub = eng.sub;
    match eng.via[v] {
        Via::Unreached => None,
        Via::Source => Some(RawPath {
            points: vec![vertex_point(sub, v)],
            segs: Vec::new(),
        }),
        Via::Edge { from, edge } => {
            let mut p = vertex_path(eng, from, depth + 1)?;
            p.push(edge_seg(sub, edge), vertex_point(sub, v));
            Some(p)
        }
        Via::Ray(r) => {
            let (mut p, face, ..) = ray_path(eng, r, depth + 1)?;
            p.push(face_seg(sub, face), vertex_point(sub, v));
            Some(p)
        }
        Via::RayEdge { ray, edge } => {
            let (mut p, face, pos, dir) = ray_path(eng, ray, depth + 1)?;
            let (a, b) = sub.edge_points(edge);
            let hit = ray_line_hit(pos, dir, a, b).map_or(pos, |(s, _)| pos + dir * s);
            p.push(face_seg(sub, face), edge_point(sub, edge, hit));
            p.push(edge_seg(sub, edge), vertex_point(sub, v));
            Some(p)
        }
        Via::Slide { segment } => {
            let mut p = segment_start(eng, segment, depth + 1)?;
            let seg = &eng.segments[segment];
            p.push(edge_seg(sub, seg.edge), vertex_point(sub, seg.far));
            Some(p)
        }
    }
}

/// Path to the first endpoint of a critical segment.
fn segment_start(eng: &Engine<'_>, idx: usize, depth: usize) -> Option<RawPath> {
    let seg = &eng.segments[idx];
    if let Some(u) = seg.origin_vertex {
        return vertex_path(eng, u, depth + 1);
    }
    let creator = seg.creator?;
    let parent = RayRef {
        seq: eng.seq_parent(creator.seq),
        ..creator
    };
    let (mut p, face, ..) = ray_path(eng, parent, depth + 1)?;
    p.push(
        face_seg(eng.sub, face),
        edge_point(eng.sub, seg.edge, seg.p1),
    );
    Some(p)
}

/// Path along ray `r` up to its last recorded crossing, with the face it is
/// in and its position and direction there.
fn ray_path(eng: &Engine<'_>, r: RayRef, depth: usize) -> Option<(RawPath, FaceId, Point2, Vec2)> {
    let sub = eng.sub;
    let fam = &eng.families[r.family];
    let origin = fam.origin(r.param);
    let mut p = match fam.kind {
        FamilyKind::VertexFan { vertex, .. } => vertex_path(eng, vertex, depth + 1)?,
        FamilyKind::Steiner { .. } => segment_start(eng, fam.segment?, depth + 1)?,
        FamilyKind::CritSeg { .. } => {
            let mut p = segment_start(eng, fam.segment?, depth + 1)?;
            let host = fam.host_edge?;
            p.push(edge_seg(sub, host), edge_point(sub, host, origin));
            p
        }
    };
    let seq = eng.seq_edges(r.seq);
    let walk = walk_sequence(sub, origin, fam.dir(r.param), fam.face, &seq, false).ok()?;
    let mut face = fam.face;
    for (k, &e) in seq.iter().enumerate() {
        p.push(face_seg(sub, face), edge_point(sub, e, walk.points[k].0));
        face = sub.other_face(e, face)?;
    }
    Some((p, walk.face, walk.last_point(origin), walk.dir))
}

fn total_cost(points: &[Point2], segs: &[SegDesc]) -> f64 {
    segs.iter()
        .enumerate()
        .map(|(k, s)| s.weight as f64 * points[k].dist(points[k + 1]))
        .sum()
}

/// Snaps interior points at an edge end to the vertex and merges
/// coincident consecutive points. Returns whether anything changed.
fn simplify(
    sub: &PlanarSubdivision,
    pts: &mut Vec<PathPoint>,
    segs: &mut Vec<SegDesc>,
    scale: f64,
) -> bool {
    let mut changed = false;
    for p in pts.iter_mut() {
        if let PathPoint::OnEdge { edge, t, .. } = *p {
            let ends = sub.edge(edge).ends;
            if t <= 1e-12 {
                *p = vertex_point(sub, ends[0]);
                changed = true;
            } else if t >= 1.0 - 1e-12 {
                *p = vertex_point(sub, ends[1]);
                changed = true;
            }
        }
    }
    let mut i = 0;
    while i + 1 < pts.len() {
        if pts[i].point().dist(pts[i + 1].point()) <= 1e-12 * scale {
            let removed = pts.remove(i + 1);
            segs.remove(i);
            if removed.is_vertex() {
                pts[i] = removed;
            }
            changed = true;
        } else {
            i += 1;
        }
    }
    changed
}

/// Projected Newton on the edge parameters of the interior points.
fn newton(sub: &PlanarSubdivision, pts: &mut [PathPoint], segs: &[SegDesc]) {
    let m = pts.len();
    if m < 3 {
        return;
    }
    let frames: Vec<Option<(EdgeId, Point2, Vec2)>> = pts
        .iter()
        .map(|p| match *p {
            PathPoint::OnEdge { edge, .. } => {
                let (a, b) = sub.edge_points(edge);
                Some((edge, a, b - a))
            }
            PathPoint::Vertex { .. } => None,
        })
        .collect();
    let mut t: Vec<f64> = pts
        .iter()
        .map(|p| match *p {
            PathPoint::OnEdge { t, .. } => t,
            PathPoint::Vertex { .. } => 0.0,
        })
        .collect();
    let fixed: Vec<Point2> = (0..m).map(|i| pts[i].point()).collect();
    let positions = |t: &[f64]| -> Vec<Point2> {
        (0..m)
            .map(|i| match frames[i] {
                Some((_, a, g)) => a + g * t[i],
                None => fixed[i],
            })
            .collect()
    };
    let mut f_old = total_cost(&positions(&t), segs);
    for _ in 0..200 {
        let p = positions(&t);
        let mut grad = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut off = vec![0.0; m];
        for k in 0..m - 1 {
            let d = p[k + 1] - p[k];
            let len = d.norm();
            if len < 1e-300 {
                continue;
            }
            let u = d * (1.0 / len);
            let w = segs[k].weight as f64;
            let mm = |x: Vec2, y: Vec2| (x.dot(y) - u.dot(x) * u.dot(y)) / len;
            let gk = frames[k].map(|f| f.2);
            let gk1 = frames[k + 1].map(|f| f.2);
            if let Some(g) = gk {
                grad[k] -= w * u.dot(g);
                diag[k] += w * mm(g, g);
            }
            if let Some(g) = gk1 {
                grad[k + 1] += w * u.dot(g);
                diag[k + 1] += w * mm(g, g);
            }
            if let (Some(g0), Some(g1)) = (gk, gk1) {
                off[k] -= w * mm(g0, g1);
            }
        }
        let free: Vec<bool> = (0..m)
            .map(|i| {
                frames[i].is_some()
                    && !(t[i] <= 0.0 && grad[i] > 0.0)
                    && !(t[i] >= 1.0 && grad[i] < 0.0)
            })
            .collect();
        let resid = (0..m)
            .filter(|&i| free[i])
            .map(|i| grad[i].abs() / frames[i].map_or(1.0, |f| f.2.norm()))
            .fold(0.0, f64::max);
        if resid < 1e-14 {
            break;
        }
        let dmax = diag.iter().cloned().fold(0.0, f64::max).max(1e-300);
        let mut lambda = 1e-12 * dmax;
        let step = loop {
            if let Some(s) = solve_tridiagonal(&diag, &off, &grad, &free, lambda) {
                break s;
            }
            lambda = (lambda * 10.0).max(1e-12);
        };
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand: Vec<f64> = (0..m)
                .map(|i| {
                    if free[i] {
                        (t[i] + alpha * step[i]).clamp(0.0, 1.0)
                    } else {
                        t[i]
                    }
                })
                .collect();
            let f_new = total_cost(&positions(&cand), segs);
            if f_new <= f_old {
                let stalled = cand == t;
                t = cand;
                f_old = f_new;
                accepted = !stalled;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    for i in 0..m {
        if let Some((edge, a, g)) = frames[i] {
            pts[i] = PathPoint::OnEdge {
                edge,
                t: t[i],
                point: a + g * t[i],
            };
        }
    }
}

/// Solves `(H + λI) d = −g` restricted to the free variables, where `H` is
/// tridiagonal. `None` when a pivot is not positive.
fn solve_tridiagonal(
    diag: &[f64],
    off: &[f64],
    grad: &[f64],
    free: &[bool],
    lambda: f64,
) -> Option<Vec<f64>> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut prev: Option<usize> = None;
    for i in 0..m {
        if !free[i] {
            prev = None;
            continue;
        }
        let sub_diag = match prev {
            Some(j) if j + 1 == i => off[j],
            _ => 0.0,
        };
        let (c_prev, d_prev) = prev.map_or((0.0, 0.0), |j| (c[j], d[j]));
        let piv = diag[i] + lambda - sub_diag * c_prev;
        if piv.is_nan() || piv <= 0.0 {
            return None;
        }
        c[i] = off[i] / piv;
        d[i] = (-grad[i] - sub_diag * d_prev) / piv;
        prev = Some(i);
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        if !free[i] {
            continue;
        }
        let next = if i + 1 < m && free[i + 1] {
            x[i + 1]
        } else {
            0.0
        };
        x[i] = d[i] - c[i] * next;
    }
    Some(x)
}

fn incidence_sin(sub: &PlanarSubdivision, e: EdgeId, d: Vec2) -> f64 {
    let (a, b) = sub.edge_points(e);
    d.dot((b - a).normalized())
}

/// Simplifies, optionally polishes, and measures the path.
pub(crate) fn finish(sub: &PlanarSubdivision, raw: RawPath, polish: bool) -> Finished {
    let scale = sub.stats().max_edge_length.max(f64::MIN_POSITIVE);
    let RawPath {
        points: mut pts,
        mut segs,
    } = raw;
    simplify(sub, &mut pts, &mut segs, scale);
    if polish {
        for _ in 0..6 {
            newton(sub, &mut pts, &segs);
            if !simplify(sub, &mut pts, &mut segs, scale) {
                break;
            }
        }
    }
    let p: Vec<Point2> = pts.iter().map(|q| q.point()).collect();
    let dir = |k: usize| {
        let d = p[k + 1] - p[k];
        let l = d.norm();
        (l > 0.0).then(|| d * (1.0 / l))
    };
    let edge_of = |i: usize| match pts[i] {
        PathPoint::OnEdge { edge, .. } => Some(edge),
        PathPoint::Vertex { .. } => None,
    };

    let mut segments = Vec::with_capacity(segs.len());
    for (k, s) in segs.iter().enumerate() {
        let length = p[k].dist(p[k + 1]);
        let kind = if s.face.is_some() {
            SegmentKind::Refraction
        } else if pts[k].is_vertex() && pts[k + 1].is_vertex() {
            SegmentKind::Vertex
        } else {
            SegmentKind::CriticalSlide
        };
        let angle = |i: usize| {
            s.face?;
            let e = edge_of(i)?;
            let d = dir(k)?;
            Some(incidence_sin(sub, e, d).abs().min(1.0).asin())
        };
        segments.push(PathSegment {
            from: k,
            to: k + 1,
            kind,
            face: s.face,
            edge: s.edge,
            weight: s.weight,
            length,
            cost: s.weight as f64 * length,
            angle_in: angle(k),
            angle_out: angle(k + 1),
        });
    }

    let mut checks = Vec::new();
    for i in 1..pts.len().saturating_sub(1) {
        let Some(e) = edge_of(i) else { continue };
        let (s_in, s_out) = (segs[i - 1], segs[i]);
        let (Some(d_in), Some(d_out)) = (dir(i - 1), dir(i)) else {
            continue;
        };
        let alpha_e = sub.edge(e).weight as f64;
        let check = match (s_in.face, s_out.face) {
            (Some(f_in), Some(f_out)) if f_in != f_out => Some((
                CrossingKind::Refraction,
                (s_in.weight as f64 * incidence_sin(sub, e, d_in)
                    - s_out.weight as f64 * incidence_sin(sub, e, d_out))
                .abs(),
            )),
            (Some(_), None) if alpha_e < s_in.weight as f64 => {
                let theta = incidence_sin(sub, e, d_in).abs().min(1.0).asin();
                let theta_c = (alpha_e / s_in.weight as f64).asin();
                Some((CrossingKind::SlideEntry, (theta - theta_c).abs()))
            }
            (None, Some(_)) if alpha_e < s_out.weight as f64 => {
                let theta = incidence_sin(sub, e, d_out).abs().min(1.0).asin();
                let theta_c = (alpha_e / s_out.weight as f64).asin();
                Some((CrossingKind::SlideExit, (theta - theta_c).abs()))
            }
            _ => None,
        };
        if let Some((kind, residual)) = check {
            checks.push(CrossingCheck {
                point: i,
                edge: e,
                kind,
                residual,
            });
        }
    }

    let mut slides_separated = true;
    let mut seen_slide = false;
    let mut vertex_since = true;
    for s in &segments {
        if s.kind == SegmentKind::CriticalSlide {
            if seen_slide && !vertex_since {
                slides_separated = false;
            }
            seen_slide = true;
            vertex_since = false;
        }
        if pts[s.to].is_vertex() {
            vertex_since = true;
        }
    }

    let max_of = |kinds: &[CrossingKind]| {
        checks
            .iter()
            .filter(|c| kinds.contains(&c.kind))
            .map(|c| c.residual)
            .fold(0.0, f64::max)
    };
    Finished {
        cost: segments.iter().map(|s| s.cost).sum(),
        max_snell_residual: max_of(&[CrossingKind::Refraction]),
        max_slide_angle_error: max_of(&[CrossingKind::SlideEntry, CrossingKind::SlideExit]),
        points: pts,
        segments,
        checks,
        slides_separated,
    }
}
