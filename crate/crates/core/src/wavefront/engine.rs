//! The event loop and the procedures it dispatches to.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, TAU};

use super::family::{CriticalSegment, Family, FamilyKind, RayRef, RayTree, TreeNode};
use super::queue::{EventKind, EventQueue};
use super::search::{
    exact_apex_ray, find_critical_point_of_entry, find_critically_reflected_ray,
    find_pass_boundary, find_sign_change, find_split_rays, incidence, probe, RayState, Strike,
};
use super::{AuditReport, CapKind, EffectiveConfig, SolverStats, SourceType, Status};
use crate::geometry::{Point2, Vec2};
use crate::optics::{refract_direction, EdgeFrame};
use crate::subdivision::{EdgeId, FaceId, PlanarSubdivision, VertexId};

/// Index of a node in the shared edge-sequence arena.
pub type SeqId = u32;
pub const NO_SEQ: SeqId = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct SeqNode {
    edge: EdgeId,
    parent: SeqId,
}

/// How a vertex label was obtained; used to rebuild the path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Via {
    Unreached,
    Source,
    /// Along a mesh edge from a settled vertex.
    Edge {
        from: VertexId,
        edge: EdgeId,
    },
    /// Straight from the ray's position in its current face.
    Ray(RayRef),
    /// The ray strikes `edge`, then the path follows the edge.
    RayEdge {
        ray: RayRef,
        edge: EdgeId,
    },
    /// Slide along a critical segment to its far endpoint.
    Slide {
        segment: usize,
    },
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct TracedRay {
    pub sibling: usize,
}

/// Sibling pair bounding a contiguous range of one family inside a face.
#[derive(Clone, Copy, Debug)]
struct Beam {
    family: usize,
    seq: SeqId,
    lo: f64,
    hi: f64,
    lo_ray: usize,
    hi_ray: usize,
    lo_state: RayState,
    hi_state: RayState,
}

/// A critical point of entry waiting for its event.
#[derive(Clone, Copy, Debug)]
struct PendingEntry {
    creator: RayRef,
    edge: EdgeId,
    point: Point2,
    dist: f64,
    /// Refraction angle of the adjacent passing ray.
    theta_refracted: f64,
    theta_c: f64,
    along: Vec2,
    far: VertexId,
    reflect_face: FaceId,
    light_face: FaceId,
}

#[derive(Clone, Copy, Debug)]
struct Part {
    lo: (f64, Strike),
    hi: (f64, Strike),
    lo_ray: Option<usize>,
    hi_ray: Option<usize>,
}

struct Ctx {
    family: usize,
    seq: SeqId,
    edges: Vec<EdgeId>,
    key: f64,
}

pub(crate) struct Engine<'a> {
    pub sub: &'a PlanarSubdivision,
    pub cfg: EffectiveConfig,
    pub source: VertexId,
    pub target: VertexId,
    pub labels: Vec<f64>,
    pub via: Vec<Via>,
    pub settled: Vec<bool>,
    pub rays: Vec<TracedRay>,
    pub families: Vec<Family>,
    pub trees: Vec<RayTree>,
    pub segments: Vec<CriticalSegment>,
    pub stats: SolverStats,
    pub audit: AuditReport,
    queue: EventQueue,
    beams: Vec<Beam>,
    alive: BTreeSet<usize>,
    seqs: Vec<SeqNode>,
    pending: Vec<PendingEntry>,
    now: f64,
    edge_repeat_cap: usize,
    tree_node_cap: usize,
}

impl<'a> Engine<'a> {
    pub fn new(
        sub: &'a PlanarSubdivision,
        cfg: EffectiveConfig,
        source: VertexId,
        target: VertexId,
    ) -> Self {
        let n = sub.vertex_count();
        Self {
            sub,
            source,
            target,
            labels: vec![f64::INFINITY; n],
            via: vec![Via::Unreached; n],
            settled: vec![false; n],
            rays: Vec::new(),
            families: Vec::new(),
            trees: Vec::new(),
            segments: Vec::new(),
            stats: SolverStats::default(),
            audit: AuditReport::default(),
            queue: EventQueue::default(),
            beams: Vec::new(),
            alive: BTreeSet::new(),
            seqs: Vec::new(),
            pending: Vec::new(),
            now: 0.0,
            edge_repeat_cap: cfg.edge_repeat_factor as usize * n,
            tree_node_cap: cfg.tree_node_factor as usize * n * n,
            cfg,
        }
    }

    pub fn seq_edges(&self, mut id: SeqId) -> Vec<EdgeId> {
        let mut out = Vec::new();
        while id != NO_SEQ {
            let node = self.seqs[id as usize];
            out.push(node.edge);
            id = node.parent;
        }
        out.reverse();
        out
    }

    pub fn seq_parent(&self, id: SeqId) -> SeqId {
        if id == NO_SEQ {
            NO_SEQ
        } else {
            self.seqs[id as usize].parent
        }
    }

    fn push_seq(&mut self, parent: SeqId, edge: EdgeId) -> SeqId {
        self.seqs.push(SeqNode { edge, parent });
        (self.seqs.len() - 1) as SeqId
    }

    fn push_event(&mut self, key: f64, kind: EventKind) {
        let mut key = key;
        if key < self.now {
            if self.now - key > 1e-12 * (1.0 + self.now) {
                self.stats.late_pushes += 1;
            }
            key = self.now;
        }
        self.queue.push(key, kind);
        self.stats.queue_peak = self.stats.queue_peak.max(self.queue.len() as u64);
    }

    fn offer(&mut self, v: VertexId, d: f64, via: Via) {
        if !d.is_finite() {
            return;
        }
        let floor = self.sub.point(self.source).dist(self.sub.point(v))
            * self.sub.stats().min_weight as f64;
        if d < floor * (1.0 - 1e-12) - 1e-12 {
            self.audit.label_floor_violations += 1;
        }
        if self.settled[v] {
            if d < self.labels[v] * (1.0 - 1e-12) - 1e-12 {
                self.stats.settled_improvements += 1;
            }
            return;
        }
        if d < self.labels[v] {
            self.labels[v] = d;
            self.via[v] = via;
            self.push_event(d, EventKind::VertexReached(v));
        }
    }

    fn new_ray(&mut self) -> usize {
        let id = self.rays.len();
        self.rays.push(TracedRay { sibling: id });
        self.stats.rays_traced += 1;
        id
    }

    fn spawn_beam(
        &mut self,
        family: usize,
        seq: SeqId,
        lo: (f64, RayState),
        hi: (f64, RayState),
        rays: (Option<usize>, Option<usize>),
        key: f64,
    ) {
        let lo_ray = rays.0.unwrap_or_else(|| self.new_ray());
        let hi_ray = if hi.0 == lo.0 {
            lo_ray
        } else {
            match rays.1 {
                Some(r) if r != lo_ray => r,
                _ => self.new_ray(),
            }
        };
        self.rays[lo_ray].sibling = hi_ray;
        self.rays[hi_ray].sibling = lo_ray;
        self.beams.push(Beam {
            family,
            seq,
            lo: lo.0,
            hi: hi.0,
            lo_ray,
            hi_ray,
            lo_state: lo.1,
            hi_state: hi.1,
        });
        let idx = self.beams.len() - 1;
        self.alive.insert(idx);
        self.stats.beams_created += 1;
        self.push_event(key, EventKind::RayStrike(idx));
    }

    fn add_family(&mut self, fam: Family) -> usize {
        let id = self.families.len();
        self.trees[fam.tree].nodes[fam.node].families.push(id);
        self.families.push(fam);
        id
    }

    /// Runs the event loop until the target is settled, the queue empties,
    /// or a resource cap is hit.
    pub fn run(&mut self) -> Status {
        self.labels[self.source] = 0.0;
        self.via[self.source] = Via::Source;
        self.push_event(0.0, EventKind::VertexReached(self.source));
        while let Some(ev) = self.queue.pop() {
            if self.stats.events_processed >= self.cfg.max_events {
                return Status::Partial {
                    cap: CapKind::Events,
                };
            }
            if self.stats.rays_traced >= self.cfg.max_traced_rays {
                return Status::Partial {
                    cap: CapKind::TracedRays,
                };
            }
            self.stats.events_processed += 1;
            if ev.key < self.now {
                self.audit.pop_order_violations += 1;
            }
            self.now = self.now.max(ev.key);
            self.audit.last_key = self.now;
            match ev.kind {
                EventKind::VertexReached(v) => {
                    if self.settled[v] {
                        continue;
                    }
                    self.settled[v] = true;
                    self.stats.vertex_events += 1;
                    if v == self.target {
                        return Status::Complete;
                    }
                    self.initiate_vertex_source(v);
                }
                EventKind::CriticalEntry(i) => {
                    self.stats.critical_events += 1;
                    self.initiate_critical_source(i);
                }
                EventKind::RayStrike(b) => {
                    self.stats.strike_events += 1;
                    self.process_beam(b);
                }
            }
            if self.cfg.audit {
                self.check_siblings();
            }
        }
        Status::NoPath
    }

    fn check_siblings(&mut self) {
        self.audit.sibling_checks += 1;
        let mut seen = BTreeSet::new();
        for &b in &self.alive {
            let beam = &self.beams[b];
            let ok = self.rays[beam.lo_ray].sibling == beam.hi_ray
                && self.rays[beam.hi_ray].sibling == beam.lo_ray
                && seen.insert(beam.lo_ray)
                && (beam.lo_ray == beam.hi_ray || seen.insert(beam.hi_ray));
            if !ok {
                self.audit.sibling_violations += 1;
            }
        }
    }

    fn initiate_vertex_source(&mut self, u: VertexId) {
        self.stats.vertex_sources += 1;
        let sub = self.sub;
        let pu = sub.point(u);
        let d = self.labels[u];
        let tree = self.trees.len();
        self.trees.push(RayTree {
            root: u,
            nodes: vec![TreeNode {
                point: pu,
                parent: None,
                segment: None,
                families: Vec::new(),
            }],
        });
        let step = self.cfg.step;
        for &f in sub.faces_of_vertex(u).expect("vertex id") {
            let face = sub.face(f);
            let k = face.vertices.iter().position(|&x| x == u).expect("corner");
            let next = sub.point(face.vertices[(k + 1) % 3]);
            let prev = sub.point(face.vertices[(k + 2) % 3]);
            let a = (next - pu).angle();
            let mut b = (prev - pu).angle();
            if b <= a {
                b += TAU;
            }
            let i_lo = (a / step - 0.5).floor() + 1.0;
            let i_hi = (b / step - 0.5).ceil() - 1.0;
            if i_lo > i_hi {
                continue;
            }
            let fam = Family {
                kind: FamilyKind::VertexFan {
                    vertex: u,
                    origin: pu,
                    step,
                },
                face: f,
                host_edge: None,
                base: d,
                tree,
                node: 0,
                segment: None,
            };
            let state = |p: f64| RayState {
                pos: pu,
                dir: fam.dir(p),
                face: f,
                dist: d,
                skip: None,
            };
            let (sl, sh) = (state(i_lo), state(i_hi));
            let id = self.add_family(fam);
            self.spawn_beam(id, NO_SEQ, (i_lo, sl), (i_hi, sh), (None, None), d);
        }
        for &e in sub.edges_of_vertex(u).expect("vertex id") {
            let edge = sub.edge(e);
            let w = if edge.ends[0] == u {
                edge.ends[1]
            } else {
                edge.ends[0]
            };
            self.offer(
                w,
                d + edge.weight as f64 * edge.length,
                Via::Edge { from: u, edge: e },
            );
            if edge.faces.len() == 2 {
                let (f1, f2) = (edge.faces[0], edge.faces[1]);
                let (w1, w2) = (sub.face(f1).weight, sub.face(f2).weight);
                if w1 != w2 {
                    let (heavy, light) = if w1 > w2 { (f1, f2) } else { (f2, f1) };
                    let theta_c = (edge.weight as f64 / sub.face(heavy).weight as f64).asin();
                    let node = self.trees[tree].nodes.len();
                    self.trees[tree].nodes.push(TreeNode {
                        point: pu,
                        parent: Some(0),
                        segment: Some(self.segments.len()),
                        families: Vec::new(),
                    });
                    self.segments.push(CriticalSegment {
                        edge: e,
                        p1: pu,
                        far: w,
                        theta_c,
                        reflect_face: heavy,
                        light_face: light,
                        along: (sub.point(w) - pu).normalized(),
                        delta: self.cfg.delta,
                        dist: d,
                        creator: None,
                        origin_vertex: Some(u),
                        tree,
                        node,
                    });
                    self.spawn_reflected(self.segments.len() - 1);
                }
            }
        }
    }

    /// Parallel critically reflected rays leaving a critical segment.
    fn spawn_reflected(&mut self, seg_idx: usize) {
        let sub = self.sub;
        let seg = self.segments[seg_idx].clone();
        let alpha_e = sub.edge(seg.edge).weight as f64;
        let frame = EdgeFrame::new(sub, seg.edge, seg.reflect_face);
        let (s, c) = seg.theta_c.sin_cos();
        let dir = seg.along * s - frame.normal * c;
        let len = seg.p1.dist(sub.point(seg.far));
        let hi = ((alpha_e * len - seg.delta) / seg.delta).max(0.0);
        // From a vertex the first ray may point outside the face wedge.
        let lo = if seg.origin_vertex.is_some() {
            hi.min(1.0)
        } else {
            0.0
        };
        if seg.origin_vertex.is_some() && hi == 0.0 {
            return;
        }
        let fam = Family {
            kind: FamilyKind::CritSeg {
                start: seg.p1,
                along: seg.along,
                dir,
                spacing: seg.delta,
                edge_weight: alpha_e,
            },
            face: seg.reflect_face,
            host_edge: Some(seg.edge),
            base: seg.dist,
            tree: seg.tree,
            node: seg.node,
            segment: Some(seg_idx),
        };
        let state = |p: f64| RayState {
            pos: fam.origin(p),
            dir,
            face: seg.reflect_face,
            dist: fam.base_dist(p),
            skip: Some(seg.edge),
        };
        let (sl, sh) = (state(lo), state(hi));
        let id = self.add_family(fam);
        self.spawn_beam(id, NO_SEQ, (lo, sl), (hi, sh), (None, None), seg.dist);
    }

    fn initiate_critical_source(&mut self, idx: usize) {
        let sub = self.sub;
        let pe = self.pending[idx];
        let parent = &self.families[pe.creator.family];
        let (tree, parent_node) = (parent.tree, parent.node);
        if self.trees[tree].nodes.len() >= self.tree_node_cap {
            self.audit.tree_cap_hits += 1;
            return;
        }
        self.stats.critical_entries += 1;
        let seg_idx = self.segments.len();
        let node = self.trees[tree].nodes.len();
        self.trees[tree].nodes.push(TreeNode {
            point: pe.point,
            parent: Some(parent_node),
            segment: Some(seg_idx),
            families: Vec::new(),
        });
        self.stats.max_tree_nodes = self
            .stats
            .max_tree_nodes
            .max(self.trees[tree].nodes.len() as u64);
        self.segments.push(CriticalSegment {
            edge: pe.edge,
            p1: pe.point,
            far: pe.far,
            theta_c: pe.theta_c,
            reflect_face: pe.reflect_face,
            light_face: pe.light_face,
            along: pe.along,
            delta: self.cfg.delta,
            dist: pe.dist,
            creator: Some(pe.creator),
            origin_vertex: None,
            tree,
            node,
        });
        let alpha_e = sub.edge(pe.edge).weight as f64;
        self.offer(
            pe.far,
            pe.dist + alpha_e * pe.point.dist(sub.point(pe.far)),
            Via::Slide { segment: seg_idx },
        );
        self.spawn_reflected(seg_idx);

        let psi0 = self.cfg.epsilon_prime / self.cfg.k_const;
        let psi_max = FRAC_PI_2 - pe.theta_refracted;
        if psi_max < psi0 {
            return;
        }
        let step = self.cfg.step;
        let normal = EdgeFrame::new(sub, pe.edge, pe.reflect_face).normal;
        let fam = Family {
            kind: FamilyKind::Steiner {
                origin: pe.point,
                psi0,
                step,
                along: pe.along,
                normal,
            },
            face: pe.light_face,
            host_edge: Some(pe.edge),
            base: pe.dist,
            tree,
            node,
            segment: Some(seg_idx),
        };
        let hi = (psi_max - psi0) / step;
        let state = |p: f64| RayState {
            pos: pe.point,
            dir: fam.dir(p),
            face: pe.light_face,
            dist: pe.dist,
            skip: Some(pe.edge),
        };
        let (sl, sh) = (state(0.0), state(hi));
        let id = self.add_family(fam);
        self.spawn_beam(id, NO_SEQ, (0.0, sl), (hi, sh), (None, None), pe.dist);
    }

    fn process_beam(&mut self, b: usize) {
        if !self.alive.remove(&b) {
            return;
        }
        let beam = self.beams[b];
        let ctx = Ctx {
            family: beam.family,
            seq: beam.seq,
            edges: self.seq_edges(beam.seq),
            key: self.now,
        };
        let (Some(s_lo), Some(s_hi)) = (
            Strike::from_state(self.sub, beam.lo_state),
            Strike::from_state(self.sub, beam.hi_state),
        ) else {
            self.stats.dropped_beams += 1;
            return;
        };
        let part = Part {
            lo: (beam.lo, s_lo),
            hi: (beam.hi, s_hi),
            lo_ray: Some(beam.lo_ray),
            hi_ray: Some(beam.hi_ray),
        };
        if s_lo.exit.edge != s_hi.exit.edge {
            self.split(&ctx, part);
        } else {
            self.handle_exit(&ctx, part, 0);
        }
    }

    fn split(&mut self, ctx: &Ctx, part: Part) {
        let sub = self.sub;
        let fam = self.families[ctx.family].clone();
        let (e_i, e_j) = (part.lo.1.exit.edge, part.hi.1.exit.edge);
        let Some(apex) = sub.shared_vertex(e_i, e_j) else {
            self.stats.dropped_beams += 1;
            return;
        };
        let alpha_f = sub.face(part.lo.1.state.face).weight as f64;
        let pa = sub.point(apex);
        let ray_ref = |param: f64| RayRef {
            family: ctx.family,
            param,
            seq: ctx.seq,
        };
        let (left, right) = if fam.source_type() == SourceType::Critseg {
            let rs = find_critically_reflected_ray(sub, &fam, &ctx.edges, part.lo, part.hi, apex);
            self.stats.critically_reflected += 1;
            if let Some(st) = rs.strike {
                self.offer(
                    apex,
                    st.state.dist + alpha_f * st.state.pos.dist(pa),
                    Via::Ray(ray_ref(rs.param)),
                );
            }
            let side = |param: f64, edge: EdgeId, fallback: (f64, Strike)| match probe(
                sub, &fam, param, &ctx.edges,
            ) {
                Some(s) if s.exit.edge == edge => (param, s),
                _ => fallback,
            };
            let l = if rs.left_hi > part.lo.0 {
                side(rs.left_hi, e_i, part.lo)
            } else {
                part.lo
            };
            let r = if rs.right_lo < part.hi.0 {
                side(rs.right_lo, e_j, part.hi)
            } else {
                part.hi
            };
            (
                Part {
                    lo: part.lo,
                    hi: l,
                    lo_ray: part.lo_ray,
                    hi_ray: None,
                },
                Part {
                    lo: r,
                    hi: part.hi,
                    lo_ray: None,
                    hi_ray: part.hi_ray,
                },
            )
        } else {
            let Some(sr) = find_split_rays(sub, &fam, &ctx.edges, part.lo, part.hi) else {
                self.stats.dropped_beams += 1;
                return;
            };
            self.stats.splits += 1;
            self.stats.binary_search_probes += sr.probes;
            let (p, st) = exact_apex_ray(sub, &fam, &ctx.edges, (sr.r1, sr.s1), sr.r2);
            self.offer(
                apex,
                st.state.dist + alpha_f * st.state.pos.dist(pa),
                Via::Ray(ray_ref(p)),
            );
            (
                Part {
                    lo: part.lo,
                    hi: (sr.r1, sr.s1),
                    lo_ray: part.lo_ray,
                    hi_ray: None,
                },
                Part {
                    lo: (sr.r2, sr.s2),
                    hi: part.hi,
                    lo_ray: None,
                    hi_ray: part.hi_ray,
                },
            )
        };
        for p in [left, right] {
            if p.lo.1.exit.edge == p.hi.1.exit.edge {
                self.handle_exit(ctx, p, 0);
            } else {
                self.stats.dropped_beams += 1;
            }
        }
    }

    fn handle_exit(&mut self, ctx: &Ctx, part: Part, depth: u32) {
        let sub = self.sub;
        let e = part.lo.1.exit.edge;
        let edge = sub.edge(e);
        let alpha_e = edge.weight as f64;
        for (param, s) in [part.lo, part.hi] {
            for end in edge.ends {
                let d = s.dist + alpha_e * s.exit.point.dist(sub.point(end));
                let ray = RayRef {
                    family: ctx.family,
                    param,
                    seq: ctx.seq,
                };
                self.offer(end, d, Via::RayEdge { ray, edge: e });
            }
        }
        let repeats = ctx.edges.iter().filter(|&&x| x == e).count() + 1;
        self.stats.max_edge_repeat = self.stats.max_edge_repeat.max(repeats as u64);
        if repeats > self.edge_repeat_cap {
            self.audit.edge_repeat_violations += 1;
            return;
        }
        let inc_lo = incidence(sub, &part.lo.1);
        let inc_hi = incidence(sub, &part.hi.1);
        if inc_lo.next_face.is_none() {
            return;
        }
        let fam = self.families[ctx.family].clone();
        match (inc_lo.passes, inc_hi.passes) {
            (true, true) => self.refract_part(ctx, part),
            (false, false) => {
                let opposite = inc_lo.tangential * inc_hi.tangential < 0.0;
                if depth == 0 && opposite && part.lo.0 != part.hi.0 {
                    if let Some((a, b, probes)) =
                        find_sign_change(sub, &fam, &ctx.edges, part.lo, part.hi)
                    {
                        self.stats.binary_search_probes += probes;
                        let first = Part {
                            lo: part.lo,
                            hi: a,
                            lo_ray: part.lo_ray,
                            hi_ray: None,
                        };
                        let second = Part {
                            lo: b,
                            hi: part.hi,
                            lo_ray: None,
                            hi_ray: part.hi_ray,
                        };
                        self.handle_exit(ctx, first, depth + 1);
                        self.handle_exit(ctx, second, depth + 1);
                    }
                }
            }
            _ => {
                let lo_passes = inc_lo.passes;
                let passing = |pass: (f64, Strike)| {
                    if lo_passes {
                        Part {
                            lo: part.lo,
                            hi: pass,
                            lo_ray: part.lo_ray,
                            hi_ray: None,
                        }
                    } else {
                        Part {
                            lo: pass,
                            hi: part.hi,
                            lo_ray: None,
                            hi_ray: part.hi_ray,
                        }
                    }
                };
                if fam.source_type() == SourceType::Critseg {
                    if let Some((a, b, probes)) =
                        find_pass_boundary(sub, &fam, &ctx.edges, part.lo, part.hi)
                    {
                        self.stats.binary_search_probes += probes;
                        self.refract_part(ctx, passing(if lo_passes { a } else { b }));
                    }
                    return;
                }
                let Some(cs) =
                    find_critical_point_of_entry(sub, &fam, &ctx.edges, part.lo, part.hi)
                else {
                    return;
                };
                self.stats.binary_search_probes += cs.probes;
                self.refract_part(ctx, passing((cs.r_pass, cs.s_pass)));
                match cs.hit {
                    Some((param, hit)) => {
                        self.stats.critical_entries_found += 1;
                        let inc_b = incidence(sub, &cs.s_block);
                        let inc_p = incidence(sub, &cs.s_pass);
                        let face = cs.s_pass.state.face;
                        let next = inc_lo.next_face.expect("interior edge");
                        let a_in = sub.face(face).weight as f64;
                        let a_out = sub.face(next).weight as f64;
                        let theta_refracted =
                            (inc_p.tangential.abs() * a_in / a_out).min(1.0).asin();
                        let frame = EdgeFrame::new(sub, e, face);
                        let sign = if inc_b.tangential >= 0.0 { 1.0 } else { -1.0 };
                        let far = if sign > 0.0 {
                            edge.ends[1]
                        } else {
                            edge.ends[0]
                        };
                        let seq = self.push_seq(ctx.seq, e);
                        self.pending.push(PendingEntry {
                            creator: RayRef {
                                family: ctx.family,
                                param,
                                seq,
                            },
                            edge: e,
                            point: hit.point,
                            dist: fam.base_dist(param) + hit.weighted,
                            theta_refracted,
                            theta_c: inc_b.theta_c.expect("lighter far side").radians(),
                            along: frame.tangent * sign,
                            far,
                            reflect_face: face,
                            light_face: next,
                        });
                        let key = fam.base_dist(param) + hit.weighted;
                        self.push_event(key, EventKind::CriticalEntry(self.pending.len() - 1));
                    }
                    None => self.stats.critical_entries_nil += 1,
                }
            }
        }
    }

    fn refract_part(&mut self, ctx: &Ctx, part: Part) {
        let sub = self.sub;
        let e = part.lo.1.exit.edge;
        let face = part.lo.1.state.face;
        let Some(next) = sub.other_face(e, face) else {
            return;
        };
        let (a_in, a_out) = (sub.face(face).weight, sub.face(next).weight);
        let frame = EdgeFrame::new(sub, e, face);
        let cross = |s: &Strike| {
            refract_direction(&frame, s.state.dir, a_in, a_out).map(|dir| RayState {
                pos: s.exit.point,
                dir,
                face: next,
                dist: s.dist,
                skip: Some(e),
            })
        };
        let (Some(sl), Some(sh)) = (cross(&part.lo.1), cross(&part.hi.1)) else {
            self.stats.dropped_beams += 1;
            return;
        };
        let (dl, dh) = (part.lo.1.dist, part.hi.1.dist);
        let spread = part.lo.1.exit.point.dist(part.hi.1.exit.point) * a_in as f64;
        let key = dl.min(dh).min(0.5 * (dl + dh - spread)).max(ctx.key);
        let seq = self.push_seq(ctx.seq, e);
        self.spawn_beam(
            ctx.family,
            seq,
            (part.lo.0, sl),
            (part.hi.0, sh),
            (part.lo_ray, part.hi_ray),
            key,
        );
    }
}
