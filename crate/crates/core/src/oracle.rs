//! Steiner-point graph approximation of weighted shortest paths, used as an
//! independent reference for the wavefront engine.
//!
//! Every edge receives `k` extra nodes. Nodes on the boundary of a face are
//! pairwise connected by straight arcs priced at the face weight, and
//! consecutive nodes along an edge by arcs priced at the edge weight. The
//! graph distance is an upper bound on the true weighted distance and
//! converges to it as `k` grows.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::geometry::Point2;
use crate::subdivision::{EdgeId, FaceId, PlanarSubdivision, VertexId};

/// Where Steiner points go along each edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Placement {
    /// `k` points at `t = i / (k + 1)`.
    Uniform(usize),
    /// `2^m − 1` points at `t = i / 2^m`; level `m + 1` refines level `m`.
    Nested(u32),
}

impl Placement {
    pub fn per_edge(self) -> usize {
        match self {
            Placement::Uniform(k) => k,
            Placement::Nested(m) => (1usize << m) - 1,
        }
    }

    fn param(self, i: usize) -> f64 {
        match self {
            Placement::Uniform(k) => i as f64 / (k + 1) as f64,
            Placement::Nested(m) => i as f64 / (1u64 << m) as f64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeKind {
    Vertex { vertex: VertexId },
    Steiner { edge: EdgeId, t: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinerNode {
    pub point: Point2,
    pub kind: NodeKind,
}

/// The discretization graph. Face cliques are kept implicit: each face keeps
/// the list of nodes on its boundary.
#[derive(Clone, Debug)]
pub struct SteinerGraph {
    nodes: Vec<SteinerNode>,
    placement: Placement,
    face_nodes: Vec<Vec<usize>>,
    face_weights: Vec<f64>,
    /// Nodes along each edge from `ends[0]` to `ends[1]`, endpoints included.
    edge_chains: Vec<Vec<usize>>,
    edge_weights: Vec<f64>,
    node_faces: Vec<Vec<FaceId>>,
    /// (edge, index in chain) for every chain a node belongs to.
    node_chains: Vec<Vec<(EdgeId, usize)>>,
}

pub fn build_steiner_graph(sub: &PlanarSubdivision, k: usize) -> SteinerGraph {
    SteinerGraph::build(sub, Placement::Uniform(k))
}

impl SteinerGraph {
    pub fn build(sub: &PlanarSubdivision, placement: Placement) -> Self {
        let k = placement.per_edge();
        let mut nodes: Vec<SteinerNode> = sub
            .vertices()
            .iter()
            .enumerate()
            .map(|(v, &p)| SteinerNode {
                point: p,
                kind: NodeKind::Vertex { vertex: v },
            })
            .collect();
        let mut node_faces: Vec<Vec<FaceId>> = (0..nodes.len())
            .map(|v| {
                sub.faces_of_vertex(v)
                    .map(|f| f.to_vec())
                    .unwrap_or_default()
            })
            .collect();
        let mut node_chains: Vec<Vec<(EdgeId, usize)>> = vec![Vec::new(); nodes.len()];
        let mut edge_chains = Vec::with_capacity(sub.edges().len());
        for (eid, edge) in sub.edges().iter().enumerate() {
            let (a, b) = sub.edge_points(eid);
            let mut chain = Vec::with_capacity(k + 2);
            chain.push(edge.ends[0]);
            for i in 1..=k {
                let t = placement.param(i);
                nodes.push(SteinerNode {
                    point: a.lerp(b, t),
                    kind: NodeKind::Steiner { edge: eid, t },
                });
                node_faces.push(edge.faces.clone());
                node_chains.push(Vec::new());
                chain.push(nodes.len() - 1);
            }
            chain.push(edge.ends[1]);
            for (i, &nd) in chain.iter().enumerate() {
                node_chains[nd].push((eid, i));
            }
            edge_chains.push(chain);
        }
        let face_nodes = sub
            .faces()
            .iter()
            .map(|f| {
                let mut list: Vec<usize> = f.vertices.to_vec();
                for &e in &f.edges {
                    let chain = &edge_chains[e];
                    list.extend_from_slice(&chain[1..chain.len() - 1]);
                }
                list
            })
            .collect();
        Self {
            nodes,
            placement,
            face_nodes,
            face_weights: sub.faces().iter().map(|f| f.weight as f64).collect(),
            edge_chains,
            edge_weights: sub.edges().iter().map(|e| e.weight as f64).collect(),
            node_faces,
            node_chains,
        }
    }

    pub fn nodes(&self) -> &[SteinerNode] {
        &self.nodes
    }

    pub fn placement(&self) -> Placement {
        self.placement
    }

    /// Nodes on the boundary of a face.
    pub fn face_nodes(&self, f: FaceId) -> &[usize] {
        &self.face_nodes[f]
    }

    /// All arcs `(u, v, weight)` with `u < v`, face cliques first, then
    /// along-edge arcs. Parallel arcs are listed separately.
    pub fn arcs(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (f, list) in self.face_nodes.iter().enumerate() {
            for (i, &u) in list.iter().enumerate() {
                for &v in &list[i + 1..] {
                    let w = self.face_weights[f] * self.nodes[u].point.dist(self.nodes[v].point);
                    out.push((u.min(v), u.max(v), w));
                }
            }
        }
        for (e, chain) in self.edge_chains.iter().enumerate() {
            for pair in chain.windows(2) {
                let w = self.edge_weights[e]
                    * self.nodes[pair[0]].point.dist(self.nodes[pair[1]].point);
                out.push((pair[0].min(pair[1]), pair[0].max(pair[1]), w));
            }
        }
        out
    }

    fn relax_from(&self, u: usize, mut visit: impl FnMut(usize, f64)) {
        let pu = self.nodes[u].point;
        for &f in &self.node_faces[u] {
            let w = self.face_weights[f];
            for &v in &self.face_nodes[f] {
                if v != u {
                    visit(v, w * pu.dist(self.nodes[v].point));
                }
            }
        }
        for &(e, i) in &self.node_chains[u] {
            let chain = &self.edge_chains[e];
            let w = self.edge_weights[e];
            if i > 0 {
                visit(chain[i - 1], w * pu.dist(self.nodes[chain[i - 1]].point));
            }
            if i + 1 < chain.len() {
                visit(chain[i + 1], w * pu.dist(self.nodes[chain[i + 1]].point));
            }
        }
    }

    /// Single-source distances and predecessors; stops early once `stop`
    /// is settled.
    pub fn dijkstra(&self, source: usize, stop: Option<usize>) -> (Vec<f64>, Vec<Option<usize>>) {
        let mut dist = vec![f64::INFINITY; self.nodes.len()];
        let mut pred = vec![None; self.nodes.len()];
        let mut done = vec![false; self.nodes.len()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(MinEntry(0.0, source));
        while let Some(MinEntry(d, u)) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if Some(u) == stop {
                break;
            }
            self.relax_from(u, |v, w| {
                let nd = d + w;
                if !done[v] && nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = Some(u);
                    heap.push(MinEntry(nd, v));
                }
            });
        }
        (dist, pred)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OraclePath {
    pub cost: f64,
    pub nodes: Vec<usize>,
    pub points: Vec<Point2>,
}

/// Graph distance between two mesh vertices; `None` when unreachable.
pub fn oracle_distance(g: &SteinerGraph, s: VertexId, t: VertexId) -> Option<OraclePath> {
    let (dist, pred) = g.dijkstra(s, Some(t));
    if !dist[t].is_finite() {
        return None;
    }
    let mut nodes = vec![t];
    while let Some(p) = pred[*nodes.last().unwrap()] {
        nodes.push(p);
    }
    nodes.reverse();
    Some(OraclePath {
        cost: dist[t],
        points: nodes.iter().map(|&n| g.nodes[n].point).collect(),
        nodes,
    })
}

/// Oracle costs at `k` and `4k` points per edge. The two placements are
/// not nested, so either may be the smaller; `slack` is their absolute
/// difference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub k: usize,
    pub fine_k: usize,
    pub cost: f64,
    pub fine_cost: f64,
    pub slack: f64,
}

pub fn oracle_estimate(
    sub: &PlanarSubdivision,
    s: VertexId,
    t: VertexId,
    k: usize,
) -> Option<OracleEstimate> {
    let coarse = oracle_distance(&build_steiner_graph(sub, k), s, t)?;
    let fine_k = 4 * k;
    let fine = oracle_distance(&build_steiner_graph(sub, fine_k), s, t)?;
    Some(OracleEstimate {
        k,
        fine_k,
        cost: coarse.cost,
        fine_cost: fine.cost,
        slack: (coarse.cost - fine.cost).abs(),
    })
}

#[derive(Clone, Copy, Debug)]
struct MinEntry(f64, usize);

impl PartialEq for MinEntry {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for MinEntry {}
impl PartialOrd for MinEntry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for MinEntry {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}

/// Minimizes a unimodal function on `[lo, hi]`; returns `(argmin, min)`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    [(x, fx), (x1, f1), (x2, f2)]
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoRegionOptimum {
    pub cost: f64,
    pub crossing: Point2,
    /// Crossing position along the interface, 0 at `a`, 1 at `b`.
    pub param: f64,
}

/// Best path from `s` (weight `alpha1` side) to `t` (weight `alpha2` side)
/// crossing the interface segment `a b` once.
pub fn snell_two_region_optimum(
    alpha1: f64,
    alpha2: f64,
    a: Point2,
    b: Point2,
    s: Point2,
    t: Point2,
) -> TwoRegionOptimum {
    let cost = |u: f64| {
        let x = a.lerp(b, u);
        alpha1 * s.dist(x) + alpha2 * x.dist(t)
    };
    let (u, c) = golden_section(cost, 0.0, 1.0, 1e-12);
    TwoRegionOptimum {
        cost: c,
        crossing: a.lerp(b, u),
        param: u,
    }
}
