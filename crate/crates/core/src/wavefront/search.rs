//! Probing rays of a logical family and the binary searches over them.
//!
//! A beam is the contiguous range `[lo, hi]` of one family whose rays share
//! an edge sequence. Its discrete rays are `lo`, the integers strictly
//! between, and `hi`; searches materialize only the rays they probe.

use crate::geometry::{Point2, Vec2};
use crate::optics::{
    face_exit, find_hit_at_angle, walk_sequence, Angle, EdgeFrame, Exit, HitAtAngle, HitQuery,
    ANGLE_TOL,
};
use crate::subdivision::{EdgeId, FaceId, PlanarSubdivision, VertexId};

use super::family::Family;

/// A ray inside a face, ready to be continued to the face's boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayState {
    pub pos: Point2,
    pub dir: Vec2,
    pub face: FaceId,
    /// Weighted distance from the global source at `pos`.
    pub dist: f64,
    /// Edge the ray is currently on (excluded when finding the exit).
    pub skip: Option<EdgeId>,
}

/// A ray state together with where it leaves its face.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Strike {
    pub state: RayState,
    pub exit: Exit,
    /// Weighted distance from the global source at the exit point.
    pub dist: f64,
}

impl Strike {
    pub fn from_state(sub: &PlanarSubdivision, state: RayState) -> Option<Self> {
        let exit = face_exit(sub, state.face, state.pos, state.dir, state.skip)?;
        Some(Self {
            state,
            exit,
            dist: state.dist + sub.face(state.face).weight as f64 * exit.dist,
        })
    }
}

/// State of ray `param` after crossing `seq`.
pub fn ray_state(
    sub: &PlanarSubdivision,
    fam: &Family,
    param: f64,
    seq: &[EdgeId],
) -> Option<RayState> {
    let origin = fam.origin(param);
    let walk = walk_sequence(sub, origin, fam.dir(param), fam.face, seq, false).ok()?;
    Some(RayState {
        pos: walk.last_point(origin),
        dir: walk.dir,
        face: walk.face,
        dist: fam.base_dist(param) + walk.weighted,
        skip: seq.last().copied().or(fam.host_edge),
    })
}

/// Materializes ray `param` and finds where it leaves its current face.
pub fn probe(sub: &PlanarSubdivision, fam: &Family, param: f64, seq: &[EdgeId]) -> Option<Strike> {
    Strike::from_state(sub, ray_state(sub, fam, param, seq)?)
}

/// A ray parameter together with its strike.
pub type Probed = (f64, Strike);

/// The discrete rays of a beam `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    first: f64,
    ints: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64) -> Self {
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        let first = lo.floor() + 1.0;
        let last = hi.ceil() - 1.0;
        let ints = if last >= first {
            (last - first) as usize + 1
        } else {
            0
        };
        Self {
            lo,
            hi,
            first,
            ints,
        }
    }

    /// Number of rays, siblings included; never zero.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        if self.hi > self.lo {
            self.ints + 2
        } else {
            1
        }
    }

    pub fn at(&self, i: usize) -> f64 {
        if i == 0 {
            self.lo
        } else if i <= self.ints {
            self.first + (i - 1) as f64
        } else {
            self.hi
        }
    }
}

/// Adjacent indices `(i, i + 1)` with `pred(i)` true and `pred(i + 1)`
/// false, assuming `pred(0)` is true and `pred(len - 1)` false.
pub fn bracket(
    len: usize,
    mut pred: impl FnMut(usize) -> bool,
    probes: &mut u64,
) -> (usize, usize) {
    let (mut lo, mut hi) = (0, len - 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        *probes += 1;
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Incidence of a strike against its exit edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Incidence {
    pub theta: Angle,
    /// Signed tangential component of the direction along the edge's
    /// `ends[0] → ends[1]` tangent.
    pub tangential: f64,
    pub theta_c: Option<Angle>,
    /// Whether the ray passes into the next face.
    pub passes: bool,
    pub next_face: Option<FaceId>,
}

pub fn incidence(sub: &PlanarSubdivision, s: &Strike) -> Incidence {
    let frame = EdgeFrame::new(sub, s.exit.edge, s.state.face);
    let tangential = s.state.dir.dot(frame.tangent);
    let next_face = sub.other_face(s.exit.edge, s.state.face);
    let a_in = sub.face(s.state.face).weight;
    let (passes, theta_c) = match next_face {
        None => (false, None),
        Some(g) => {
            let a_out = sub.face(g).weight;
            let crit = crate::optics::critical_angle(a_in, a_out);
            let passes =
                a_out >= a_in || tangential.abs() * a_in as f64 / (a_out as f64) < 1.0 - ANGLE_TOL;
            (passes, crit)
        }
    };
    Incidence {
        theta: frame.incidence(s.state.dir),
        tangential,
        theta_c,
        passes,
        next_face,
    }
}

/// Adjacent discrete rays `(a, b)` of the beam with `pred` true at `a` and
/// false at `b`, given that it holds at `lo` and fails at `hi`. A ray that
/// cannot be traced counts as failing.
pub fn bracket_strikes(
    sub: &PlanarSubdivision,
    fam: &Family,
    seq: &[EdgeId],
    lo: (f64, Strike),
    hi: (f64, Strike),
    pred: impl Fn(&Strike) -> bool,
) -> Option<(Probed, Probed, u64)> {
    let grid = Grid::new(lo.0, hi.0);
    let mut probes = 0;
    let mut first = lo.1;
    let mut second = Some(hi.1);
    let (i, j) = bracket(
        grid.len(),
        |k| match probe(sub, fam, grid.at(k), seq) {
            Some(s) if pred(&s) => {
                first = s;
                true
            }
            other => {
                second = other;
                false
            }
        },
        &mut probes,
    );
    let s_i = if i == 0 { lo.1 } else { first };
    let s_j = if j + 1 == grid.len() {
        hi.1
    } else {
        second.or_else(|| probe(sub, fam, grid.at(j), seq))?
    };
    Some(((grid.at(i), s_i), (grid.at(j), s_j), probes))
}

/// Result of splitting a beam around the apex between two exit edges.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitRays {
    /// Last discrete ray leaving through the low sibling's edge.
    pub r1: f64,
    /// First discrete ray leaving through the high sibling's edge.
    pub r2: f64,
    pub s1: Strike,
    pub s2: Strike,
    pub apex: VertexId,
    pub probes: u64,
}

/// Binary search for the adjacent discrete rays on either side of the apex
/// shared by the exit edges of `lo` and `hi`.
pub fn find_split_rays(
    sub: &PlanarSubdivision,
    fam: &Family,
    seq: &[EdgeId],
    lo: (f64, Strike),
    hi: (f64, Strike),
) -> Option<SplitRays> {
    let e_i = lo.1.exit.edge;
    let apex = sub.shared_vertex(e_i, hi.1.exit.edge)?;
    let ((r1, s1), (r2, s2), probes) =
        bracket_strikes(sub, fam, seq, lo, hi, |s| s.exit.edge == e_i)?;
    Some(SplitRays {
        r1,
        r2,
        s1,
        s2,
        apex,
        probes,
    })
}

/// Continuous bisection between a bracketing pair for the ray through the
/// apex. Returns the parameter and its strike on the low side.
pub fn exact_apex_ray(
    sub: &PlanarSubdivision,
    fam: &Family,
    seq: &[EdgeId],
    r1: (f64, Strike),
    r2: f64,
) -> (f64, Strike) {
    let e_i = r1.1.exit.edge;
    let (mut a, mut b) = (r1.0, r2);
    let mut best = r1.1;
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        match probe(sub, fam, m, seq) {
            Some(s) if s.exit.edge == e_i => {
                a = m;
                best = s;
            }
            _ => b = m,
        }
    }
    (a, best)
}

/// Split of a parallel critically reflected beam around an apex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReflectedSplit {
    /// Parameter of the ray through the apex.
    pub param: f64,
    pub strike: Option<Strike>,
    /// New high end of the low part (one spacing before `param`).
    pub left_hi: f64,
    /// New low end of the high part (one spacing after `param`).
    pub right_lo: f64,
}

/// Parallel rays keep their direction through every refraction, so the
/// signed offset of the apex from a ray is affine in the parameter.
pub fn find_critically_reflected_ray(
    sub: &PlanarSubdivision,
    fam: &Family,
    seq: &[EdgeId],
    lo: (f64, Strike),
    hi: (f64, Strike),
    apex: VertexId,
) -> ReflectedSplit {
    let v = sub.point(apex);
    let side = |s: &Strike| s.state.dir.cross(v - s.state.pos);
    let (sa, sb) = (side(&lo.1), side(&hi.1));
    let t = if sa == sb {
        0.5
    } else {
        (sa / (sa - sb)).clamp(0.0, 1.0)
    };
    let param = lo.0 + (hi.0 - lo.0) * t;
    let strike = ray_state(sub, fam, param, seq).and_then(|st| Strike::from_state(sub, st));
    ReflectedSplit {
        param,
        strike,
        left_hi: (param - 1.0).max(lo.0),
        right_lo: (param + 1.0).min(hi.0),
    }
}

/// Outcome of the search for a critical point of entry on a beam's exit
/// edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalEntrySearch {
    /// Discrete ray on the passing side of the boundary.
    pub r_pass: f64,
    /// Discrete ray on the blocked side.
    pub r_block: f64,
    pub s_pass: Strike,
    pub s_block: Strike,
    /// Exact critical ray: parameter and hit.
    pub hit: Option<(f64, HitAtAngle)>,
    pub probes: u64,
}

/// Binary search for the adjacent discrete rays on either side of the
/// passing/blocked boundary at the common exit edge.
pub fn find_pass_boundary(
    sub: &PlanarSubdivision,
    fam: &Family,
    seq: &[EdgeId],
    lo: (f64, Strike),
    hi: (f64, Strike),
) -> Option<(Probed, Probed, u64)> {
    let e = lo.1.exit.edge;
    let lo_passes = incidence(sub, &lo.1).passes;
    bracket_strikes(sub, fam, seq, lo, hi, |s| {
        s.exit.edge == e && incidence(sub, s).passes == lo_passes
    })
}

/// Finds where a beam from a point source strikes its exit edge at exactly
/// the critical angle. Requires one sibling passing and one blocked.
pub fn find_critical_point_of_entry(
    sub: &PlanarSubdivision,
    fam: &Family,
    seq: &[EdgeId],
    lo: (f64, Strike),
    hi: (f64, Strike),
) -> Option<CriticalEntrySearch> {
    let e = lo.1.exit.edge;
    let lo_passes = incidence(sub, &lo.1).passes;
    let (a, b, probes) = find_pass_boundary(sub, fam, seq, lo, hi)?;
    let ((r_pass, s_pass), (r_block, s_block)) = if lo_passes { (a, b) } else { (b, a) };
    let inc = incidence(sub, &s_block);
    let theta_c = inc.theta_c?;
    let hit = if fam.is_point_source() && s_block.exit.edge == e && s_pass.exit.edge == e {
        let mut edges = seq.to_vec();
        edges.push(e);
        let q = HitQuery {
            origin: fam.origin(0.0),
            origin_face: fam.face,
            edges: &edges,
            theta: theta_c,
            tangent_sign: inc.tangential,
            interval: (s_pass.exit.param, s_block.exit.param),
        };
        find_hit_at_angle(sub, &q).and_then(|h| Some((fam.param_of_dir(h.launch_dir, r_pass)?, h)))
    } else {
        None
    };
    Some(CriticalEntrySearch {
        r_pass,
        r_block,
        s_pass,
        s_block,
        hit,
        probes,
    })
}

/// Adjacent discrete rays around a change of sign of the tangential
/// component at the common exit edge.
pub fn find_sign_change(
    sub: &PlanarSubdivision,
    fam: &Family,
    seq: &[EdgeId],
    lo: (f64, Strike),
    hi: (f64, Strike),
) -> Option<(Probed, Probed, u64)> {
    let sign = incidence(sub, &lo.1).tangential > 0.0;
    let e = lo.1.exit.edge;
    bracket_strikes(sub, fam, seq, lo, hi, |s| {
        s.exit.edge == e && (incidence(sub, s).tangential > 0.0) == sign
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_enumeration() {
        let g = Grid::new(0.0, 4.0);
        assert_eq!(g.len(), 5);
        assert_eq!(
            (0..5).map(|i| g.at(i)).collect::<Vec<_>>(),
            vec![0.0, 1.0, 2.0, 3.0, 4.0]
        );
        let g = Grid::new(0.5, 2.25);
        assert_eq!(
            (0..g.len()).map(|i| g.at(i)).collect::<Vec<_>>(),
            vec![0.5, 1.0, 2.0, 2.25]
        );
        assert_eq!(Grid::new(3.0, 3.0).len(), 1);
        assert_eq!(Grid::new(3.0, 3.5).len(), 2);
    }

    #[test]
    fn bracket_counts() {
        for n in 2..200usize {
            for cut in 0..n - 1 {
                let mut probes = 0;
                let (i, j) = bracket(n, |k| k <= cut, &mut probes);
                assert_eq!((i, j), (cut, cut + 1));
                assert!(probes <= (n as f64).log2().ceil() as u64);
            }
        }
    }
}
