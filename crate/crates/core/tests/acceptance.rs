//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wrsp_core::optics::{
    angular_spacing, critical_angle, find_hit_at_angle, trace_ray, walk_sequence, Angle, EdgeFrame,
    HitQuery, SpacingClamp,
};
use wrsp_core::oracle::{oracle_estimate, snell_two_region_optimum};
use wrsp_core::subdivision::{random_mesh, GenOptions, MeshStats, RawMesh};
use wrsp_core::wavefront::family::{Family, FamilyKind};
use wrsp_core::wavefront::search::{
    find_critical_point_of_entry, find_split_rays, incidence, probe, Grid, Strike,
};
use wrsp_core::wavefront::{CrossingKind, PathResult};
use wrsp_core::{shortest_path, PlanarSubdivision, Point2, SolverConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn audited(epsilon: f64) -> SolverConfig {
    SolverConfig {
        epsilon,
        audit: true,
        ..SolverConfig::default()
    }
}

/// Every run made by the suite, for the cross-cutting criteria 4 and 5.
struct Run {
    n: usize,
    result: PathResult,
}

fn criterion_1(runs: &mut Vec<Run>) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_face: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    let mut failures = Vec::new();
    for i in 0..20u64 {
        let alpha = 1 + (i % 5) as u32;
        let opts = GenOptions {
            interior_points: 1 + (i as usize % 11),
            min_weight: alpha,
            max_weight: alpha,
            ..GenOptions::default()
        };
        let sub = random_mesh(1000 + i, &opts).unwrap();
        let n = sub.vertex_count();
        let mut rng = ChaCha8Rng::seed_from_u64(i);
        let s = rng.gen_range(0..n);
        let t = (s + rng.gen_range(1..n)) % n;
        let start = Instant::now();
        let r = shortest_path(&sub, s, t, &audited(0.1)).unwrap();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        let exact = alpha as f64 * sub.point(s).dist(sub.point(t));
        let err = r.cost.map_or(f64::INFINITY, |c| (c - exact).abs() / exact);
        worst = worst.max(err);
        if err > 1e-6 {
            failures.push(format!("mesh {i}: rel err {err:.3e}"));
        }
        runs.push(Run { n, result: r });

        let [a, b, _] = sub.face(0).vertices;
        let r = shortest_path(&sub, a, b, &audited(0.1)).unwrap();
        let exact = alpha as f64 * sub.point(a).dist(sub.point(b));
        let err = r.cost.map_or(f64::INFINITY, |c| (c - exact).abs() / exact);
        worst_face = worst_face.max(err);
        if err > 1e-9 {
            failures.push(format!("mesh {i} shared face: rel err {err:.3e}"));
        }
        runs.push(Run { n, result: r });
    }
    Outcome {
        pass: failures.is_empty() && slowest < 1.0,
        detail: format!(
            "max rel err {worst:.2e} (random pairs), {worst_face:.2e} (shared face), slowest {slowest:.3}s {failures:?}"
        ),
    }
}

/// Triangulates the band between two x-sorted rows that start and end at
/// the same x.
fn zipper(raw: &mut RawMesh, lower: &[usize], upper: &[usize], weight: u32) {
    let (mut i, mut j) = (0, 0);
    while i + 1 < lower.len() || j + 1 < upper.len() {
        let take_lower = j + 1 == upper.len()
            || (i + 1 < lower.len()
                && raw.vertices[lower[i + 1]].x <= raw.vertices[upper[j + 1]].x);
        if take_lower {
            raw.push_face(lower[i], lower[i + 1], upper[j], weight);
            i += 1;
        } else {
            raw.push_face(lower[i], upper[j + 1], upper[j], weight);
            j += 1;
        }
    }
}

fn row(raw: &mut RawMesh, y: f64, xs: &[f64]) -> Vec<usize> {
    let mut xs = xs.to_vec();
    xs.sort_by(f64::total_cmp);
    xs.into_iter()
        .map(|x| raw.push_vertex(Point2::new(x, y)))
        .collect()
}

fn criterion_2(runs: &mut Vec<Run>) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    let mut below = 0;
    for i in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + i);
        let (a1, a2) = (rng.gen_range(1..=5u32), rng.gen_range(1..=5u32));
        let (h1, h2) = (rng.gen_range(1.0..4.0), rng.gen_range(1.0..4.0));
        let (xs, xt) = (rng.gen_range(1.0..9.0), rng.gen_range(1.0..9.0));
        let mut mid = vec![0.0, 10.0];
        for _ in 0..rng.gen_range(0..3) {
            mid.push(rng.gen_range(1.0..9.0));
        }
        let mut raw = RawMesh::default();
        let bottom = row(&mut raw, 0.0, &[0.0, xs, 10.0]);
        let middle = row(&mut raw, h1, &mid);
        let top = row(&mut raw, h1 + h2, &[0.0, xt, 10.0]);
        zipper(&mut raw, &bottom, &middle, a1);
        zipper(&mut raw, &middle, &top, a2);
        let sub = PlanarSubdivision::from_raw(&raw).unwrap();
        let (s, t) = (bottom[1], top[1]);
        let start = Instant::now();
        let r = shortest_path(&sub, s, t, &audited(0.05)).unwrap();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        let opt = snell_two_region_optimum(
            a1 as f64,
            a2 as f64,
            Point2::new(0.0, h1),
            Point2::new(10.0, h1),
            sub.point(s),
            sub.point(t),
        );
        let cost = r.cost.unwrap_or(f64::INFINITY);
        if cost < opt.cost * (1.0 - 1e-12) {
            below += 1;
        }
        worst = worst.max((cost - opt.cost).abs() / opt.cost);
        runs.push(Run {
            n: sub.vertex_count(),
            result: r,
        });
    }
    Outcome {
        pass: worst <= 0.05f64.max(1e-3) && slowest < 5.0,
        detail: format!("max rel err {worst:.2e} (tolerance 5e-2), below optimum {below}, slowest {slowest:.3}s"),
    }
}

fn criterion_3(runs: &mut Vec<Run>) -> Outcome {
    let eps = 0.05;
    let mut failures = Vec::new();
    let mut slowest: f64 = 0.0;
    let mut max_ratio: f64 = 0.0;
    let mut literal_lower_misses = 0;
    for i in 0..30u64 {
        let opts = GenOptions {
            interior_points: 2 + (i as usize % 4),
            min_weight: 1,
            max_weight: 3,
            ..GenOptions::default()
        };
        let sub = random_mesh(3000 + i, &opts).unwrap();
        assert!(sub.faces().len() <= 12);
        let n = sub.vertex_count();
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + i);
        let s = rng.gen_range(0..n);
        let t = (s + rng.gen_range(1..n)) % n;
        let start = Instant::now();
        let r = shortest_path(&sub, s, t, &audited(eps)).unwrap();
        let est = oracle_estimate(&sub, s, t, 64).unwrap();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        let cost = r.cost.unwrap_or(f64::INFINITY);
        let upper = (1.0 + eps) * est.cost + est.slack;
        let lower = est.cost.min(est.fine_cost) - est.slack;
        max_ratio = max_ratio.max(cost / est.cost);
        if cost < est.cost - est.slack {
            literal_lower_misses += 1;
        }
        if cost > upper || cost < lower {
            failures.push(format!(
                "mesh {i}: engine {cost} oracle {} fine {} slack {}",
                est.cost, est.fine_cost, est.slack
            ));
        }
        runs.push(Run { n, result: r });
    }
    Outcome {
        pass: failures.is_empty() && slowest < 60.0,
        detail: format!(
            "max engine/oracle {max_ratio:.6}, below cost(k)−slack (informational) {literal_lower_misses}/30, slowest {slowest:.2}s {failures:?}"
        ),
    }
}

fn critical_slide_runs(runs: &mut Vec<Run>) {
    let meshes = [
        "v 0 0\nv 10 0\nv 10 1\nv 0 1\nv 5 -1\nf 0 1 2 5\nf 0 2 3 5\nf 0 4 1 1\n",
        "v 0 0\nv 8 0\nv 8 2\nv 0 2\nv 4 -2\nf 0 1 2 3\nf 0 2 3 3\nf 0 4 1 1\n",
    ];
    for text in meshes {
        let sub = wrsp_core::parse_mesh(text).unwrap();
        let r = shortest_path(&sub, 3, 2, &audited(0.1)).unwrap();
        runs.push(Run {
            n: sub.vertex_count(),
            result: r,
        });
    }
    for i in 0..10u64 {
        let opts = GenOptions {
            interior_points: 6,
            min_weight: 1,
            max_weight: 6,
            ..GenOptions::default()
        };
        let sub = random_mesh(4000 + i, &opts).unwrap();
        let r = shortest_path(&sub, 0, 2, &audited(0.1)).unwrap();
        runs.push(Run {
            n: sub.vertex_count(),
            result: r,
        });
    }
}

fn criterion_4(runs: &[Run]) -> Outcome {
    let mut refr = 0;
    let mut slides = 0;
    let mut worst_refr: f64 = 0.0;
    let mut worst_slide: f64 = 0.0;
    for run in runs {
        for c in &run.result.checks {
            match c.kind {
                CrossingKind::Refraction => {
                    refr += 1;
                    worst_refr = worst_refr.max(c.residual);
                }
                CrossingKind::SlideEntry | CrossingKind::SlideExit => {
                    slides += 1;
                    worst_slide = worst_slide.max(c.residual);
                }
            }
        }
    }
    Outcome {
        pass: worst_refr <= 1e-9 && worst_slide <= 1e-9 && refr > 0 && slides > 0,
        detail: format!(
            "{refr} refraction checks (max residual {worst_refr:.2e}), {slides} slide endpoint checks (max |θ−θc| {worst_slide:.2e})"
        ),
    }
}

fn criterion_5(runs: &[Run]) -> Outcome {
    let mut pops = 0;
    let mut lemma2 = 0;
    let mut repeats = 0;
    let mut siblings = 0;
    let mut sibling_checks = 0;
    let mut max_repeat = 0;
    for run in runs {
        let r = &run.result;
        pops += r.audit.pop_order_violations;
        lemma2 += u64::from(!r.slides_separated);
        max_repeat = max_repeat.max(r.stats.max_edge_repeat);
        repeats +=
            u64::from(r.stats.max_edge_repeat > 8 * run.n as u64) + r.audit.edge_repeat_violations;
        siblings += r.audit.sibling_violations;
        sibling_checks += r.audit.sibling_checks;
    }
    Outcome {
        pass: pops + lemma2 + repeats + siblings == 0 && sibling_checks > 0,
        detail: format!(
            "{} runs: pop-order violations {pops}, adjacent slides {lemma2}, edge-repeat violations {repeats} (max repeat {max_repeat}), sibling violations {siblings} over {sibling_checks} checks",
            runs.len()
        ),
    }
}

fn fan(vertex: usize, origin: Point2, step: f64, face: usize) -> Family {
    Family {
        kind: FamilyKind::VertexFan {
            vertex,
            origin,
            step,
        },
        face,
        host_edge: None,
        base: 0.0,
        tree: 0,
        node: 0,
        segment: None,
    }
}

/// Grid range of a vertex fan restricted to directions between `from` and
/// `to` (counter-clockwise).
fn wedge(step: f64, from: f64, to: f64) -> (f64, f64) {
    let to = if to <= from { to + TAU } else { to };
    (
        (from / step - 0.5).floor() + 1.0,
        (to / step - 0.5).ceil() - 1.0,
    )
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    let mut max_probes_over = i64::MIN;
    let mut sizes = Vec::new();
    for i in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(6000 + i);
        let fan_size = 10f64.powf(rng.gen_range(1.5..4.3));
        if i < 10 {
            // Split: fan from u through edge ab into face abc, split at c.
            let (w1, w2) = (rng.gen_range(1.0..4.0), rng.gen_range(1.0..4.0));
            let c = Point2::new(rng.gen_range(-1.0..1.0), 1.0 + rng.gen_range(0.5..3.0));
            let (a0, a1) = (rng.gen_range(1..=3u32), rng.gen_range(3..=6u32));
            let text = format!(
                "v 0 0\nv {} 1\nv {} 1\nv {} {}\nf 0 2 1 {a0}\nf 1 2 3 {a1}\n",
                -w1, w2, c.x, c.y
            );
            let sub = wrsp_core::parse_mesh(&text).unwrap();
            let ab = sub.find_edge(1, 2).unwrap();
            let from = (sub.point(2) - sub.point(0)).angle();
            let to = (sub.point(1) - sub.point(0)).angle();
            let step = (to - from) / fan_size;
            let fam = fan(0, sub.point(0), step, 0);
            let (lo, hi) = wedge(step, from, to);
            let seq = [ab];
            let grid = Grid::new(lo, hi);
            let strikes: Vec<Strike> = (0..grid.len())
                .map(|k| probe(&sub, &fam, grid.at(k), &seq).unwrap())
                .collect();
            let e_lo = strikes[0].exit.edge;
            let cut = strikes.iter().position(|s| s.exit.edge != e_lo).unwrap();
            let got = find_split_rays(
                &sub,
                &fam,
                &seq,
                (lo, strikes[0]),
                (hi, strikes[grid.len() - 1]),
            )
            .unwrap();
            let bound = (grid.len() as f64).log2().ceil() as i64 + 2;
            max_probes_over = max_probes_over.max(got.probes as i64 - bound);
            sizes.push(grid.len());
            if (got.r1, got.r2) != (grid.at(cut - 1), grid.at(cut)) || got.probes as i64 > bound {
                failures.push(format!(
                    "split {i}: got ({}, {}) probes {}",
                    got.r1, got.r2, got.probes
                ));
            }
        } else {
            // Critical entry: fan from u onto edge ab with a lighter far side.
            let h = rng.gen_range(0.5..2.0);
            let ux = rng.gen_range(-0.5..0.5);
            let (a_in, a_out) = (rng.gen_range(2..=6u32), 1u32);
            let text =
                format!("v {ux} {h}\nv -8 0\nv 8 0\nv 0 -2\nf 0 1 2 {a_in}\nf 1 3 2 {a_out}\n");
            let sub = wrsp_core::parse_mesh(&text).unwrap();
            let u = sub.point(0);
            let from = (sub.point(1) - u).angle();
            let down = -FRAC_PI_2;
            let step = (down - from) / fan_size;
            let fam = fan(0, u, step, 0);
            let (lo, hi) = wedge(step, from, down);
            let grid = Grid::new(lo, hi);
            let strikes: Vec<Strike> = (0..grid.len())
                .map(|k| probe(&sub, &fam, grid.at(k), &[]).unwrap())
                .collect();
            let passes: Vec<bool> = strikes.iter().map(|s| incidence(&sub, s).passes).collect();
            let cut = passes.iter().position(|&p| p).unwrap();
            let got = find_critical_point_of_entry(
                &sub,
                &fam,
                &[],
                (lo, strikes[0]),
                (hi, strikes[grid.len() - 1]),
            )
            .unwrap();
            let theta_c = critical_angle(a_in, a_out).unwrap().radians();
            let expect = Point2::new(ux - h * theta_c.tan(), 0.0);
            let hit_err = got
                .hit
                .map_or(f64::INFINITY, |(_, hit)| hit.point.dist(expect));
            let bound = (grid.len() as f64).log2().ceil() as i64 + 2;
            max_probes_over = max_probes_over.max(got.probes as i64 - bound);
            sizes.push(grid.len());
            if (got.r_block, got.r_pass) != (grid.at(cut - 1), grid.at(cut))
                || got.probes as i64 > bound
                || hit_err > 1e-9
            {
                failures.push(format!(
                    "entry {i}: got block {} pass {} probes {} hit err {hit_err:.2e}",
                    got.r_block, got.r_pass, got.probes
                ));
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "fan sizes {}..{}, max probes − (⌈log2 N⌉+2) = {max_probes_over} {failures:?}",
            sizes.iter().min().unwrap(),
            sizes.iter().max().unwrap()
        ),
    }
}

/// Corridor of `m` jittered quads along x, two triangles each.
fn corridor(rng: &mut ChaCha8Rng, m: usize) -> PlanarSubdivision {
    let mut raw = RawMesh::default();
    for i in 0..=m {
        let x = i as f64 + rng.gen_range(-0.2..0.2);
        raw.push_vertex(Point2::new(x, rng.gen_range(-0.2..0.2)));
        raw.push_vertex(Point2::new(
            x + rng.gen_range(-0.2..0.2),
            2.0 + rng.gen_range(-0.2..0.2),
        ));
    }
    for i in 0..m {
        let (a, b, c, d) = (2 * i, 2 * i + 1, 2 * i + 2, 2 * i + 3);
        raw.push_face(a, c, d, rng.gen_range(1..=6));
        raw.push_face(a, d, b, rng.gen_range(1..=6));
    }
    PlanarSubdivision::from_raw(&raw).unwrap()
}

/// Bisection over the launch angle for a ray from `origin` that meets the
/// last edge of `edges` at incidence `theta` with the given tangential sign.
fn hit_oracle(
    sub: &PlanarSubdivision,
    origin: Point2,
    face: usize,
    edges: &[usize],
    theta: f64,
    sign: f64,
    interval: (f64, f64),
) -> Option<Point2> {
    let target = *edges.last().unwrap();
    let eval = |phi: f64| -> Option<(f64, Point2, f64)> {
        let w = walk_sequence(sub, origin, Point2::from_angle(phi), face, edges, true).ok()?;
        let (p, u) = *w.points.last()?;
        let mut before = face;
        for &e in &edges[..edges.len() - 1] {
            before = sub.other_face(e, before)?;
        }
        let fr = EdgeFrame::new(sub, target, before);
        let tang = w.dir_before_last.dot(fr.tangent);
        if tang * sign <= 0.0 {
            return None;
        }
        Some((fr.incidence(w.dir_before_last).radians() - theta, p, u))
    };
    let samples = 20_000;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=samples {
        let phi = -PI + TAU * k as f64 / samples as f64;
        let Some((g, _, _)) = eval(phi) else {
            prev = None;
            continue;
        };
        if let Some((phi0, g0)) = prev {
            if g0 * g <= 0.0 {
                let (mut lo, mut hi, mut glo) = (phi0, phi, g0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid == lo || mid == hi {
                        break;
                    }
                    match eval(mid) {
                        Some((gm, _, _)) if gm * glo > 0.0 => {
                            lo = mid;
                            glo = gm;
                        }
                        Some(_) => hi = mid,
                        None => break,
                    }
                }
                let (_, p, u) = eval(lo).or_else(|| eval(hi))?;
                let (a, b) = (interval.0.min(interval.1), interval.0.max(interval.1));
                return (u >= a - 1e-9 && u <= b + 1e-9).then_some(p);
            }
        }
        prev = Some((phi, g));
    }
    None
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    let (mut hits, mut nils, mut done) = (0, 0, 0);
    let mut worst: f64 = 0.0;
    let mut seed = 7000;
    while done < 20 {
        seed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(3..7);
        let sub = corridor(&mut rng, m);
        let origin = Point2::new(0.3, rng.gen_range(0.6..1.4));
        let face = sub.locate(origin, 0.0).unwrap();
        let dir = Point2::from_angle(rng.gen_range(-0.9..0.9));
        let rec = trace_ray(&sub, origin, dir, face, 64, 1e-9).unwrap();
        let Some(k) = rec.crossings.iter().position(|c| {
            c.entered.is_some_and(|g| {
                sub.face(g).weight < sub.face(sub.other_face(c.edge, g).unwrap()).weight
            })
        }) else {
            continue;
        };
        let c = &rec.crossings[k];
        let edges: Vec<usize> = rec.crossings[..=k].iter().map(|c| c.edge).collect();
        let before = sub.other_face(c.edge, c.entered.unwrap()).unwrap();
        let theta =
            critical_angle(sub.face(before).weight, sub.face(c.entered.unwrap()).weight).unwrap();
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let interval = if done % 2 == 0 {
            (0.0, 1.0)
        } else {
            let a = rng.gen_range(0.0..0.7);
            (a, a + 0.3)
        };
        let q = HitQuery {
            origin,
            origin_face: face,
            edges: &edges,
            theta: Angle::new(theta.radians()),
            tangent_sign: sign,
            interval,
        };
        let got = find_hit_at_angle(&sub, &q).map(|h| h.point);
        let want = hit_oracle(&sub, origin, face, &edges, theta.radians(), sign, interval);
        match (got, want) {
            (Some(g), Some(w)) => {
                hits += 1;
                worst = worst.max(g.dist(w));
                if g.dist(w) > 1e-9 {
                    failures.push(format!("seed {seed}: distance {:.2e}", g.dist(w)));
                }
            }
            (None, None) => nils += 1,
            (g, w) => failures.push(format!("seed {seed}: got {g:?}, oracle {w:?}")),
        }
        done += 1;
    }
    Outcome {
        pass: failures.is_empty() && hits > 0 && nils > 0,
        detail: format!(
            "{hits} hits (max distance {worst:.2e}), {nils} NIL agreements {failures:?}"
        ),
    }
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("mesh.wsd");
    let sub = random_mesh(
        8000,
        &GenOptions {
            interior_points: 5,
            max_weight: 4,
            ..GenOptions::default()
        },
    )
    .unwrap();
    std::fs::write(&mesh, wrsp_core::serialize_mesh(&sub)).unwrap();
    let run = |tag: &str| {
        let svg = dir.path().join(format!("{tag}.svg"));
        let out = Command::new(env!("CARGO_BIN_EXE_wrsp"))
            .args(["solve", "--mesh"])
            .arg(&mesh)
            .args([
                "--source",
                "0",
                "--target",
                "2",
                "--oracle",
                "--steiner-per-edge",
                "16",
                "--overlay-rays",
                "24",
                "--svg",
            ])
            .arg(&svg)
            .output()
            .unwrap();
        (out.status.code(), out.stdout, std::fs::read(&svg).unwrap())
    };
    let (c1, j1, s1) = run("a");
    let (c2, j2, s2) = run("b");
    let value: serde_json::Value = serde_json::from_slice(&j1).unwrap();
    let again = serde_json::to_string_pretty(&value).unwrap() + "\n";
    let roundtrip = again.as_bytes() == j1.as_slice();
    Outcome {
        pass: c1 == Some(0) && c2 == Some(0) && j1 == j2 && s1 == s2 && roundtrip,
        detail: format!(
            "exit codes {c1:?}/{c2:?}, JSON identical {} ({} bytes), SVG identical {} ({} bytes), JSON round-trip {roundtrip}",
            j1 == j2,
            j1.len(),
            s1 == s2,
            s1.len()
        ),
    }
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

fn rel_err(approx: &BigRational, exact: &BigRational) -> f64 {
    ((approx - exact) / exact).abs().to_f64().unwrap()
}

fn criterion_9() -> Outcome {
    let mut worst_eps: f64 = 0.0;
    let mut worst_gamma: f64 = 0.0;
    let mut clamp_errors = Vec::new();
    let mut cases = 0;
    let mut unclamped = 0;
    for i in 0..24u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(9000 + i);
        let stats = MeshStats {
            n: rng.gen_range(3..=20),
            faces: 1,
            edges: 3,
            max_edge_length: rng.gen_range(0.5..50.0),
            min_weight: rng.gen_range(1..=3),
            max_weight: rng.gen_range(3..=9),
        };
        let eps = [0.5, 0.1, 0.05, 0.01][i as usize % 4];
        let k = [1.0, 4.0, 16.0][i as usize % 3];
        let clamp = if i % 3 == 0 {
            SpacingClamp {
                min_angle: f64::MIN_POSITIVE,
                max_rays: u64::MAX,
            }
        } else {
            SpacingClamp::default()
        };
        let sp = angular_spacing(&stats, eps, k, clamp);

        let n = BigRational::from_integer(BigInt::from(stats.n));
        let l = rational(stats.max_edge_length);
        let w = BigRational::from_integer(BigInt::from(stats.min_weight));
        let big_w = BigRational::from_integer(BigInt::from(stats.max_weight));
        let ep = rational(eps) / (&n * (&n * &n + &l * &big_w));
        let mut gamma = &w * &ep / (BigRational::from_integer(BigInt::from(2)) * &big_w);
        let base = &ep / rational(k);
        gamma *= num_traits::pow(base, stats.n * stats.n);
        worst_eps = worst_eps.max(rel_err(&rational(sp.epsilon_prime), &ep));
        let two = BigRational::from_integer(BigInt::from(2));
        let scale = if sp.gamma_theory.exp2 >= 0 {
            num_traits::pow(two.clone(), sp.gamma_theory.exp2 as usize)
        } else {
            BigRational::one() / num_traits::pow(two.clone(), (-sp.gamma_theory.exp2) as usize)
        };
        worst_gamma = worst_gamma.max(rel_err(
            &(rational(sp.gamma_theory.mantissa) * scale),
            &gamma,
        ));

        let min_angle = rational(clamp.min_angle);
        let angle_clamped = gamma < min_angle;
        let expect_gamma = if angle_clamped {
            clamp.min_angle
        } else {
            gamma.to_f64().unwrap_or(0.0)
        };
        let wanted = (TAU / sp.gamma).ceil();
        let count_clamped = wanted > clamp.max_rays as f64;
        let expect_count = if count_clamped {
            clamp.max_rays
        } else {
            wanted as u64
        };
        if !angle_clamped {
            unclamped += 1;
        }
        let gamma_ok = (sp.gamma - expect_gamma).abs() <= 1e-12 * expect_gamma;
        if !gamma_ok
            || sp.ray_count != expect_count
            || sp.clamped != (angle_clamped || count_clamped)
        {
            clamp_errors.push(format!("case {i}"));
        }
        cases += 1;
    }
    Outcome {
        pass: worst_eps <= 1e-12 && worst_gamma <= 1e-12 && clamp_errors.is_empty() && unclamped > 0,
        detail: format!(
            "{cases} cases ({unclamped} not angle-clamped): max rel err ε′ {worst_eps:.2e}, γ {worst_gamma:.2e}, clamp mismatches {clamp_errors:?}"
        ),
    }
}

fn main() {
    let mut runs = Vec::new();
    let mut report = Vec::new();
    let mut timed = |name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let line = format!(
            "[{}] {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        println!("{line}");
        report.push(o.pass);
    };
    timed("1 homogeneous exactness", &mut || criterion_1(&mut runs));
    timed("2 two-region Snell", &mut || criterion_2(&mut runs));
    timed("3 oracle envelope", &mut || criterion_3(&mut runs));
    critical_slide_runs(&mut runs);
    timed("4 Snell residuals", &mut || criterion_4(&runs));
    timed("5 structural invariants", &mut || criterion_5(&runs));
    timed("6 binary-search equivalence", &mut criterion_6);
    timed("7 hit-at-angle oracle", &mut criterion_7);
    timed("8 determinism", &mut criterion_8);
    timed("9 formula fidelity", &mut criterion_9);
    let failed = report.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        report.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
