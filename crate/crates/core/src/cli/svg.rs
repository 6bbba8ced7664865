//! Static SVG rendering of a mesh and a solved path.

use std::fmt::Write;

use crate::geometry::{Point2, Vec2};
use crate::optics::trace_ray;
use crate::subdivision::{FaceId, PlanarSubdivision, VertexId};
use crate::wavefront::{PathResult, SegmentKind};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SvgOptions {
    /// Rays fanned evenly from the source and traced through the mesh.
    pub overlay_rays: usize,
    /// Mark the critical segments discovered by the solver.
    pub critical_segments: bool,
}

fn gray(weight: u32, lo: u32, hi: u32) -> u8 {
    if hi == lo {
        return 220;
    }
    let t = (weight - lo) as f64 / (hi - lo) as f64;
    (235.0 - 175.0 * t).round() as u8
}

/// SVG y grows downwards, so every y coordinate is negated.
fn xy(p: Point2) -> String {
    format!("{},{}", p.x, -p.y)
}

fn face_towards(sub: &PlanarSubdivision, v: VertexId, d: Vec2) -> Option<FaceId> {
    let p = sub.point(v);
    sub.faces_of_vertex(v).ok()?.iter().copied().find(|&f| {
        let face = sub.face(f);
        let k = face.vertices.iter().position(|&x| x == v).expect("corner");
        let next = sub.point(face.vertices[(k + 1) % 3]) - p;
        let prev = sub.point(face.vertices[(k + 2) % 3]) - p;
        next.cross(d) >= 0.0 && d.cross(prev) >= 0.0
    })
}

/// Deterministic SVG: one polygon per face shaded by weight, the path as a
/// polyline, critical slides as `critical-slide` lines, and the optional
/// overlays.
pub fn render_svg(sub: &PlanarSubdivision, result: &PathResult, opts: &SvgOptions) -> String {
    let stats = sub.stats();
    let (mut x0, mut y0, mut x1, mut y1) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for p in sub.vertices() {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let (mx, my) = (0.05 * (x1 - x0), 0.05 * (y1 - y0));
    let stroke = 0.002 * (x1 - x0).max(y1 - y0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        x0 - mx,
        -y1 - my,
        x1 - x0 + 2.0 * mx,
        y1 - y0 + 2.0 * my
    );
    let _ = writeln!(
        s,
        "<style>.face{{stroke:#444;stroke-width:{stroke}}} .path{{fill:none;stroke:#c00;stroke-width:{}}} \
         .critical-slide{{stroke:#06c;stroke-width:{}}} .critical-segment{{stroke:#0a0;stroke-width:{stroke};stroke-dasharray:{} {}}} \
         .ray{{fill:none;stroke:#e80;stroke-width:{}}}</style>",
        3.0 * stroke,
        5.0 * stroke,
        4.0 * stroke,
        2.0 * stroke,
        0.5 * stroke
    );
    for (f, face) in sub.faces().iter().enumerate() {
        let pts: Vec<String> = face.vertices.iter().map(|&v| xy(sub.point(v))).collect();
        let g = gray(face.weight, stats.min_weight, stats.max_weight);
        let _ = writeln!(
            s,
            r#"<polygon class="face" data-face="{f}" data-weight="{}" fill="rgb({g},{g},{g})" points="{}"/>"#,
            face.weight,
            pts.join(" ")
        );
    }
    if opts.critical_segments {
        for c in &result.critical_segments {
            let _ = writeln!(
                s,
                r#"<line class="critical-segment" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                c.start.x,
                -c.start.y,
                sub.point(c.far).x,
                -sub.point(c.far).y
            );
        }
    }
    if opts.overlay_rays > 0 {
        let src = result.source;
        let origin = sub.point(src);
        for i in 0..opts.overlay_rays {
            let d = Point2::from_angle(
                (i as f64 + 0.5) * std::f64::consts::TAU / opts.overlay_rays as f64,
            );
            let Some(f) = face_towards(sub, src, d) else {
                continue;
            };
            let Ok(rec) = trace_ray(
                sub,
                origin,
                d,
                f,
                4 * stats.faces,
                1e-9 * stats.max_edge_length,
            ) else {
                continue;
            };
            let mut pts = vec![xy(origin)];
            pts.extend(rec.crossings.iter().map(|c| xy(c.point)));
            pts.push(xy(rec.end));
            let _ = writeln!(s, r#"<polyline class="ray" points="{}"/>"#, pts.join(" "));
        }
    }
    if !result.polyline.is_empty() {
        let pts: Vec<String> = result.polyline.iter().map(|&p| xy(p)).collect();
        let _ = writeln!(s, r#"<polyline class="path" points="{}"/>"#, pts.join(" "));
        for seg in result
            .segments
            .iter()
            .filter(|g| g.kind == SegmentKind::CriticalSlide)
        {
            let (a, b) = (result.polyline[seg.from], result.polyline[seg.to]);
            let _ = writeln!(
                s,
                r#"<line class="critical-slide" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                a.x, -a.y, b.x, -b.y
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
