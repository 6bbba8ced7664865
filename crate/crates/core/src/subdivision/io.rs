//! The line-oriented mesh text format.
//!
//! ```text
//! # comment
//! v <x> <y>
//! f <i> <j> <k> <weight>
//! ```

use std::fmt::Write as _;

use super::{MeshError, PlanarSubdivision, RawFace, RawMesh};
use crate::geometry::Point2;

/// Parses the text format without semantic validation.
pub fn parse_raw_mesh(text: &str) -> Result<RawMesh, MeshError> {
    let mut raw = RawMesh::default();
    for (idx, full_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match full_line.find('#') {
            Some(cut) => &full_line[..cut],
            None => full_line,
        };
        let tokens = tokenize(line);
        let Some(&(col, kw)) = tokens.first() else {
            continue;
        };
        let syntax = |column: usize, message: String| MeshError::Syntax {
            line: line_no,
            column,
            message,
        };
        let expect = |n: usize, what: &str| {
            if tokens.len() != n + 1 {
                let column = tokens.get(n + 1).map_or(line.len() + 1, |t| t.0);
                return Err(syntax(
                    column,
                    format!(
                        "'{kw}' expects {n} fields ({what}), found {}",
                        tokens.len() - 1
                    ),
                ));
            }
            Ok(())
        };
        match kw {
            "v" => {
                expect(2, "x y")?;
                let mut xy = [0.0; 2];
                for (slot, &(c, tok)) in xy.iter_mut().zip(&tokens[1..]) {
                    *slot = tok
                        .parse::<f64>()
                        .map_err(|_| syntax(c, format!("invalid coordinate '{tok}'")))?;
                }
                raw.vertices.push(Point2::new(xy[0], xy[1]));
            }
            "f" => {
                expect(4, "i j k weight")?;
                let mut ids = [0usize; 3];
                for (slot, &(c, tok)) in ids.iter_mut().zip(&tokens[1..4]) {
                    *slot = tok
                        .parse::<usize>()
                        .map_err(|_| syntax(c, format!("invalid vertex index '{tok}'")))?;
                }
                let (c, tok) = tokens[4];
                let weight = tok
                    .parse::<f64>()
                    .map_err(|_| syntax(c, format!("invalid weight '{tok}'")))?;
                raw.faces.push(RawFace {
                    vertices: ids,
                    weight,
                    line: line_no,
                });
            }
            other => return Err(syntax(col, format!("unknown record type '{other}'"))),
        }
    }
    Ok(raw)
}

/// Tokens with their 1-based byte columns.
fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

/// Parses and validates a mesh.
pub fn parse_mesh(text: &str) -> Result<PlanarSubdivision, MeshError> {
    PlanarSubdivision::from_raw(&parse_raw_mesh(text)?)
}

/// Deterministic text form; `parse_mesh` reproduces the subdivision exactly.
pub fn serialize_mesh(sub: &PlanarSubdivision) -> String {
    let mut out = String::new();
    let s = sub.stats();
    let _ = writeln!(out, "# {} vertices, {} faces", s.n, s.faces);
    for p in sub.vertices() {
        let _ = writeln!(out, "v {:?} {:?}", p.x, p.y);
    }
    for f in sub.faces() {
        let [a, b, c] = f.vertices;
        let _ = writeln!(out, "f {a} {b} {c} {}", f.weight);
    }
    out
}
