//! Approximate weighted-region shortest paths on triangulated planar
//! subdivisions.
//!
//! Each face of the subdivision carries an integer weight; a path pays
//! `weight × length` inside every face it crosses, and travel along an edge
//! costs the smaller of the two adjacent weights. The [`wavefront`] engine
//! propagates a discretized front of refracting rays from the source, in the
//! spirit of continuous Dijkstra, and returns an explicit path whose
//! refraction points satisfy Snell's law. The [`oracle`] module provides an
//! independent Steiner-point graph approximation used for cross-checking.

pub mod cli;
pub mod geometry;
pub mod optics;
pub mod oracle;
pub mod subdivision;
pub mod wavefront;

pub use geometry::{Point2, Vec2};
pub use subdivision::{parse_mesh, serialize_mesh, MeshError, PlanarSubdivision};
pub use wavefront::{shortest_path, PathResult, SolverConfig, SolverError};
