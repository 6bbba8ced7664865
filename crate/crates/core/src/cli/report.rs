//! The JSON run report.

use serde::Serialize;

use crate::geometry::Point2;
use crate::oracle::OracleEstimate;
use crate::subdivision::VertexId;
use crate::wavefront::{
    AuditReport, CrossingCheck, EffectiveConfig, PathPoint, PathResult, PathSegment,
    SegmentSummary, SolverStats, Status,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputDigest {
    pub sha256: String,
    pub n: usize,
    pub faces: usize,
    pub w: u32,
    #[serde(rename = "W")]
    pub big_w: u32,
    #[serde(rename = "L")]
    pub l: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub source: VertexId,
    pub target: VertexId,
    #[serde(flatten)]
    pub solver: EffectiveConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EngineReport {
    #[serde(flatten)]
    pub status: Status,
    pub cost: Option<f64>,
    pub label_cost: Option<f64>,
    pub polyline: Vec<Point2>,
    pub points: Vec<PathPoint>,
    pub segments: Vec<PathSegment>,
    pub checks: Vec<CrossingCheck>,
    pub max_snell_residual: f64,
    pub max_slide_angle_error: f64,
    pub slides_separated: bool,
    pub critical_segments: Vec<SegmentSummary>,
    pub stats: SolverStats,
    pub audit: AuditReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub k: usize,
    pub fine_k: usize,
    pub cost: Option<f64>,
    pub fine_cost: Option<f64>,
    /// `|cost(k) − fine_cost|`.
    pub slack: Option<f64>,
}

impl OracleReport {
    pub fn new(k: usize, est: Option<&OracleEstimate>) -> Self {
        Self {
            k,
            fine_k: 4 * k,
            cost: est.map(|e| e.cost),
            fine_cost: est.map(|e| e.fine_cost),
            slack: est.map(|e| e.slack),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    /// Engine cost over oracle cost.
    pub ratio: Option<f64>,
    pub epsilon: f64,
    /// `(1 + ε)·cost(k) + slack`.
    pub upper_bound: Option<f64>,
    /// `min(cost, fine_cost) − slack`.
    pub lower_bound: Option<f64>,
    pub within_envelope: Option<bool>,
}

impl Comparison {
    pub fn new(engine_cost: Option<f64>, oracle: &OracleReport, epsilon: f64) -> Self {
        let upper = oracle
            .cost
            .zip(oracle.slack)
            .map(|(c, s)| (1.0 + epsilon) * c + s);
        let lower = oracle
            .cost
            .zip(oracle.fine_cost)
            .zip(oracle.slack)
            .map(|((c, f), s)| c.min(f) - s);
        Self {
            ratio: engine_cost
                .zip(oracle.cost)
                .map(|(e, o)| if o > 0.0 { e / o } else { 1.0 }),
            epsilon,
            upper_bound: upper,
            lower_bound: lower,
            within_envelope: engine_cost
                .zip(upper.zip(lower))
                .map(|(e, (hi, lo))| e <= hi && e >= lo),
        }
    }
}

/// Wall-clock seconds per phase.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timings {
    pub load: f64,
    pub engine: f64,
    pub oracle: Option<f64>,
    pub svg: Option<f64>,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub input: InputDigest,
    pub config: ConfigEcho,
    pub engine: EngineReport,
    pub oracle: Option<OracleReport>,
    pub comparison: Option<Comparison>,
    pub timings: Option<Timings>,
}

impl RunReport {
    pub fn new(
        input: InputDigest,
        r: PathResult,
        oracle: Option<OracleReport>,
        comparison: Option<Comparison>,
        timings: Option<Timings>,
    ) -> Self {
        Self {
            input,
            config: ConfigEcho {
                source: r.source,
                target: r.target,
                solver: r.config,
            },
            engine: EngineReport {
                status: r.status,
                cost: r.cost,
                label_cost: r.label_cost,
                polyline: r.polyline,
                points: r.points,
                segments: r.segments,
                checks: r.checks,
                max_snell_residual: r.max_snell_residual,
                max_slide_angle_error: r.max_slide_angle_error,
                slides_separated: r.slides_separated,
                critical_segments: r.critical_segments,
                stats: r.stats,
                audit: r.audit,
            },
            oracle,
            comparison,
            timings,
        }
    }

    /// Pretty JSON with sorted keys, so that parsing and re-serializing
    /// reproduces the same bytes.
    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        let value = serde_json::to_value(self)?;
        let mut s = serde_json::to_string_pretty(&value)?;
        s.push('\n');
        Ok(s)
    }
}
