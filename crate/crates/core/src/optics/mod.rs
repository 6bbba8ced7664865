//! Local ray physics: critical angles, Snell refraction, tracing across the
//! triangulation, and the backward solve for a ray that meets an edge at a
//! prescribed angle.

mod spacing;
mod trace;

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::geometry::{Point2, Vec2};
use crate::subdivision::{EdgeId, FaceId, PlanarSubdivision};

pub use spacing::{angular_spacing, Spacing, SpacingClamp, TinyReal};
pub use trace::{
    face_exit, find_hit_at_angle, trace_ray, walk_sequence, Crossing, Exit, HitAtAngle, HitQuery,
    TerminalCause, TraceError, TraceRecord, Walk, WalkError,
};

/// Tolerance used when classifying an incidence against the critical angle.
pub const ANGLE_TOL: f64 = 1e-12;

/// Angle in radians measured from the edge normal, in `[0, π/2]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    /// Clamps small excursions outside `[0, π/2]` caused by rounding.
    pub fn new(radians: f64) -> Self {
        debug_assert!(
            radians > -1e-9 && radians < FRAC_PI_2 + 1e-9,
            "angle {radians}"
        );
        Self(radians.clamp(0.0, FRAC_PI_2))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(deg: f64) -> Self {
        Self::new(deg.to_radians())
    }
}

/// What happens to a ray crossing from a face of weight `alpha_in` into one
/// of weight `alpha_out`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "angle", rename_all = "snake_case")]
pub enum RefractionOutcome {
    /// Ordinary refraction with the exit angle.
    Refracted(Angle),
    /// Incidence equals the critical angle within [`ANGLE_TOL`].
    AtCritical(Angle),
    /// Incidence exceeds the critical angle; the ray does not pass.
    BeyondCritical(Angle),
    /// The far side is heavier, so no incidence is critical.
    NoCritical(Angle),
}

impl RefractionOutcome {
    /// Exit angle when the ray passes.
    pub fn exit(self) -> Option<Angle> {
        match self {
            Self::Refracted(a) | Self::NoCritical(a) => Some(a),
            Self::AtCritical(_) | Self::BeyondCritical(_) => None,
        }
    }
}

/// `arcsin(alpha_out / alpha_in)` when the far side is lighter.
pub fn critical_angle(alpha_in: u32, alpha_out: u32) -> Option<Angle> {
    (alpha_out < alpha_in).then(|| Angle::new((alpha_out as f64 / alpha_in as f64).asin()))
}

/// Snell's law `alpha_in·sin θ_in = alpha_out·sin θ_out`.
pub fn refract(theta_in: Angle, alpha_in: u32, alpha_out: u32) -> RefractionOutcome {
    if alpha_in == alpha_out {
        return RefractionOutcome::Refracted(theta_in);
    }
    let arg = alpha_in as f64 * theta_in.radians().sin() / alpha_out as f64;
    if alpha_out > alpha_in {
        return RefractionOutcome::NoCritical(Angle::new(arg.asin()));
    }
    let crit = critical_angle(alpha_in, alpha_out).expect("lighter far side");
    if arg < 1.0 - ANGLE_TOL {
        RefractionOutcome::Refracted(Angle::new(arg.asin()))
    } else if arg <= 1.0 + ANGLE_TOL {
        RefractionOutcome::AtCritical(crit)
    } else {
        RefractionOutcome::BeyondCritical(crit)
    }
}

/// Orthonormal frame of an edge as seen from one of its faces.
#[derive(Clone, Copy, Debug)]
pub struct EdgeFrame {
    pub a: Point2,
    pub b: Point2,
    /// Unit vector from `a` to `b` (the edge's first to second endpoint).
    pub tangent: Vec2,
    /// Unit normal pointing out of the face the frame was built from.
    pub normal: Vec2,
}

impl EdgeFrame {
    pub fn new(sub: &PlanarSubdivision, e: EdgeId, from: FaceId) -> Self {
        let (a, b) = sub.edge_points(e);
        let tangent = (b - a).normalized();
        let apex = sub.point(sub.apex(e, from));
        let mut normal = tangent.perp();
        if normal.dot(apex - a) > 0.0 {
            normal = -normal;
        }
        Self {
            a,
            b,
            tangent,
            normal,
        }
    }

    /// Unsigned incidence angle of direction `d`.
    pub fn incidence(&self, d: Vec2) -> Angle {
        Angle::new(d.dot(self.tangent).abs().atan2(d.dot(self.normal).abs()))
    }

    /// Edge parameter of a point on the edge line.
    pub fn param(&self, p: Point2) -> f64 {
        (p - self.a).dot(self.b - self.a) / (self.b - self.a).norm_sq()
    }
}

/// Refracts direction `d` through an edge described by `frame` (normal
/// pointing in the direction of travel). `None` at or beyond the critical
/// angle. Equal weights return `d` unchanged.
pub fn refract_direction(
    frame: &EdgeFrame,
    d: Vec2,
    alpha_in: u32,
    alpha_out: u32,
) -> Option<Vec2> {
    if alpha_in == alpha_out {
        return Some(d);
    }
    let t = d.dot(frame.tangent) * alpha_in as f64 / alpha_out as f64;
    if t.abs() >= 1.0 - ANGLE_TOL {
        return None;
    }
    let nrm = (1.0 - t * t).sqrt() * d.dot(frame.normal).signum();
    Some(frame.tangent * t + frame.normal * nrm)
}

/// `alpha_in·sin θ_in − alpha_out·sin θ_out` using signed tangential
/// components, the quantity Snell's law sets to zero.
pub fn snell_residual(
    tangent: Vec2,
    d_in: Vec2,
    d_out: Vec2,
    alpha_in: f64,
    alpha_out: f64,
) -> f64 {
    alpha_in * d_in.dot(tangent) - alpha_out * d_out.dot(tangent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn critical_angles() {
        assert!((critical_angle(2, 1).unwrap().radians() - PI / 6.0).abs() < 1e-15);
        assert_eq!(critical_angle(1, 1), None);
        assert_eq!(critical_angle(1, 4), None);
    }

    #[test]
    fn identity_medium() {
        let t = Angle::new(0.7);
        assert_eq!(refract(t, 3, 3), RefractionOutcome::Refracted(t));
    }

    #[test]
    fn exactly_critical() {
        assert!(matches!(
            refract(Angle::new(PI / 6.0), 2, 1),
            RefractionOutcome::AtCritical(_)
        ));
        assert!(matches!(
            refract(Angle::new(0.6), 2, 1),
            RefractionOutcome::BeyondCritical(_)
        ));
        assert!(matches!(
            refract(Angle::new(1.2), 1, 2),
            RefractionOutcome::NoCritical(_)
        ));
    }

    #[test]
    fn direction_refraction_matches_angle_form() {
        let frame = EdgeFrame {
            a: Point2::new(0.0, 0.0),
            b: Point2::new(1.0, 0.0),
            tangent: Point2::new(1.0, 0.0),
            normal: Point2::new(0.0, -1.0),
        };
        let d = Point2::from_angle(-1.2);
        let out = refract_direction(&frame, d, 3, 2).unwrap();
        let expect = refract(frame.incidence(d), 3, 2).exit().unwrap();
        assert!((frame.incidence(out).radians() - expect.radians()).abs() < 1e-14);
        assert!(snell_residual(frame.tangent, d, out, 3.0, 2.0).abs() < 1e-15);
        assert!(out.y < 0.0);
    }
}
