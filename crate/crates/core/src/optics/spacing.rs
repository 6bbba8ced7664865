use std::f64::consts::{LN_2, LOG10_2, TAU};
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::subdivision::MeshStats;

/// A positive real `mantissa · 2^exp2` with `mantissa ∈ [1, 2)`, for values
/// far below the smallest positive `f64`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TinyReal {
    pub mantissa: f64,
    pub exp2: i64,
}

impl TinyReal {
    pub fn from_f64(x: f64) -> Self {
        assert!(
            x > 0.0 && x.is_finite(),
            "TinyReal needs a positive finite value"
        );
        Self::normalized(x, 0)
    }

    fn normalized(mut m: f64, mut e: i64) -> Self {
        while m >= 2.0 {
            m *= 0.5;
            e += 1;
        }
        while m < 1.0 {
            m *= 2.0;
            e -= 1;
        }
        Self {
            mantissa: m,
            exp2: e,
        }
    }

    pub fn powi(self, mut n: u64) -> Self {
        let mut acc = Self {
            mantissa: 1.0,
            exp2: 0,
        };
        let mut base = self;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    /// Nearest `f64`; 0 on underflow.
    pub fn to_f64(self) -> f64 {
        if self.exp2 < -1100 {
            return 0.0;
        }
        if self.exp2 > 1100 {
            return f64::INFINITY;
        }
        let half = (self.exp2 / 2) as i32;
        let rest = self.exp2 as i32 - half;
        self.mantissa * 2f64.powi(half) * 2f64.powi(rest)
    }

    pub fn ln(self) -> f64 {
        self.mantissa.ln() + self.exp2 as f64 * LN_2
    }

    pub fn log10(self) -> f64 {
        self.mantissa.log10() + self.exp2 as f64 * LOG10_2
    }

    pub fn lt_f64(self, x: f64) -> bool {
        if self.exp2 > -1000 {
            self.to_f64() < x
        } else {
            x > 0.0 && self.ln() < x.ln()
        }
    }
}

impl Mul for TinyReal {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        Self::normalized(self.mantissa * o.mantissa, self.exp2 + o.exp2)
    }
}

/// Budget applied to the theoretical angular spacing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacingClamp {
    pub min_angle: f64,
    pub max_rays: u64,
}

impl Default for SpacingClamp {
    fn default() -> Self {
        Self {
            min_angle: TAU / (1u64 << 20) as f64,
            max_rays: 1 << 20,
        }
    }
}

/// Ray-fan density derived from the error budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spacing {
    /// `ε / (n (n² + L W))`.
    pub epsilon_prime: f64,
    /// `(w ε′ / 2W) (ε′/K)^(n²)` before clamping.
    pub gamma_theory: TinyReal,
    pub gamma_theory_log10: f64,
    /// `max(gamma_theory, min_angle)`.
    pub gamma: f64,
    /// `ceil(2π / gamma)`, capped at `max_rays`.
    pub ray_count: u64,
    /// Angular step actually used by a full fan, `2π / ray_count`.
    pub step: f64,
    pub clamped: bool,
}

pub fn angular_spacing(stats: &MeshStats, epsilon: f64, k: f64, clamp: SpacingClamp) -> Spacing {
    let n = stats.n as f64;
    let l = stats.max_edge_length;
    let w = stats.min_weight as f64;
    let big_w = stats.max_weight as f64;
    let epsilon_prime = epsilon / (n * (n * n + l * big_w));
    let lead = TinyReal::from_f64(w * epsilon_prime / (2.0 * big_w));
    let n2 = (stats.n as u64) * (stats.n as u64);
    let gamma_theory = lead * TinyReal::from_f64(epsilon_prime / k).powi(n2);
    let angle_clamped = gamma_theory.lt_f64(clamp.min_angle);
    let gamma = if angle_clamped {
        clamp.min_angle
    } else {
        gamma_theory.to_f64()
    };
    let wanted = (TAU / gamma).ceil();
    let count_clamped = wanted > clamp.max_rays as f64;
    let ray_count = if count_clamped {
        clamp.max_rays
    } else {
        wanted as u64
    }
    .max(1);
    Spacing {
        epsilon_prime,
        gamma_theory,
        gamma_theory_log10: gamma_theory.log10(),
        gamma,
        ray_count,
        step: TAU / ray_count as f64,
        clamped: angle_clamped || count_clamped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(n: usize, l: f64, w: u32, big_w: u32) -> MeshStats {
        MeshStats {
            n,
            faces: 1,
            edges: 3,
            max_edge_length: l,
            min_weight: w,
            max_weight: big_w,
        }
    }

    #[test]
    fn tiny_real_arithmetic() {
        let a = TinyReal::from_f64(3.0);
        assert_eq!(
            a,
            TinyReal {
                mantissa: 1.5,
                exp2: 1
            }
        );
        assert_eq!(a.powi(4).to_f64(), 81.0);
        let t = TinyReal::from_f64(1e-200).powi(3);
        assert_eq!(t.to_f64(), 0.0);
        assert!((t.log10() + 600.0).abs() < 1e-9);
    }

    #[test]
    fn small_substitution() {
        let s = angular_spacing(&stats(3, 1.0, 1, 1), 0.1, 1.0, SpacingClamp::default());
        assert!((s.epsilon_prime - 1.0 / 300.0).abs() < 1e-18);
        let expect = (1.0 / 600.0f64).ln() + 9.0 * (1.0 / 300.0f64).ln();
        assert!((s.gamma_theory.ln() - expect).abs() < 1e-12 * expect.abs());
        assert!(s.clamped);
        assert_eq!(s.gamma, SpacingClamp::default().min_angle);
        assert_eq!(s.ray_count, 1 << 20);
    }

    #[test]
    fn unclamped_when_budget_allows() {
        let clamp = SpacingClamp {
            min_angle: 1e-300,
            max_rays: u64::MAX,
        };
        let s = angular_spacing(&stats(1, 1.0, 1, 1), 0.5, 1.0, clamp);
        // n = 1: ε′ = 0.25, γ = (0.125)(0.25) = 1/32.
        assert!((s.gamma - 1.0 / 32.0).abs() < 1e-17);
        assert!(!s.clamped);
        assert_eq!(s.ray_count, (TAU * 32.0).ceil() as u64);
    }
}
