//! The angular-distance bound `d(R_A, R_B) ≤ ‖r_A − r_B‖` and every
//! intermediate form of its proof, as plain functions.
//!
//! The bound is rewritten as an upper bound on the angle of the composition
//! `R_B·R_A` (after inverting `B`). Both sides are then expressed in the
//! half angles `â = α/2`, `b̂ = β/2` and `d = (1 − cos φ)/2`, where `φ` is the
//! angle between the two axes:
//!
//! ```text
//! angle(R_B R_A) = 2 acos(d cos(â − b̂) + (1 − d) cos(â + b̂))
//! ‖r_A + r_B‖    = 2 sqrt(d (â − b̂)² + (1 − d)(â + b̂)²)
//! ```
//!
//! and the inequality between them reduces to convexity of `acos²` on
//! `[0, 1]`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::rotation::{angular_distance, exp_map, Angle, AxisAngle};

/// Half angles and axis separation of a pair of rotations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfAngleParams {
    a_hat: f64,
    b_hat: f64,
    d: f64,
}

impl HalfAngleParams {
    /// `a_hat`, `b_hat` must lie in `[0, π/2]` and `d` in `[0, 1]`.
    pub fn new(a_hat: f64, b_hat: f64, d: f64) -> Result<Self> {
        check_range("a_hat", a_hat, 0.0, FRAC_PI_2, "[0, pi/2]")?;
        check_range("b_hat", b_hat, 0.0, FRAC_PI_2, "[0, pi/2]")?;
        check_range("d", d, 0.0, 1.0, "[0, 1]")?;
        Ok(HalfAngleParams { a_hat, b_hat, d })
    }

    /// Parameters of rotations by `alpha` and `beta` whose axes enclose `phi`.
    pub fn from_angles(alpha: Angle, beta: Angle, phi: Angle) -> Self {
        HalfAngleParams {
            a_hat: 0.5 * alpha.radians(),
            b_hat: 0.5 * beta.radians(),
            d: 0.5 * (1.0 - phi.radians().cos()),
        }
    }

    pub fn a_hat(&self) -> f64 {
        self.a_hat
    }

    pub fn b_hat(&self) -> f64 {
        self.b_hat
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// `â − b̂`, in `[−π/2, π/2]`.
    pub fn difference(&self) -> f64 {
        self.a_hat - self.b_hat
    }

    /// `â + b̂`, in `[0, π]`.
    pub fn sum(&self) -> f64 {
        self.a_hat + self.b_hat
    }

    /// The axis separation `φ = acos(1 − 2d)`.
    pub fn phi(&self) -> Angle {
        Angle::saturating((1.0 - 2.0 * self.d).clamp(-1.0, 1.0).acos())
    }
}

fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    domain: &'static str,
) -> Result<()> {
    if (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            name,
            value,
            domain,
        })
    }
}

/// Both sides of the bound and their difference `rhs − lhs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlackReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl SlackReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        SlackReport {
            lhs,
            rhs,
            slack: rhs - lhs,
        }
    }
}

/// Maps `2·acos(x)` from `[0, 2π]` onto the rotation-angle range `[0, π]`.
fn folded_double_acos(x: f64) -> Angle {
    let v = 2.0 * x.clamp(-1.0, 1.0).acos();
    Angle::saturating(v.min(2.0 * PI - v))
}

/// Angle of `R_B·R_A` from Rodrigues' composition theorem:
/// `2 acos(cos(α/2) cos(β/2) − sin(α/2) sin(β/2) cos φ)`, folded into `[0, π]`.
pub fn composed_angle_closed_form(alpha: Angle, beta: Angle, phi: Angle) -> Angle {
    let (sa, ca) = (0.5 * alpha.radians()).sin_cos();
    let (sb, cb) = (0.5 * beta.radians()).sin_cos();
    folded_double_acos(ca * cb - sa * sb * phi.radians().cos())
}

/// Left hand side in half-angle form: `2 acos(d cos(â − b̂) + (1 − d) cos(â + b̂))`.
pub fn reparam_lhs(p: &HalfAngleParams) -> Angle {
    folded_double_acos(p.d * p.difference().cos() + (1.0 - p.d) * p.sum().cos())
}

/// Right hand side in half-angle form: `2 sqrt(d (â − b̂)² + (1 − d)(â + b̂)²)`.
pub fn reparam_rhs(p: &HalfAngleParams) -> f64 {
    let a = p.difference();
    let b = p.sum();
    2.0 * (p.d * a * a + (1.0 - p.d) * b * b).max(0.0).sqrt()
}

/// `‖r_A − (−r_B)‖` by the law of cosines on the triangle `0, r_A, −r_B`,
/// whose angle at the origin is `π − φ`.
pub fn law_of_cosines_rhs(alpha: Angle, beta: Angle, phi: Angle) -> f64 {
    let (a, b) = (alpha.radians(), beta.radians());
    (a * a - 2.0 * a * b * (PI - phi.radians()).cos() + b * b)
        .max(0.0)
        .sqrt()
}

/// `d(exp r_A, exp r_B)`.
pub fn lemma2_lhs(r_a: &AxisAngle, r_b: &AxisAngle) -> Angle {
    angular_distance(&exp_map(r_a), &exp_map(r_b))
}

/// `‖r_A − r_B‖`.
pub fn lemma2_rhs(r_a: &AxisAngle, r_b: &AxisAngle) -> f64 {
    (r_a.vector() - r_b.vector()).norm()
}

/// Evaluates both sides of `d(R_A, R_B) ≤ ‖r_A − r_B‖`.
pub fn inequality_slack(r_a: &AxisAngle, r_b: &AxisAngle) -> SlackReport {
    SlackReport::new(lemma2_lhs(r_a, r_b).radians(), lemma2_rhs(r_a, r_b))
}

/// The bound with `B` inverted: `d(R_A, R_B⁻¹) ≤ ‖r_A − (−r_B)‖`.
///
/// The left side is the angle of the composition `R_B·R_A`.
pub fn composed_form_slack(r_a: &AxisAngle, r_b: &AxisAngle) -> SlackReport {
    inequality_slack(r_a, &-*r_b)
}

/// `acos(x)²`, with `x` clamped to `[−1, 1]`.
pub fn arccos_sq(x: f64) -> f64 {
    let t = x.clamp(-1.0, 1.0).acos();
    t * t
}

/// `f''(x) = (2 sqrt(1 − x²) − 2x acos x) / (1 − x²)^{3/2}` for `f = acos²`.
///
/// Defined for `x` in `[0, 1)`; at `x = 1` the expression is `0/0` and is
/// not evaluated.
pub fn arccos_sq_second_derivative(x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::OutOfDomain {
            name: "x",
            value: x,
            domain: "[0, 1)",
        });
    }
    let one_minus_sq = (1.0 - x) * (1.0 + x);
    let root = one_minus_sq.sqrt();
    Ok((2.0 * root - 2.0 * x * x.acos()) / (one_minus_sq * root))
}
