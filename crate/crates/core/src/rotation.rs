//! Rotation representations and the angular metric on SO(3).
//!
//! Two representations are supported: validated 3×3 rotation matrices and
//! multiplied axis-angle vectors `r = α·a` living in the closed ball of
//! radius π. [`exp_map`] and [`log_map`] convert between them, and
//! [`angular_distance`] is the bi-invariant geodesic metric
//! `d(A, B) = angle(B⁻¹·A)`.
//!
//! Composition follows the convention `compose(a, b) = b·a`, i.e. `a` is
//! applied first.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Neg;

use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};
use rand::Rng;

use crate::error::{Error, Result};

/// Maximum entry of `|MᵀM - I|` accepted by [`RotationMatrix::new`].
pub const ORTHONORMAL_TOL: f64 = 1e-9;
/// Maximum `|det M - 1|` accepted by [`RotationMatrix::new`].
pub const DETERMINANT_TOL: f64 = 1e-9;
/// Slack on the ball radius accepted by [`AxisAngle::new`].
pub const BALL_TOL: f64 = 1e-12;
/// Maximum `|‖v‖ - 1|` accepted for unit axes.
pub const UNIT_TOL: f64 = 1e-9;

/// Components smaller than this are treated as zero when picking the
/// canonical axis sign of a half-turn.
const AXIS_SIGN_EPS: f64 = 1e-12;

/// An element of SO(3), validated on construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    pub fn identity() -> Self {
        RotationMatrix(Matrix3::identity())
    }

    /// Validates `m` with the default tolerances.
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        Self::with_tolerance(m, ORTHONORMAL_TOL, DETERMINANT_TOL)
    }

    pub fn with_tolerance(
        m: Matrix3<f64>,
        orthonormal_tol: f64,
        determinant_tol: f64,
    ) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let deviation = orthonormality_deviation(&m);
        if deviation > orthonormal_tol {
            return Err(Error::NotOrthonormal { deviation });
        }
        let det = m.determinant();
        if (det - 1.0).abs() > determinant_tol {
            return Err(Error::BadDeterminant { det });
        }
        Ok(RotationMatrix(m))
    }

    /// Builds a matrix from rows in reading order.
    pub fn from_rows(rows: [[f64; 3]; 3]) -> Result<Self> {
        Self::new(Matrix3::from_fn(|i, j| rows[i][j]))
    }

    /// Projects a noisy, nearly orthonormal matrix onto SO(3).
    ///
    /// Runs the polar-decomposition iteration `X ← (X + X⁻ᵀ)/2`, which
    /// converges to the orthogonal polar factor. Matrices with a
    /// non-positive determinant have no rotation factor and are rejected.
    pub fn reorthonormalize(m: Matrix3<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let det = m.determinant();
        if det <= 0.0 {
            return Err(Error::BadDeterminant { det });
        }
        let mut x = m;
        for _ in 0..100 {
            let inv_t = match x.try_inverse() {
                Some(inv) => inv.transpose(),
                None => {
                    return Err(Error::BadDeterminant {
                        det: x.determinant(),
                    })
                }
            };
            let next = (x + inv_t) * 0.5;
            let step = (next - x).amax();
            x = next;
            if step <= 1e-15 {
                break;
            }
        }
        Self::new(x)
    }

    pub(crate) fn new_unchecked(m: Matrix3<f64>) -> Self {
        RotationMatrix(m)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn to_rows(&self) -> [[f64; 3]; 3] {
        let m = &self.0;
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }
}

fn orthonormality_deviation(m: &Matrix3<f64>) -> f64 {
    (m.transpose() * m - Matrix3::identity()).amax()
}

/// A rotation angle in `[0, π]` radians.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);
    pub const PI: Angle = Angle(PI);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=PI).contains(&value) {
            Ok(Angle(value))
        } else {
            Err(Error::AngleOutOfRange { value })
        }
    }

    /// Clamps `value` into `[0, π]`; for results that are in range up to rounding.
    pub(crate) fn saturating(value: f64) -> Self {
        Angle(value.clamp(0.0, PI))
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Multiplied axis-angle vector `r = α·a` with `‖r‖ ≤ π`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisAngle(Vector3<f64>);

impl AxisAngle {
    pub fn zero() -> Self {
        AxisAngle(Vector3::zeros())
    }

    pub fn new(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm > PI + BALL_TOL {
            return Err(Error::OutsideBall { norm });
        }
        Ok(AxisAngle(v))
    }

    pub fn from_components(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Vector3::new(x, y, z))
    }

    /// Rotation by `angle` about a unit `axis`.
    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Result<Self> {
        check_unit(axis)?;
        Angle::new(angle)?;
        Self::new(axis * angle)
    }

    /// Radially projects `v` onto the closed π-ball.
    pub fn project(v: &Vector3<f64>) -> Self {
        let norm = v.norm();
        if norm > PI {
            AxisAngle(v * (PI / norm))
        } else {
            AxisAngle(*v)
        }
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    /// The rotation angle `‖r‖`.
    pub fn angle(&self) -> f64 {
        self.0.norm()
    }

    /// The unit axis, or `None` for the identity.
    pub fn axis(&self) -> Option<Vector3<f64>> {
        let n = self.0.norm();
        (n > 0.0).then(|| self.0 / n)
    }
}

impl Neg for AxisAngle {
    type Output = AxisAngle;

    fn neg(self) -> AxisAngle {
        AxisAngle(-self.0)
    }
}

fn check_unit(v: &Vector3<f64>) -> Result<()> {
    let norm = v.norm();
    if (norm - 1.0).abs() > UNIT_TOL || !norm.is_finite() {
        return Err(Error::NotUnit { norm });
    }
    Ok(())
}

fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// `vee(M - Mᵀ) / 2`; equals `sin θ · axis` for a rotation matrix.
fn skew_part(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(
        m[(2, 1)] - m[(1, 2)],
        m[(0, 2)] - m[(2, 0)],
        m[(1, 0)] - m[(0, 1)],
    ) * 0.5
}

/// Rodrigues rotation formula for an arbitrary 3-vector.
///
/// Unlike [`exp_map`] the input is not restricted to the π-ball; the branch
/// and bound uses this for cube centres.
pub fn exp_vector(v: &Vector3<f64>) -> RotationMatrix {
    let theta = v.norm();
    if theta == 0.0 {
        return RotationMatrix::identity();
    }
    let k = skew(v);
    let half = 0.5 * theta;
    // sin θ / θ and (1 - cos θ) / θ², the latter written without cancellation
    let a = theta.sin() / theta;
    let s = half.sin() / half;
    let b = 0.5 * s * s;
    RotationMatrix::new_unchecked(Matrix3::identity() + k * a + k * k * b)
}

/// Rotation matrix of an axis-angle vector; `exp_map(0)` is exactly `I`.
pub fn exp_map(r: &AxisAngle) -> RotationMatrix {
    exp_vector(&r.0)
}

/// Rotation angle of `rot`, in `[0, π]`.
///
/// Computed as `atan2(‖vee(R - Rᵀ)‖/2, (tr R - 1)/2)`, which equals
/// `arccos((tr R - 1)/2)` on SO(3) but keeps full precision near 0 and π.
pub fn angle_of(rot: &RotationMatrix) -> Angle {
    let m = &rot.0;
    let sin = skew_part(m).norm();
    let cos = 0.5 * (m.trace() - 1.0);
    Angle::saturating(sin.atan2(cos))
}

/// Axis-angle vector of `rot`, with `‖log_map(R)‖ = angle_of(R)`.
///
/// Half-turns are ambiguous in sign; when the angle is exactly π the first
/// non-negligible axis component is made positive.
pub fn log_map(rot: &RotationMatrix) -> AxisAngle {
    let m = &rot.0;
    let theta = angle_of(rot).radians();
    if theta == 0.0 {
        return AxisAngle::zero();
    }
    let w = skew_part(m);
    let cos = 0.5 * (m.trace() - 1.0);
    if cos >= 0.0 {
        return AxisAngle(w * (theta / w.norm()));
    }

    // (R + Rᵀ)/2 - cos θ·I = (1 - cos θ)·aaᵀ; the column with the largest
    // diagonal entry is the best conditioned multiple of the axis.
    let sym = (m + m.transpose()) * 0.5 - Matrix3::identity() * cos;
    let k = (0..3)
        .max_by(|&i, &j| sym[(i, i)].total_cmp(&sym[(j, j)]))
        .unwrap_or(0);
    let mut axis: Vector3<f64> = sym.column(k).into_owned();
    axis /= axis.norm();

    let orientation = axis.dot(&w);
    if theta == PI || orientation == 0.0 {
        if let Some(first) = axis.iter().copied().find(|c| c.abs() > AXIS_SIGN_EPS) {
            if first < 0.0 {
                axis = -axis;
            }
        }
    } else if orientation < 0.0 {
        axis = -axis;
    }
    AxisAngle(axis * theta)
}

/// Returns `b·a`: apply `a`, then `b`.
pub fn compose(a: &RotationMatrix, b: &RotationMatrix) -> RotationMatrix {
    let product = b.0 * a.0;
    debug_assert!(orthonormality_deviation(&product) <= 1e-6);
    RotationMatrix::new_unchecked(product)
}

pub fn inverse(rot: &RotationMatrix) -> RotationMatrix {
    RotationMatrix::new_unchecked(rot.0.transpose())
}

/// `d(A, B) = angle(B⁻¹·A)`.
pub fn angular_distance(a: &RotationMatrix, b: &RotationMatrix) -> Angle {
    angle_of(&compose(a, &inverse(b)))
}

/// Angle between two unit vectors.
pub fn enclosed_angle(a: &Vector3<f64>, b: &Vector3<f64>) -> Result<Angle> {
    check_unit(a)?;
    check_unit(b)?;
    Ok(Angle::saturating(a.dot(b).clamp(-1.0, 1.0).acos()))
}

/// Uniformly distributed rotation (Haar measure).
///
/// Samples a unit quaternion with Shoemake's method and converts it.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> RotationMatrix {
    let u1: f64 = rng.gen();
    let u2: f64 = rng.gen();
    let u3: f64 = rng.gen();
    let s1 = (1.0 - u1).sqrt();
    let s2 = u1.sqrt();
    let t2 = 2.0 * PI * u2;
    let t3 = 2.0 * PI * u3;
    let q = Quaternion::new(s2 * t3.cos(), s1 * t2.sin(), s1 * t2.cos(), s2 * t3.sin());
    let unit = UnitQuaternion::from_quaternion(q);
    RotationMatrix::new_unchecked(unit.to_rotation_matrix().into_inner())
}

/// Uniformly distributed point on the unit sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let t: f64 = rng.gen_range(0.0..2.0 * PI);
    let rho = (1.0 - z * z).max(0.0).sqrt();
    Vector3::new(rho * t.cos(), rho * t.sin(), z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn aa(x: f64, y: f64, z: f64) -> AxisAngle {
        AxisAngle::from_components(x, y, z).unwrap()
    }

    #[test]
    fn exp_of_zero_is_exact_identity() {
        assert_eq!(exp_map(&AxisAngle::zero()), RotationMatrix::identity());
    }

    #[test]
    fn exp_half_turn_about_x() {
        let r = exp_map(&aa(PI, 0.0, 0.0));
        let expected = Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0));
        assert_abs_diff_eq!(*r.matrix(), expected, epsilon = 1e-15);
    }

    #[test]
    fn exp_quarter_turn_maps_y_to_z() {
        let r = exp_map(&aa(FRAC_PI_2, 0.0, 0.0));
        let image = r.apply(&Vector3::y());
        assert_abs_diff_eq!(image, Vector3::z(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.apply(&Vector3::x()), Vector3::x(), epsilon = 1e-15);
    }

    #[test]
    fn log_examples() {
        assert_eq!(log_map(&RotationMatrix::identity()), AxisAngle::zero());
        let half_turn =
            RotationMatrix::from_rows([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]])
                .unwrap();
        assert_eq!(*log_map(&half_turn).vector(), Vector3::new(PI, 0.0, 0.0));
    }

    #[test]
    fn half_turn_sign_is_canonical() {
        for v in [
            Vector3::new(-PI, 0.0, 0.0),
            Vector3::new(0.0, -PI, 0.0),
            Vector3::new(0.0, 0.0, -PI),
        ] {
            let r = log_map(&exp_vector(&v));
            assert_abs_diff_eq!(*r.vector(), -v, epsilon = 1e-12);
        }
        // an oblique half-turn whose first component is negative
        let axis = Vector3::new(-1.0, 2.0, 2.0) / 3.0;
        let m = Matrix3::identity() * -1.0 + axis * axis.transpose() * 2.0;
        let r = log_map(&RotationMatrix::new(m).unwrap());
        assert_abs_diff_eq!(*r.vector(), -axis * PI, epsilon = 1e-12);
    }

    #[test]
    fn angle_examples() {
        assert_eq!(angle_of(&RotationMatrix::identity()).radians(), 0.0);
        assert_abs_diff_eq!(
            angle_of(&exp_map(&aa(FRAC_PI_2, 0.0, 0.0))).radians(),
            FRAC_PI_2,
            epsilon = 1e-15
        );
        let half_turn =
            RotationMatrix::from_rows([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]])
                .unwrap();
        assert_eq!(angle_of(&half_turn).radians(), PI);
    }

    #[test]
    fn angle_is_accurate_near_identity() {
        let r = exp_map(&aa(1e-10, 0.0, 0.0));
        assert_abs_diff_eq!(angle_of(&r).radians(), 1e-10, epsilon = 1e-22);
    }

    #[test]
    fn compose_examples() {
        let rx = exp_map(&aa(FRAC_PI_2, 0.0, 0.0));
        assert_eq!(compose(&rx, &RotationMatrix::identity()), rx);
        let back = compose(&rx, &exp_map(&aa(-FRAC_PI_2, 0.0, 0.0)));
        assert_abs_diff_eq!(*back.matrix(), Matrix3::identity(), epsilon = 1e-15);

        // 90° about x then 90° about z: Rz·Rx = [[0,0,1],[1,0,0],[0,1,0]], trace 0
        let rz = exp_map(&aa(0.0, 0.0, FRAC_PI_2));
        let both = compose(&rx, &rz);
        let expected = Matrix3::new(0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        assert_abs_diff_eq!(*both.matrix(), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(angle_of(&both).radians(), 2.0 * PI / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(
            inverse(&RotationMatrix::identity()),
            RotationMatrix::identity()
        );
        let r = aa(0.3, -1.1, 0.7);
        assert_abs_diff_eq!(
            *inverse(&exp_map(&r)).matrix(),
            *exp_map(&-r).matrix(),
            epsilon = 1e-12
        );
        let m = exp_map(&r);
        assert_eq!(inverse(&inverse(&m)), m);
        assert_abs_diff_eq!(
            *compose(&inverse(&m), &m).matrix(),
            Matrix3::identity(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn distance_examples() {
        let r = exp_map(&aa(0.2, 0.4, -0.5));
        assert_eq!(angular_distance(&r, &r).radians(), 0.0);
        for (alpha, beta) in [(0.0, PI), (0.3, 2.9), (1.0, 1.0), (PI, 0.5)] {
            let d = angular_distance(
                &exp_map(&aa(alpha, 0.0, 0.0)),
                &exp_map(&aa(beta, 0.0, 0.0)),
            );
            assert_abs_diff_eq!(d.radians(), (alpha - beta).abs(), epsilon = 1e-14);
        }
        let d = angular_distance(
            &exp_map(&aa(FRAC_PI_2, 0.0, 0.0)),
            &exp_map(&aa(0.0, FRAC_PI_2, 0.0)),
        );
        assert_abs_diff_eq!(d.radians(), 2.0 * PI / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn enclosed_angle_examples() {
        let x = Vector3::x();
        assert_eq!(enclosed_angle(&x, &x).unwrap().radians(), 0.0);
        assert_eq!(enclosed_angle(&x, &-x).unwrap().radians(), PI);
        assert_abs_diff_eq!(
            enclosed_angle(&x, &Vector3::y()).unwrap().radians(),
            FRAC_PI_2
        );
        assert!(matches!(
            enclosed_angle(&(x * 2.0), &x),
            Err(Error::NotUnit { .. })
        ));
    }

    #[test]
    fn construction_rejects_invalid_matrices() {
        let scaled = Matrix3::identity() * 1.001;
        assert!(matches!(
            RotationMatrix::new(scaled),
            Err(Error::NotOrthonormal { .. })
        ));
        let reflection = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert!(matches!(
            RotationMatrix::new(reflection),
            Err(Error::BadDeterminant { .. })
        ));
        let mut nan = Matrix3::identity();
        nan[(0, 1)] = f64::NAN;
        assert_eq!(RotationMatrix::new(nan), Err(Error::NonFinite));
        assert!(AxisAngle::from_components(PI + 1e-6, 0.0, 0.0).is_err());
        assert!(AxisAngle::from_components(PI + 1e-13, 0.0, 0.0).is_ok());
    }

    #[test]
    fn reorthonormalize_repairs_noise() {
        let truth = exp_map(&aa(0.4, -0.9, 1.3));
        let mut noisy = *truth.matrix();
        noisy[(0, 0)] += 1e-4;
        noisy[(2, 1)] -= 2e-4;
        assert!(RotationMatrix::new(noisy).is_err());
        let fixed = RotationMatrix::reorthonormalize(noisy).unwrap();
        assert!(angular_distance(&fixed, &truth).radians() < 1e-3);
        let reflection = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert!(RotationMatrix::reorthonormalize(reflection).is_err());
    }

    #[test]
    fn random_rotation_is_deterministic_and_valid() {
        let a = random_rotation(&mut ChaCha8Rng::seed_from_u64(17));
        let b = random_rotation(&mut ChaCha8Rng::seed_from_u64(17));
        assert_eq!(a, b);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let r = random_rotation(&mut rng);
            assert!(RotationMatrix::new(*r.matrix()).is_ok());
        }
    }
}
