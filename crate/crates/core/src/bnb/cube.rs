use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::Result;
use crate::rotation::{exp_map, AxisAngle};

use super::problem::{Problem, Residuals};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Axis-aligned cube of axis-angle space, `center ± half_width` per axis.
///
/// The search starts from `[−π, π]³`; a cube at `depth` has half width
/// `π / 2^depth`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cube {
    pub center: Vector3<f64>,
    pub half_width: f64,
    pub depth: u32,
    /// Lower bound on the objective over the cube ∩ ball; `0` until evaluated.
    pub lower_bound: f64,
}

impl Cube {
    pub fn root() -> Self {
        Cube {
            center: Vector3::zeros(),
            half_width: PI,
            depth: 0,
            lower_bound: 0.0,
        }
    }

    /// Half diagonal `√3·half_width`: no rotation of the cube is farther
    /// than this from the centre rotation in the angular metric.
    pub fn uncertainty(&self) -> f64 {
        SQRT_3 * self.half_width
    }

    /// Whether the cube meets the closed ball `‖r‖ ≤ π`.
    pub fn intersects_ball(&self) -> bool {
        let nearest = self.center.map(|c| (c.abs() - self.half_width).max(0.0));
        nearest.norm() <= PI
    }

    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        (p - self.center).amax() <= self.half_width
    }

    /// The centre, radially projected into the ball when it lies outside.
    pub fn evaluation_point(&self) -> AxisAngle {
        AxisAngle::project(&self.center)
    }

    /// The eight octants that still meet the ball; empty if `self` does not.
    pub fn subdivide(&self) -> Vec<Cube> {
        if !self.intersects_ball() {
            return Vec::new();
        }
        let h = 0.5 * self.half_width;
        let mut children = Vec::with_capacity(8);
        for octant in 0..8u8 {
            let offset = Vector3::new(
                if octant & 1 == 0 { -h } else { h },
                if octant & 2 == 0 { -h } else { h },
                if octant & 4 == 0 { -h } else { h },
            );
            let child = Cube {
                center: self.center + offset,
                half_width: h,
                depth: self.depth + 1,
                lower_bound: self.lower_bound,
            };
            if child.intersects_ball() {
                children.push(child);
            }
        }
        children
    }
}

/// Lower and upper bound of the objective on a cube from a single residual
/// evaluation at [`Cube::evaluation_point`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubeBounds {
    pub lower: f64,
    pub upper: f64,
    pub point: AxisAngle,
}

/// Bounds the objective over `cube ∩ ball`.
///
/// For `r` in the cube and `p` the projected centre, `‖r − p‖ ≤ √3σ` (the
/// projection onto the ball is non-expansive), so `d(exp r, exp p) ≤ √3σ`
/// and each 1-Lipschitz residual satisfies `θᵢ(r) ≥ θᵢ(p) − √3σ`.
pub fn evaluate_cube<R: Residuals>(problem: &Problem<R>, cube: &Cube) -> Result<CubeBounds> {
    let point = cube.evaluation_point();
    let terms = problem.residuals.residuals(&exp_map(&point))?;
    let u = cube.uncertainty();
    let upper = problem.aggregator.aggregate(terms.iter().copied());
    let lower = problem
        .aggregator
        .aggregate(terms.iter().map(|t| (t - u).max(0.0)));
    Ok(CubeBounds {
        lower,
        upper,
        point,
    })
}

pub fn lower_bound<R: Residuals>(problem: &Problem<R>, cube: &Cube) -> Result<f64> {
    evaluate_cube(problem, cube).map(|b| b.lower)
}

/// Objective at the projected centre, and the point evaluated.
pub fn upper_bound<R: Residuals>(problem: &Problem<R>, cube: &Cube) -> Result<(f64, AxisAngle)> {
    evaluate_cube(problem, cube).map(|b| (b.upper, b.point))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnb::problem::{Aggregator, RotationAveraging};
    use crate::rotation::{angular_distance, exp_vector, random_rotation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cube_at(center: Vector3<f64>, depth: u32) -> Cube {
        Cube {
            center,
            half_width: PI / 2f64.powi(depth as i32),
            depth,
            lower_bound: 0.0,
        }
    }

    #[test]
    fn uncertainty_examples() {
        assert_eq!(Cube::root().uncertainty(), 3f64.sqrt() * PI);
        assert_eq!(
            cube_at(Vector3::zeros(), 1).uncertainty(),
            3f64.sqrt() * PI / 2.0
        );
    }

    #[test]
    fn root_splits_into_eight_retained_children() {
        let children = Cube::root().subdivide();
        assert_eq!(children.len(), 8);
        for c in &children {
            assert_eq!(c.half_width, PI / 2.0);
            assert_eq!(c.depth, 1);
            assert_eq!(c.center.abs(), Vector3::repeat(PI / 2.0));
        }
    }

    #[test]
    fn outside_cubes_are_rejected() {
        let far = cube_at(Vector3::repeat(7.0 * PI / 8.0), 3);
        assert!(!far.intersects_ball());
        assert!(far.subdivide().is_empty());
        // the outer corner child of this cube leaves the ball
        let octant = cube_at(Vector3::repeat(3.0 * PI / 4.0), 2);
        let kept = octant.subdivide();
        assert!(kept.len() < 8 && !kept.is_empty());
    }

    #[test]
    fn children_cover_parent_within_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let parent = cube_at(Vector3::new(PI / 2.0, -PI / 2.0, PI / 2.0), 1);
        let children = parent.subdivide();
        let mut tested = 0;
        while tested < 10_000 {
            let p = parent.center
                + Vector3::from_fn(|_, _| rng.gen_range(-1.0..=1.0)) * parent.half_width;
            if p.norm() > PI {
                continue;
            }
            tested += 1;
            assert!(children.iter().any(|c| c.contains(&p)), "{p:?} uncovered");
        }
    }

    #[test]
    fn projected_evaluation_point() {
        let c = cube_at(Vector3::repeat(3.0 * PI / 4.0), 2);
        assert!(c.intersects_ball() && c.center.norm() > PI);
        let p = c.evaluation_point();
        assert!((p.angle() - PI).abs() < 1e-15);
        let dir = p.vector() / p.angle();
        assert!((dir - Vector3::repeat(1.0 / 3f64.sqrt())).amax() < 1e-15);
    }

    #[test]
    fn uncertainty_bounds_angular_spread() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10_000 {
            let depth = rng.gen_range(0..6);
            let h = PI / 2f64.powi(depth);
            let center = Vector3::from_fn(|_, _| rng.gen_range(-PI..PI));
            let c = cube_at(center, depth as u32);
            let r = center + Vector3::from_fn(|_, _| rng.gen_range(-1.0..=1.0)) * h;
            let d = angular_distance(&exp_vector(&r), &exp_vector(&center)).radians();
            assert!(d <= c.uncertainty() + 1e-9);
        }
    }

    #[test]
    fn bounds_on_a_centred_target() {
        let target = Vector3::new(0.3, -0.2, 0.5);
        let problem = Problem::new(
            RotationAveraging::new(vec![exp_vector(&target)]).unwrap(),
            Aggregator::Linf,
        );
        let c = cube_at(target, 3);
        let b = evaluate_cube(&problem, &c).unwrap();
        assert_eq!(b.lower, 0.0);
        assert!(b.upper < 1e-15);
        assert!(b.upper >= b.lower - 1e-12);
    }

    #[test]
    fn shrinking_cube_bound_approaches_center_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rotations = (0..5).map(|_| random_rotation(&mut rng)).collect();
        let problem = Problem::new(RotationAveraging::new(rotations).unwrap(), Aggregator::L2Sq);
        let center = Vector3::new(0.1, 0.2, -0.3);
        let at_center = problem.objective(&exp_vector(&center)).unwrap();
        let mut prev_gap = f64::INFINITY;
        for depth in [4, 10, 20, 40] {
            let b = evaluate_cube(&problem, &cube_at(center, depth)).unwrap();
            assert_eq!(b.upper, at_center);
            let gap = at_center - b.lower;
            assert!(gap <= prev_gap && gap >= 0.0);
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-9);
    }
}
