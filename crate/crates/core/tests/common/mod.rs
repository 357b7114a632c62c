//! Independent oracles for the integration tests.
//!
//! Rotations are handled as unit quaternions here, a route that shares no
//! code with the matrix-based library path.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::Rng;
use rotbound::bnb::{Aggregator, Cube, Problem, RotationAveraging};
use rotbound::certify::chunk_rng;
use rotbound::rotation::{
    compose, exp_map, random_rotation, random_unit_vector, AxisAngle, RotationMatrix,
};

pub type Quat = [f64; 4];

pub fn quat_from_vector(v: &Vector3<f64>) -> Quat {
    let theta = v.norm();
    if theta == 0.0 {
        return [1.0, 0.0, 0.0, 0.0];
    }
    let (s, c) = (0.5 * theta).sin_cos();
    let k = s / theta;
    [c, k * v.x, k * v.y, k * v.z]
}

/// Quaternion of a rotation matrix (Shepperd's method).
pub fn quat_from_matrix(r: &RotationMatrix) -> Quat {
    let m = r.to_rows();
    let tr = m[0][0] + m[1][1] + m[2][2];
    let q = if tr > 0.0 {
        let s = (tr + 1.0).sqrt() * 2.0;
        [
            0.25 * s,
            (m[2][1] - m[1][2]) / s,
            (m[0][2] - m[2][0]) / s,
            (m[1][0] - m[0][1]) / s,
        ]
    } else if m[0][0] > m[1][1] && m[0][0] > m[2][2] {
        let s = (1.0 + m[0][0] - m[1][1] - m[2][2]).sqrt() * 2.0;
        [
            (m[2][1] - m[1][2]) / s,
            0.25 * s,
            (m[0][1] + m[1][0]) / s,
            (m[0][2] + m[2][0]) / s,
        ]
    } else if m[1][1] > m[2][2] {
        let s = (1.0 + m[1][1] - m[0][0] - m[2][2]).sqrt() * 2.0;
        [
            (m[0][2] - m[2][0]) / s,
            (m[0][1] + m[1][0]) / s,
            0.25 * s,
            (m[1][2] + m[2][1]) / s,
        ]
    } else {
        let s = (1.0 + m[2][2] - m[0][0] - m[1][1]).sqrt() * 2.0;
        [
            (m[1][0] - m[0][1]) / s,
            (m[0][2] + m[2][0]) / s,
            (m[1][2] + m[2][1]) / s,
            0.25 * s,
        ]
    };
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    [q[0] / n, q[1] / n, q[2] / n, q[3] / n]
}

fn dot(a: &Quat, b: &Quat) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Rotation angle between two unit quaternions, accurate at 0 and π.
pub fn quat_distance(a: &Quat, b: &Quat) -> f64 {
    let s = if dot(a, b) < 0.0 { -1.0 } else { 1.0 };
    let mut diff = 0.0;
    let mut sum = 0.0;
    for i in 0..4 {
        diff += (a[i] - s * b[i]).powi(2);
        sum += (a[i] + s * b[i]).powi(2);
    }
    4.0 * diff.sqrt().atan2(sum.sqrt())
}

/// Cheaper `2 acos |a·b|`, precise to about 1e-8; used for dense grids.
pub fn quat_distance_fast(a: &Quat, b: &Quat) -> f64 {
    2.0 * dot(a, b).abs().min(1.0).acos()
}

pub fn objective(targets: &[Quat], point: &Vector3<f64>, agg: Aggregator) -> f64 {
    let q = quat_from_vector(point);
    agg.aggregate(targets.iter().map(|t| quat_distance(&q, t)))
}

/// Minimum of each aggregator over the grid `step·ℤ³` restricted to
/// `‖r‖ ≤ π + step`, indexed like [`Aggregator::ALL`].
pub fn grid_minimum(targets: &[Quat], step: f64) -> [f64; 3] {
    let k = (PI / step).floor() as i64 + 1;
    let limit = PI + step;
    let mut best = [f64::INFINITY; 3];
    let mut residuals = vec![0.0; targets.len()];
    for i in -k..=k {
        for j in -k..=k {
            for l in -k..=k {
                let v = Vector3::new(i as f64, j as f64, l as f64) * step;
                if v.norm() > limit {
                    continue;
                }
                let q = quat_from_vector(&v);
                for (r, t) in residuals.iter_mut().zip(targets) {
                    *r = quat_distance_fast(&q, t);
                }
                let linf = residuals.iter().copied().fold(0.0, f64::max);
                let l1: f64 = residuals.iter().sum();
                let l2: f64 = residuals.iter().map(|r| r * r).sum();
                best[0] = best[0].min(linf);
                best[1] = best[1].min(l1);
                best[2] = best[2].min(l2);
            }
        }
    }
    best
}

/// How far the grid minimum may sit above the true minimum `f*`, given an
/// upper estimate of `f*`. Every rotation is within `step·√3/2` of a grid
/// point, and each residual is 1-Lipschitz.
pub fn grid_slack(agg: Aggregator, n: usize, step: f64, optimum_upper: f64) -> f64 {
    let h = step * 3f64.sqrt() / 2.0;
    let n = n as f64;
    match agg {
        Aggregator::Linf => h,
        Aggregator::L1 => n * h,
        // Σ(θᵢ + h)² − Σθᵢ² ≤ 2h·√(n f*) + n h²
        Aggregator::L2Sq => 2.0 * h * (n * optimum_upper).sqrt() + n * h * h,
    }
}

/// Rotation-averaging instance: `n` rotations perturbed from a random ground
/// truth by rotations of angle at most `noise`.
pub fn averaging_instance(
    seed: u64,
    n: usize,
    noise: f64,
) -> (RotationMatrix, Vec<RotationMatrix>) {
    let mut rng = chunk_rng(seed, 0);
    let truth = random_rotation(&mut rng);
    let rotations = (0..n)
        .map(|_| {
            let axis = random_unit_vector(&mut rng);
            let angle: f64 = rng.gen_range(0.0..=noise);
            compose(&truth, &exp_map(&AxisAngle::project(&(axis * angle))))
        })
        .collect();
    (truth, rotations)
}

/// `count` uniform points of `cube ∩ {‖r‖ ≤ π}` by rejection.
pub fn interior_points(cube: &Cube, rng: &mut impl Rng, count: usize) -> Vec<Vector3<f64>> {
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let p = cube.center
            + Vector3::from_fn(|_, _| rng.gen_range(-cube.half_width..=cube.half_width));
        if p.norm() <= PI {
            points.push(p);
        }
    }
    points
}

/// A random cube at depth 0..=8 of the octree that meets the ball.
pub fn random_cube(rng: &mut impl Rng) -> Cube {
    loop {
        let depth = rng.gen_range(0..=8u32);
        let cells = 1i64 << depth;
        let half_width = PI / cells as f64;
        let center = Vector3::from_fn(|_, _| {
            let k = rng.gen_range(0..cells);
            -PI + (2 * k + 1) as f64 * half_width
        });
        let cube = Cube {
            center,
            half_width,
            depth,
            lower_bound: 0.0,
        };
        if cube.intersects_ball() {
            return cube;
        }
    }
}

/// `n` uniform rotations with a random cost.
pub fn random_problem(rng: &mut impl Rng) -> Problem<RotationAveraging> {
    let n = rng.gen_range(1..=10);
    let rotations = (0..n).map(|_| random_rotation(rng)).collect();
    let agg = Aggregator::ALL[rng.gen_range(0..3)];
    Problem::new(RotationAveraging::new(rotations).unwrap(), agg)
}
