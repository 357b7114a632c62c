use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rotation::{exp_map, AxisAngle};

use super::cube::{evaluate_cube, Cube, CubeBounds};
use super::problem::{Problem, Residuals};

pub const DEFAULT_EPSILON: f64 = 1e-3;
pub const DEFAULT_MAX_CUBES: usize = 10_000_000;
pub const DEFAULT_BATCH_SIZE: usize = 64;

/// Solver settings.
///
/// Cubes are expanded in batches of `batch_size` best-first cubes whose
/// children are bounded concurrently; the batch size, not the thread count,
/// determines the search order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub max_cubes: usize,
    pub batch_size: usize,
    pub execution: Execution,
    /// Coordinate-descent refinement of the final incumbent.
    pub polish: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: DEFAULT_EPSILON,
            max_cubes: DEFAULT_MAX_CUBES,
            batch_size: DEFAULT_BATCH_SIZE,
            execution: Execution::Parallel,
            polish: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// `gap ≤ epsilon`.
    Converged,
    /// `max_cubes` reached first; the result is the partial one.
    BudgetExhausted,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverResult {
    pub best_rotation: AxisAngle,
    pub best_value: f64,
    /// No rotation has an objective below this value.
    pub certified_lower_bound: f64,
    pub gap: f64,
    /// Cubes whose bounds were evaluated.
    pub cubes_explored: usize,
    /// Cubes discarded because their lower bound came within `epsilon` of the incumbent.
    pub cubes_pruned: usize,
    pub status: Status,
}

impl SolverResult {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }
}

struct Open {
    lower: f64,
    seq: u64,
    cube: Cube,
}

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Open {}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Open {
    // BinaryHeap is a max-heap: smallest bound, then earliest insertion, pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .lower
            .total_cmp(&self.lower)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Best-first branch and bound with default settings and the given tolerance
/// and budget.
pub fn solve<R: Residuals>(
    problem: &Problem<R>,
    epsilon: f64,
    max_cubes: usize,
) -> Result<SolverResult> {
    solve_with(
        problem,
        &SolverConfig {
            epsilon,
            max_cubes,
            ..SolverConfig::default()
        },
    )
}

pub fn solve_with<R: Residuals>(
    problem: &Problem<R>,
    config: &SolverConfig,
) -> Result<SolverResult> {
    if !(config.epsilon > 0.0 && config.epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {}",
            config.epsilon
        )));
    }
    if config.max_cubes == 0 || config.batch_size == 0 {
        return Err(Error::InvalidArgument(
            "max_cubes and batch_size must be at least 1".into(),
        ));
    }
    let eps = config.epsilon;

    let root = Cube::root();
    let bounds = evaluate_cube(problem, &root)?;
    let mut best_value = bounds.upper;
    let mut best_point = bounds.point;
    let mut explored = 1usize;
    let mut pruned = 0usize;
    let mut pruned_floor = f64::INFINITY;
    let mut seq = 0u64;
    let mut open = BinaryHeap::new();
    if bounds.lower < best_value - eps {
        open.push(Open {
            lower: bounds.lower,
            seq,
            cube: Cube {
                lower_bound: bounds.lower,
                ..root
            },
        });
        seq += 1;
    } else {
        pruned_floor = bounds.lower;
    }

    let status = loop {
        match open.peek() {
            Some(top) if top.lower < best_value - eps => {}
            _ => break Status::Converged,
        }

        let mut batch = Vec::with_capacity(config.batch_size);
        let mut children: Vec<Cube> = Vec::new();
        while batch.len() < config.batch_size {
            let Some(top) = open.peek() else { break };
            if top.lower >= best_value - eps {
                break;
            }
            let item = open.pop().expect("peeked");
            let kids = item.cube.subdivide();
            if explored + children.len() + kids.len() > config.max_cubes {
                open.push(item);
                break;
            }
            children.extend(kids);
            batch.push(item);
        }
        if batch.is_empty() {
            break Status::BudgetExhausted;
        }

        let evaluated: Vec<Result<CubeBounds>> = config
            .execution
            .map_slice(&children, |c| evaluate_cube(problem, c));
        explored += children.len();
        let evaluated = evaluated.into_iter().collect::<Result<Vec<_>>>()?;

        for b in &evaluated {
            if b.upper < best_value {
                best_value = b.upper;
                best_point = b.point;
            }
        }
        for (cube, b) in children.into_iter().zip(&evaluated) {
            if b.lower >= best_value - eps {
                pruned += 1;
                pruned_floor = pruned_floor.min(b.lower);
            } else {
                open.push(Open {
                    lower: b.lower,
                    seq,
                    cube: Cube {
                        lower_bound: b.lower,
                        ..cube
                    },
                });
                seq += 1;
            }
        }
    };

    let open_floor = open.peek().map_or(f64::INFINITY, |o| o.lower);
    let certified_lower_bound = open_floor.min(pruned_floor).min(best_value);

    if config.polish {
        let (value, point) = polish(problem, best_value, best_point)?;
        best_value = value;
        best_point = point;
    }

    let gap = (best_value - certified_lower_bound).max(0.0);
    let status = if gap <= eps {
        Status::Converged
    } else {
        status
    };
    Ok(SolverResult {
        best_rotation: best_point,
        best_value,
        certified_lower_bound,
        gap,
        cubes_explored: explored,
        cubes_pruned: pruned,
        status,
    })
}

/// Pattern search along the coordinate axes with a shrinking step; only
/// accepts strict improvements.
fn polish<R: Residuals>(
    problem: &Problem<R>,
    mut value: f64,
    mut point: AxisAngle,
) -> Result<(f64, AxisAngle)> {
    let mut step = 1e-2;
    while step > 1e-12 {
        let mut improved = false;
        for axis in 0..3 {
            for sign in [1.0, -1.0] {
                let mut v: Vector3<f64> = *point.vector();
                v[axis] += sign * step;
                let candidate = AxisAngle::project(&v);
                let f = problem.objective(&exp_map(&candidate))?;
                if f < value {
                    value = f;
                    point = candidate;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((value, point))
}
