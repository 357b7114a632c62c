//! Best-first branch and bound over the axis-angle ball.
//!
//! Each cube of half width `σ` is bounded from one residual evaluation at
//! its centre: every rotation in the cube lies within angular distance
//! `√3σ` of the centre rotation, so a 1-Lipschitz residual can drop by at
//! most that much inside the cube.

mod cube;
mod problem;
mod solver;

pub use cube::{evaluate_cube, lower_bound, upper_bound, Cube, CubeBounds};
pub use problem::{
    format_problem, parse_problem, Aggregator, Problem, ProblemFile, Residuals, RotationAveraging,
};
pub use solver::{
    solve, solve_with, SolverConfig, SolverResult, Status, DEFAULT_BATCH_SIZE, DEFAULT_EPSILON,
    DEFAULT_MAX_CUBES,
};
