//! Floating-point certification runs for the distance bound and the
//! convexity argument behind it.
//!
//! Random sweeps are split into fixed-size chunks, each with its own
//! ChaCha stream derived from the seed, so results are identical for any
//! thread count.

use std::f64::consts::PI;
use std::io::{self, Write};

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lemma::{
    arccos_sq, arccos_sq_second_derivative, composed_angle_closed_form, inequality_slack,
    reparam_lhs, reparam_rhs, HalfAngleParams,
};
use crate::rotation::{
    angle_of, compose, enclosed_angle, exp_map, random_unit_vector, Angle, AxisAngle,
};

/// Smallest slack accepted before the bound counts as violated.
pub const SLACK_TOL: f64 = 1e-9;
/// Allowed `|slack|` on pairs sharing an axis direction, where the bound is tight.
pub const COAXIAL_TOL: f64 = 1e-12;
/// Allowed violation of the `acos²` chord inequality.
pub const CONVEXITY_TOL: f64 = 1e-12;
/// Allowed deviation of `f''` from central finite differences.
pub const DERIVATIVE_TOL: f64 = 1e-4;
/// Finite-difference step for the derivative check.
pub const FD_STEP: f64 = 1e-5;
/// Upper end of the finite-difference comparison range.
pub const FD_RANGE_END: f64 = 0.99;
/// Spacing of the finite-difference comparison points.
pub const FD_SPACING: f64 = 0.01;
/// Upper end of the range where `f''` must be non-negative.
pub const NONNEGATIVE_RANGE_END: f64 = 1.0 - 1e-6;

const CHUNK: usize = 4096;
const STRATA_STREAM: u64 = u64::MAX;

/// Seeded generator for work chunk `stream`.
pub fn chunk_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Rotation angle uniform on `[0, π]` about an axis uniform on the sphere.
pub fn random_axis_angle<R: Rng + ?Sized>(rng: &mut R) -> AxisAngle {
    let axis = random_unit_vector(rng);
    let angle: f64 = rng.gen_range(0.0..=PI);
    AxisAngle::project(&(axis * angle))
}

/// Where a sweep pair came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stratum {
    Random,
    /// Both vectors along the same axis direction; the bound holds with equality.
    Coaxial,
    /// `r_B = −r_A`.
    Antipodal,
    /// At least one vector on the sphere `‖r‖ = π`.
    Boundary,
}

/// One evaluated pair of a lemma sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub stratum: Stratum,
    pub alpha: f64,
    pub beta: f64,
    pub phi: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl SweepRow {
    pub fn evaluate(stratum: Stratum, r_a: &AxisAngle, r_b: &AxisAngle) -> Self {
        let report = inequality_slack(r_a, r_b);
        let phi = match (r_a.axis(), r_b.axis()) {
            (Some(a), Some(b)) => a.dot(&b).clamp(-1.0, 1.0).acos(),
            _ => 0.0,
        };
        SweepRow {
            stratum,
            alpha: r_a.angle(),
            beta: r_b.angle(),
            phi,
            lhs: report.lhs,
            rhs: report.rhs,
            slack: report.slack,
        }
    }
}

/// Outcome of a lemma sweep.
#[derive(Clone, Debug)]
pub struct LemmaSweep {
    pub rows: Vec<SweepRow>,
    pub min_slack: f64,
    /// Largest `|slack|` over the coaxial stratum.
    pub coaxial_max_abs_slack: f64,
}

impl LemmaSweep {
    pub fn passed(&self) -> bool {
        self.min_slack >= -SLACK_TOL && self.coaxial_max_abs_slack <= COAXIAL_TOL
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "alpha,beta,phi,lhs,rhs,slack")?;
        for r in &self.rows {
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e},{:e}",
                r.alpha, r.beta, r.phi, r.lhs, r.rhs, r.slack
            )?;
        }
        out.flush()
    }
}

/// Fixed boundary suite: coaxial pairs, antipodal pairs, and pairs on the
/// ball surface, plus a few exact axis-aligned cases.
pub fn boundary_strata(seed: u64) -> Vec<(Stratum, AxisAngle, AxisAngle)> {
    let mut rng = chunk_rng(seed, STRATA_STREAM);
    let mut out = Vec::new();
    let on_axis = |axis: &Vector3<f64>, angle: f64| AxisAngle::project(&(axis * angle));

    let x = Vector3::x();
    for (a, b) in [(0.0, 0.0), (PI, 0.0), (PI, PI), (1.0, 1.0), (PI, 1e-9)] {
        out.push((Stratum::Coaxial, on_axis(&x, a), on_axis(&x, b)));
    }
    out.push((Stratum::Antipodal, on_axis(&x, PI), on_axis(&x, -PI)));
    out.push((
        Stratum::Boundary,
        on_axis(&x, PI),
        on_axis(&Vector3::y(), PI),
    ));

    for _ in 0..1000 {
        let axis = random_unit_vector(&mut rng);
        let (a, b) = (rng.gen_range(0.0..=PI), rng.gen_range(0.0..=PI));
        out.push((Stratum::Coaxial, on_axis(&axis, a), on_axis(&axis, b)));
    }
    for _ in 0..1000 {
        let axis = random_unit_vector(&mut rng);
        let a = rng.gen_range(0.0..=PI);
        out.push((Stratum::Antipodal, on_axis(&axis, a), on_axis(&axis, -a)));
        let axis = random_unit_vector(&mut rng);
        out.push((Stratum::Antipodal, on_axis(&axis, PI), on_axis(&axis, -PI)));
    }
    for _ in 0..1000 {
        let (a, b) = (random_unit_vector(&mut rng), random_unit_vector(&mut rng));
        out.push((Stratum::Boundary, on_axis(&a, PI), on_axis(&b, PI)));
        let inner = random_axis_angle(&mut rng);
        let c = random_unit_vector(&mut rng);
        out.push((Stratum::Boundary, on_axis(&c, PI), inner));
    }
    out
}

/// Evaluates the bound on `samples` random pairs plus [`boundary_strata`].
pub fn lemma_sweep(seed: u64, samples: usize, exec: Execution) -> LemmaSweep {
    let chunks = samples.div_ceil(CHUNK);
    let mut rows: Vec<SweepRow> = exec
        .map_indexed(chunks, |c| {
            let mut rng = chunk_rng(seed, c as u64);
            let n = CHUNK.min(samples - c * CHUNK);
            (0..n)
                .map(|_| {
                    let r_a = random_axis_angle(&mut rng);
                    let r_b = random_axis_angle(&mut rng);
                    SweepRow::evaluate(Stratum::Random, &r_a, &r_b)
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect();
    let strata = boundary_strata(seed);
    rows.extend(exec.map_slice(&strata, |(s, a, b)| SweepRow::evaluate(*s, a, b)));

    let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let coaxial_max_abs_slack = rows
        .iter()
        .filter(|r| r.stratum == Stratum::Coaxial)
        .map(|r| r.slack.abs())
        .fold(0.0, f64::max);
    LemmaSweep {
        rows,
        min_slack,
        coaxial_max_abs_slack,
    }
}

/// Largest pairwise disagreements between the routes to the composed angle
/// and to the right hand side.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ProofChainReport {
    pub samples: usize,
    /// Closed form vs half-angle form of the left side.
    pub closed_vs_reparam: f64,
    /// Closed form vs `angle_of(R_B·R_A)`.
    pub closed_vs_matrix: f64,
    /// Half-angle form vs `angle_of(R_B·R_A)`.
    pub reparam_vs_matrix: f64,
    /// Half-angle right side vs `‖r_A + r_B‖`.
    pub rhs_vs_norm: f64,
}

impl ProofChainReport {
    fn merge(self, other: Self) -> Self {
        ProofChainReport {
            samples: self.samples + other.samples,
            closed_vs_reparam: self.closed_vs_reparam.max(other.closed_vs_reparam),
            closed_vs_matrix: self.closed_vs_matrix.max(other.closed_vs_matrix),
            reparam_vs_matrix: self.reparam_vs_matrix.max(other.reparam_vs_matrix),
            rhs_vs_norm: self.rhs_vs_norm.max(other.rhs_vs_norm),
        }
    }
}

/// Compares every form of both sides on random `(α, β, φ)` triples realised
/// by explicit axes sampled uniformly on the sphere.
pub fn proof_chain_sweep(seed: u64, samples: usize, exec: Execution) -> ProofChainReport {
    let chunks = samples.div_ceil(CHUNK);
    exec.map_indexed(chunks, |c| {
        let mut rng = chunk_rng(seed, c as u64);
        let n = CHUNK.min(samples - c * CHUNK);
        let mut report = ProofChainReport::default();
        for _ in 0..n {
            let (axis_a, axis_b) = (random_unit_vector(&mut rng), random_unit_vector(&mut rng));
            let alpha = Angle::new(rng.gen_range(0.0..=PI)).expect("sampled in range");
            let beta = Angle::new(rng.gen_range(0.0..=PI)).expect("sampled in range");
            let phi = enclosed_angle(&axis_a, &axis_b).expect("unit axes");
            let r_a = AxisAngle::project(&(axis_a * alpha.radians()));
            let r_b = AxisAngle::project(&(axis_b * beta.radians()));

            let params = HalfAngleParams::from_angles(alpha, beta, phi);
            let closed = composed_angle_closed_form(alpha, beta, phi).radians();
            let reparam = reparam_lhs(&params).radians();
            let matrix = angle_of(&compose(&exp_map(&r_a), &exp_map(&r_b))).radians();
            let rhs = reparam_rhs(&params);
            let norm = (r_a.vector() + r_b.vector()).norm();

            report = report.merge(ProofChainReport {
                samples: 1,
                closed_vs_reparam: (closed - reparam).abs(),
                closed_vs_matrix: (closed - matrix).abs(),
                reparam_vs_matrix: (reparam - matrix).abs(),
                rhs_vs_norm: (rhs - norm).abs(),
            });
        }
        report
    })
    .into_iter()
    .fold(ProofChainReport::default(), ProofChainReport::merge)
}

/// `d·a + (1 − d)·b`, exact when `d ∈ {0, 1}` or `a = b`.
fn blend(d: f64, a: f64, b: f64) -> f64 {
    if d < 0.5 {
        b + d * (a - b)
    } else {
        a - (1.0 - d) * (a - b)
    }
}

/// `acos²(d·x + (1 − d)·y) − (d·acos² x + (1 − d)·acos² y)`; positive values
/// violate convexity.
pub fn chord_violation(x: f64, y: f64, d: f64) -> f64 {
    arccos_sq(blend(d, x, y)) - blend(d, arccos_sq(x), arccos_sq(y))
}

/// Result of checking the `acos²` chord inequality on a uniform grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvexityCertificate {
    pub grid_size: usize,
    pub evaluations: usize,
    pub max_violation: f64,
    /// `(x, y, d)` where the maximum was attained.
    pub worst: (f64, f64, f64),
}

impl ConvexityCertificate {
    pub fn passed(&self) -> bool {
        self.max_violation <= CONVEXITY_TOL
    }

    pub fn summary_line(&self) -> String {
        format!("max_violation={:e}", self.max_violation)
    }
}

fn grid_point(i: usize, n: usize) -> f64 {
    i as f64 / (n - 1) as f64
}

fn check_grid_size(grid_size: usize) -> Result<()> {
    if grid_size < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid size must be at least 2, got {grid_size}"
        )));
    }
    Ok(())
}

/// Evaluates [`chord_violation`] on every `(x, y, d)` of a `grid_size³` grid
/// over `[0, 1]³`.
pub fn convexity_certificate(grid_size: usize, exec: Execution) -> Result<ConvexityCertificate> {
    check_grid_size(grid_size)?;
    let n = grid_size;
    let slices = exec.map_indexed(n, |i| {
        let x = grid_point(i, n);
        let mut best = (f64::NEG_INFINITY, (x, 0.0, 0.0));
        for j in 0..n {
            let y = grid_point(j, n);
            for k in 0..n {
                let d = grid_point(k, n);
                let v = chord_violation(x, y, d);
                if v > best.0 {
                    best = (v, (x, y, d));
                }
            }
        }
        best
    });
    let (max_violation, worst) =
        slices
            .into_iter()
            .fold((f64::NEG_INFINITY, (0.0, 0.0, 0.0)), |acc, s| {
                if s.0 > acc.0 {
                    s
                } else {
                    acc
                }
            });
    Ok(ConvexityCertificate {
        grid_size,
        evaluations: n * n * n,
        max_violation,
        worst,
    })
}

/// Streams the grid as CSV rows `x,y,d,violation`.
pub fn write_convexity_csv<W: Write>(grid_size: usize, mut out: W) -> io::Result<()> {
    check_grid_size(grid_size)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e.to_string()))?;
    let n = grid_size;
    writeln!(out, "x,y,d,violation")?;
    for i in 0..n {
        let x = grid_point(i, n);
        for j in 0..n {
            let y = grid_point(j, n);
            for k in 0..n {
                let d = grid_point(k, n);
                writeln!(out, "{x:e},{y:e},{d:e},{:e}", chord_violation(x, y, d))?;
            }
        }
    }
    out.flush()
}

/// Comparison of `f''` against finite differences and its sign check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeCheck {
    /// Largest `|f'' − FD|` on `[0, 0.99]` at spacing 0.01.
    pub max_deviation: f64,
    /// Smallest `f''` seen on `[0, 1 − 1e−6]`.
    pub min_value: f64,
}

impl DerivativeCheck {
    pub fn passed(&self) -> bool {
        self.max_deviation <= DERIVATIVE_TOL && self.min_value >= 0.0
    }
}

/// Central second difference of `acos²`.
pub fn finite_difference_second(x: f64, h: f64) -> f64 {
    (arccos_sq(x + h) - 2.0 * arccos_sq(x) + arccos_sq(x - h)) / (h * h)
}

pub fn second_derivative_check() -> DerivativeCheck {
    let steps = (FD_RANGE_END / FD_SPACING).round() as usize;
    let max_deviation = (0..=steps)
        .map(|i| {
            let x = i as f64 * FD_SPACING;
            let exact = arccos_sq_second_derivative(x).expect("x < 1");
            (exact - finite_difference_second(x, FD_STEP)).abs()
        })
        .fold(0.0, f64::max);

    // dense uniform grid plus points crowding the upper end
    let dense = 100_000;
    let uniform = (0..=dense).map(|i| NONNEGATIVE_RANGE_END * i as f64 / dense as f64);
    let tail = (1..=6).map(|k| 1.0 - 10f64.powi(-k));
    let min_value = uniform
        .chain(tail)
        .map(|x| arccos_sq_second_derivative(x).expect("x < 1"))
        .fold(f64::INFINITY, f64::min);
    DerivativeCheck {
        max_deviation,
        min_value,
    }
}
