use anyhow::{Context, Result};
use rand::Rng;
use rotbound::bnb::{
    format_problem, parse_problem, solve_with, Aggregator, Problem, RotationAveraging, SolverConfig,
};
use rotbound::certify::{
    chunk_rng, convexity_certificate, lemma_sweep, second_derivative_check, write_convexity_csv,
    SLACK_TOL,
};
use rotbound::rotation::{
    compose, exp_map, log_map, random_rotation, random_unit_vector, AxisAngle,
};
use rotbound::text::format_number;

use crate::config::RunConfig;
use crate::io::Target;
use crate::Verdict;

fn verdict(pass: bool) -> Verdict {
    if pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Summary lines go to stderr when the data itself is on stdout.
fn report(cfg: &RunConfig, line: &str) {
    if cfg.output.as_ref().is_some_and(Target::is_std) {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

pub fn certify_lemma(cfg: &RunConfig) -> Result<Verdict> {
    let sweep = lemma_sweep(cfg.seed, cfg.samples, cfg.execution);
    if let Some(out) = &cfg.output {
        out.write_with(|w| sweep.write_csv(w))?;
    }
    report(cfg, &format!("pairs={}", sweep.rows.len()));
    report(
        cfg,
        &format!("coaxial_max_abs_slack={:e}", sweep.coaxial_max_abs_slack),
    );
    report(cfg, &format!("min_slack={:e}", sweep.min_slack));
    Ok(verdict(sweep.min_slack >= -SLACK_TOL))
}

pub fn certify_convexity(cfg: &RunConfig) -> Result<Verdict> {
    let cert = convexity_certificate(cfg.grid, cfg.execution)?;
    let deriv = second_derivative_check();
    if let Some(out) = &cfg.output {
        out.write_with(|w| write_convexity_csv(cfg.grid, w))?;
    }
    report(cfg, &format!("evaluations={}", cert.evaluations));
    report(cfg, &cert.summary_line());
    report(
        cfg,
        &format!("max_derivative_deviation={:e}", deriv.max_deviation),
    );
    report(cfg, &format!("min_second_derivative={:e}", deriv.min_value));
    Ok(verdict(cert.passed() && deriv.passed()))
}

pub fn generate(cfg: &RunConfig) -> Result<Verdict> {
    let mut rng = chunk_rng(cfg.seed, 0);
    let truth = random_rotation(&mut rng);
    let rotations: Vec<AxisAngle> = (0..cfg.samples)
        .map(|_| {
            let axis = random_unit_vector(&mut rng);
            let angle: f64 = rng.gen_range(0.0..=cfg.noise);
            let perturbation = exp_map(&AxisAngle::project(&(axis * angle)));
            log_map(&compose(&truth, &perturbation))
        })
        .collect();
    let text = format_problem(
        cfg.cost.unwrap_or_default(),
        Some(&log_map(&truth)),
        &rotations,
    );
    let out = cfg.output.clone().unwrap_or(Target::Std);
    out.write_with(|w| w.write_all(text.as_bytes()))?;
    Ok(Verdict::Pass)
}

pub fn solve(cfg: &RunConfig) -> Result<Verdict> {
    let input = cfg.input.as_ref().context("solve needs --input")?;
    let text = input.read_to_string()?;
    let file = parse_problem(&text)?;
    let aggregator: Aggregator = cfg.cost.or(file.cost).unwrap_or_default();
    let problem = Problem::new(RotationAveraging::new(file.rotations)?, aggregator);
    let config = SolverConfig {
        epsilon: cfg.epsilon,
        max_cubes: cfg.max_cubes,
        execution: cfg.execution,
        ..SolverConfig::default()
    };
    let result = solve_with(&problem, &config)?;
    let r = result.best_rotation.vector();
    let line = format!(
        "{} {} {} {} {} {} {}\n",
        format_number(result.best_value),
        format_number(result.certified_lower_bound),
        format_number(result.gap),
        format_number(r.x),
        format_number(r.y),
        format_number(r.z),
        result.cubes_explored
    );
    let out = cfg.output.clone().unwrap_or(Target::Std);
    out.write_with(|w| w.write_all(line.as_bytes()))?;
    if !result.converged() {
        eprintln!(
            "budget of {} cubes exhausted with gap {}",
            cfg.max_cubes, result.gap
        );
    }
    Ok(verdict(result.gap <= cfg.epsilon))
}
