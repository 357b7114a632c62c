use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use rotbound::bnb::{Aggregator, DEFAULT_EPSILON, DEFAULT_MAX_CUBES};
use rotbound::Execution;

use crate::io::Target;

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Seed of the random streams.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Random pairs (certify-lemma) or rotations (generate).
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,

    /// Target optimality gap for solve.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,

    /// Cost aggregator: linf, l1 or l2sq. For solve this overrides the
    /// file's `# cost:` header.
    #[arg(long)]
    pub cost: Option<String>,

    /// Largest perturbation angle in radians (generate).
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,

    /// Problem file for solve; `-` reads stdin.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Output file; `-` writes stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Points per axis of the convexity grid.
    #[arg(long, default_value_t = 101)]
    pub grid: usize,

    /// Cube budget for solve.
    #[arg(long = "max-cubes", default_value_t = DEFAULT_MAX_CUBES)]
    pub max_cubes: usize,
}

/// Validated settings for one command run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: usize,
    pub epsilon: f64,
    pub cost: Option<Aggregator>,
    pub noise: f64,
    pub input: Option<Target>,
    pub output: Option<Target>,
    pub grid: usize,
    pub max_cubes: usize,
    pub execution: Execution,
}

impl RunConfig {
    pub fn from_args(command: &str, args: RunArgs, threads: Option<usize>) -> Result<Self> {
        if args.samples < 1 {
            bail!("--samples must be at least 1");
        }
        if !(args.epsilon > 0.0 && args.epsilon.is_finite()) {
            bail!("--epsilon must be positive");
        }
        if args.grid < 2 {
            bail!("--grid must be at least 2");
        }
        if args.max_cubes < 1 {
            bail!("--max-cubes must be at least 1");
        }
        if !(0.0..=std::f64::consts::PI).contains(&args.noise) {
            bail!("--noise must lie in [0, pi]");
        }
        if threads == Some(0) {
            bail!("--threads must be at least 1");
        }
        let cost = args
            .cost
            .as_deref()
            .map(str::parse::<Aggregator>)
            .transpose()?;

        let input = args.input.map(Target::from_path);
        if command == "solve" {
            match &input {
                Some(t) => t.check_readable()?,
                None => bail!("solve needs --input"),
            }
        }
        let output = args.output.map(Target::from_path);
        if let Some(t) = &output {
            t.check_writable()?;
        }

        let execution = if threads == Some(1) {
            Execution::Sequential
        } else {
            Execution::Parallel
        };
        Ok(RunConfig {
            seed: args.seed,
            samples: args.samples,
            epsilon: args.epsilon,
            cost,
            noise: args.noise,
            input,
            output,
            grid: args.grid,
            max_cubes: args.max_cubes,
            execution,
        })
    }
}
