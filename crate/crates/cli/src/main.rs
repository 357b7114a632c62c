//! `rotbound` command-line tool.
//!
//! Exit status: 0 when the command's check passes, 1 when it fails
//! (bound violated, gap above epsilon), 2 on usage, I/O or parse errors.

mod commands;
mod config;
mod io;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{RunArgs, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "rotbound",
    version,
    about = "Rotation-space bounds, certificates and branch-and-bound search"
)]
struct Cli {
    /// Worker threads; 1 selects the sequential reference path.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte-Carlo check of d(R_A, R_B) <= |r_A - r_B| plus boundary cases.
    CertifyLemma(RunArgs),
    /// Grid check of acos^2 convexity and of its second-derivative formula.
    CertifyConvexity(RunArgs),
    /// Solve a rotation-averaging problem file.
    Solve(RunArgs),
    /// Write a synthetic rotation-averaging problem file.
    Generate(RunArgs),
}

/// Outcome of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

fn run(cli: Cli) -> anyhow::Result<Verdict> {
    let (name, args) = match cli.command {
        Command::CertifyLemma(a) => ("certify-lemma", a),
        Command::CertifyConvexity(a) => ("certify-convexity", a),
        Command::Solve(a) => ("solve", a),
        Command::Generate(a) => ("generate", a),
    };
    let cfg = RunConfig::from_args(name, args, cli.threads)?;
    let work = || match name {
        "certify-lemma" => commands::certify_lemma(&cfg),
        "certify-convexity" => commands::certify_convexity(&cfg),
        "solve" => commands::solve(&cfg),
        _ => commands::generate(&cfg),
    };
    match cli.threads {
        Some(n) if n > 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(work),
        _ => work(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
