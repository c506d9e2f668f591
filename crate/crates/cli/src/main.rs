//! `liquidpower`: power indices, bribery, weight maximization and maximin
//! delegation on JSON instances.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Parser, Debug)]
#[command(name = "liquidpower", version, about = "Power analysis for liquid democracy elections")]
pub struct Cli {
    /// Print a human-readable table instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,

    /// Seed for randomized methods.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Worker threads.
    #[arg(long, global = true, env = "LIQUIDPOWER_JOBS", default_value_t = 1)]
    pub jobs: usize,

    /// Admissible quotas: `supermajority` (Σw/2 < q ≤ Σw) or `positive` (1 ≤ q ≤ Σw).
    #[arg(long, global = true, value_enum, default_value_t = QuotaRuleArg::Supermajority)]
    pub quota_rule: QuotaRuleArg,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum QuotaRuleArg {
    Supermajority,
    Positive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Banzhaf,
    Shapley,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum IndexMethodArg {
    Exact,
    Dp,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BribeMethodArg {
    Exact,
    Gamw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeightMaxMethodArg {
    Exact,
    Branching,
    Xp,
    Colorcoding,
    Vbamw,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Banzhaf or Shapley-Shubik values of one voter or all voters.
    Index {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Banzhaf)]
        kind: KindArg,
        #[arg(long, value_enum, default_value_t = IndexMethodArg::Dp)]
        method: IndexMethodArg,
        /// 1-based voter id or `all`.
        #[arg(long, default_value = "all")]
        voter: String,
    },
    /// Change at most `budget` delegations to push a voter's power past a threshold.
    Bribe {
        instance: PathBuf,
        /// bmaxp, smaxp, bminp or sminp.
        #[arg(long)]
        objective: String,
        #[arg(long)]
        target: usize,
        #[arg(long)]
        budget: usize,
        /// Rational threshold such as `1/4` or `0.25`.
        #[arg(long)]
        threshold: String,
        #[arg(long, value_enum, default_value_t = BribeMethodArg::Exact)]
        method: BribeMethodArg,
    },
    /// Change at most `budget` delegations so the target gathers `threshold` weight.
    Weightmax {
        instance: PathBuf,
        #[arg(long)]
        target: usize,
        #[arg(long)]
        budget: usize,
        #[arg(long)]
        threshold: u64,
        #[arg(long, value_enum, default_value_t = WeightMaxMethodArg::Exact)]
        method: WeightMaxMethodArg,
        /// Budget overrun factor for vbamw, in (0, 1].
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        /// Failure probability for colorcoding, in (0, 1).
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
    },
    /// Profile with exactly `gurus` gurus maximizing the smallest voter value.
    Maximin {
        instance: PathBuf,
        #[arg(long)]
        gurus: usize,
        #[arg(long, value_enum, default_value_t = KindArg::Banzhaf)]
        kind: KindArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().collect();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build_global() {
        return output::emit_error(&argv, &anyhow::anyhow!(e), cli.pretty);
    }
    match commands::run(&cli) {
        Ok(report) => output::emit(&argv, report, cli.pretty),
        Err(e) => output::emit_error(&argv, &e, cli.pretty),
    }
}
