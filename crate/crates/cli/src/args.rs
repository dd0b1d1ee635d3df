//! Command-line and config-file arguments.
//!
//! Every subcommand field is optional so that a JSON config can fill what the
//! flags leave out; defaults are applied after merging.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use matdisc::Exponent;
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "matdisc", version, about = "Matrix discrepancy experiments")]
pub struct Cli {
    /// Master seed; every stochastic step derives its stream from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (CSV or JSON depending on the subcommand); stdout if absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to machine parallelism.
    #[arg(long, global = true, env = "MATDISC_WORKERS")]
    pub workers: Option<usize>,
    /// JSON run config. Flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Color an instance and report bound ratios.
    Solve(SolveArgs),
    /// Tabulate every bound formula.
    Bounds(BoundsArgs),
    /// Check the mirror-descent guarantee on sampled targets.
    Mdcheck(MdcheckArgs),
    /// Measure relative-entropy net error and check the op-norm lemma.
    Netcheck(NetcheckArgs),
    /// Estimate the Gaussian measure of a discrepancy body.
    Measure(MeasureArgs),
    /// Run a coloring strategy over a parameter grid.
    Sweep(SweepArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Solve(_) => "solve",
            Command::Bounds(_) => "bounds",
            Command::Mdcheck(_) => "mdcheck",
            Command::Netcheck(_) => "netcheck",
            Command::Measure(_) => "measure",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InstanceArgs {
    /// Instance file to load instead of generating one.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Generator family (random, diagonal-spencer, hadamard, rank1-lower, coordinate).
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub p: Option<Exponent>,
    #[arg(long)]
    pub q: Option<Exponent>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub h: Option<usize>,
    /// Keep the Hadamard family unsymmetrized.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub raw: Option<bool>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenArgs {
    #[command(flatten)]
    #[serde(rename = "spec")]
    pub inst: InstanceArgs,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveArgs {
    #[command(flatten)]
    #[serde(rename = "spec")]
    pub inst: InstanceArgs,
    /// partial | full
    #[arg(long)]
    pub mode: Option<String>,
    /// Coloring strategy for full mode.
    #[arg(long)]
    pub strategy: Option<String>,
    /// Per-round target rule.
    #[arg(long)]
    pub rule: Option<String>,
    /// Target for a single partial coloring; defaults to the rule at s = n.
    #[arg(long)]
    pub t: Option<f64>,
    /// Ratio to the rule target above which the result counts as over bound.
    #[arg(long)]
    pub c_max: Option<f64>,
    /// Also compute the exact optimum by enumeration.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub brute_check: Option<bool>,
    #[arg(long)]
    pub random_trials: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub max_retries: Option<usize>,
    /// CSV file receiving a one-row summary.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsArgs {
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    #[arg(long)]
    pub p: Option<Exponent>,
    #[arg(long)]
    pub q: Option<Exponent>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub h: Option<usize>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MdcheckArgs {
    /// spectraplex | schatten:<p*>
    #[arg(long)]
    pub setup: Option<String>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of matrices, also the step budget; defaults to 2m.
    #[arg(long)]
    pub n: Option<usize>,
    /// Independent instances.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Sampled targets per instance.
    #[arg(long)]
    pub samples: Option<usize>,
    /// default | net | <exported net JSON>
    #[arg(long)]
    pub starts: Option<String>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetcheckArgs {
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub h: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub c_limit: Option<f64>,
    /// Random triples for the op-norm to relative-entropy lemma.
    #[arg(long)]
    pub lemma_trials: Option<usize>,
    #[arg(long)]
    pub size_cap: Option<u64>,
    /// Write the net points as JSON (small nets only).
    #[arg(long)]
    pub export: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeasureArgs {
    #[command(flatten)]
    #[serde(rename = "spec")]
    pub inst: InstanceArgs,
    /// Fixed threshold; overrides the rule.
    #[arg(long)]
    pub t: Option<f64>,
    /// spencer | sqrt:<c> | const:<t> | inf
    #[arg(long)]
    pub rule: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Sweep the family over these n (m follows n unless given).
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepArgs {
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Defaults to m = n for each grid point.
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub r: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<Exponent>>,
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<Exponent>>,
    /// Seeds per grid point.
    #[arg(long)]
    pub seeds: Option<usize>,
    #[arg(long)]
    pub strategy: Option<String>,
    #[arg(long)]
    pub rule: Option<String>,
    #[arg(long)]
    pub c_max: Option<f64>,
}
