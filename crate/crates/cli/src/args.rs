// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "gindex", version, about = "Score generated flow programs and compute the g-index")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Worker threads; defaults to one per core. Output does not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output format; `simulate` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file, or directory for `gindex` and `flatland gen`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Search-node budget for each clique search.
    #[arg(long, global = true, env = "GINDEX_CLIQUE_BUDGET")]
    pub clique_budget: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Divergence and performance of a generated program against a reference.
    Score { reference: PathBuf, generated: PathBuf },
    /// Domain distance of a program from each curriculum domain.
    Omega {
        #[arg(long)]
        curriculum: PathBuf,
        program: PathBuf,
    },
    /// Group programs into task domains.
    Cluster {
        #[arg(required = true)]
        programs: Vec<PathBuf>,
        #[arg(long, default_value_t = 0.15)]
        threshold: f64,
    },
    /// Evaluate a manifest and report the g-index.
    Gindex {
        manifest: PathBuf,
        /// Overrides the manifest's priors.
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Sweep one input and tabulate the g-index.
    Simulate(SimulateArgs),
    /// Turtle-graphics toy environment.
    #[command(subcommand)]
    Flatland(FlatlandCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sweep {
    Samples,
    Compute,
    Theta,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub sweep: Sweep,
    #[arg(long)]
    pub start: Option<f64>,
    #[arg(long)]
    pub end: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long, default_value_t = 16)]
    pub domains: usize,
    /// Fixed performance when not swept.
    #[arg(long, default_value_t = 0.7)]
    pub theta: f64,
    /// Fixed total samples when not swept.
    #[arg(long, default_value_t = 2560)]
    pub samples: u64,
    /// Fixed total compute-time product (teraFLOP-seconds) when not swept.
    #[arg(long)]
    pub compute: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Domain distance used for every domain.
    #[arg(long, default_value_t = 0.09)]
    pub omega: f64,
    /// Random uneven splits per point for the band.
    #[arg(long, default_value_t = 32)]
    pub band_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    Lines,
    Circles,
    Mixed,
}

#[derive(Debug, Subcommand)]
pub enum FlatlandCommand {
    /// Render a program to PBM (or run-length text).
    Render {
        program: PathBuf,
        #[arg(long)]
        rle: bool,
    },
    /// Divergence between two programs.
    Score { first: PathBuf, second: PathBuf },
    /// Write seeded variations of a program.
    Augment {
        program: PathBuf,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 0.3)]
        max_delta: f64,
    },
    /// Generate a dataset of drawings into `--out`.
    Gen {
        #[arg(long, value_enum, default_value_t = Shape::Mixed)]
        shape: Shape,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        min_shapes: u32,
        #[arg(long, default_value_t = 5)]
        max_shapes: u32,
    },
}

impl GlobalArgs {
    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}
