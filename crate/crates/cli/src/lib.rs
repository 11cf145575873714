//! Command-line experiment runner for `imopt`.

pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::Baseline;
use config::ExperimentConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "imopt", version, about = "Many-objective influence maximization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output_dir`.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads; overrides `workers`.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Base seed; overrides `rng_seed_base` (or the detection seed).
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Keep the largest weakly connected component and drop small communities.
    Preprocess(Common),
    /// Run the evolutionary optimizer.
    Run(Common),
    /// Run a greedy baseline and evaluate all its prefixes.
    Baseline {
        #[arg(value_enum)]
        which: Baseline,
        #[command(flatten)]
        common: Common,
    },
    /// Correlation matrix and hypervolume table of front CSVs.
    Analyze {
        #[arg(long)]
        output: PathBuf,
        #[arg(required = true)]
        fronts: Vec<PathBuf>,
    },
    /// Detect communities and write the assignment.
    DetectCommunities(Common),
}

fn load(common: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(out) = &common.output {
        cfg.output_dir = out.clone();
    }
    if let Some(w) = common.workers {
        cfg.workers = Some(w);
    }
    if let Some(s) = common.seed {
        cfg.rng_seed_base = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Executes a parsed command line.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Preprocess(c) => {
            let cfg = load(&c)?;
            let report = commands::preprocess(&cfg, &cfg.output_dir)?;
            println!(
                "{} nodes, {} edges, {} communities",
                report.output.nodes,
                report.output.edges,
                report.communities.map_or("no".into(), |n| n.to_string())
            );
        }
        Command::Run(c) => {
            let cfg = load(&c)?;
            let s = commands::run(&cfg)?;
            print_summary(&s);
        }
        Command::Baseline { which, common } => {
            let cfg = load(&common)?;
            let s = commands::baseline(&cfg, which)?;
            print_summary(&s);
        }
        Command::Analyze { output, fronts } => {
            let m = commands::analyze(&fronts, &output)?;
            let names = imopt::analysis::objective_names();
            for (i, row) in m.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|x| format!("{x:>7.3}")).collect();
                println!("{:<18}{}", names[i], cells.join(" "));
            }
        }
        Command::DetectCommunities(c) => {
            let cfg = load(&c)?;
            let r = commands::detect(&cfg, c.seed, &cfg.output_dir)?;
            println!("{} communities, modularity {:.4}", r.communities, r.modularity);
        }
    }
    Ok(())
}

fn print_summary(s: &report::Summary) {
    println!("{} on {} nodes, {} runs", s.algorithm, s.node_count, s.runs.len());
    for m in &s.hypervolume {
        match (m.mean, m.std) {
            (Some(mean), Some(std)) => println!("  HV {:<8} {mean:.4e} ± {std:.2e}", m.mask),
            _ => println!("  HV {:<8} n/a", m.mask),
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
