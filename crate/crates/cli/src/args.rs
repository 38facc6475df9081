use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use homophily_core::{Attribute, Direction};

#[derive(Debug, Parser)]
#[command(name = "homophily", version, about = "Location-homophily experiments on mutual-friend graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for evaluation and sweeps: a count or "auto".
    #[arg(long, global = true, default_value = "auto", value_parser = parse_workers)]
    pub workers: Workers,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Write outputs into this directory instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Graph statistics, one row per dataset.
    Stats(DataArgs),
    /// Spearman correlations and box statistics of the attributes.
    Correlate(DataArgs),
    /// Leave-one-out accuracy and coverage, optionally under one filter.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_parser = parse_attribute)]
        attribute: Option<Attribute>,
        #[arg(long, value_parser = parse_direction)]
        direction: Option<Direction>,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Sweep one filter over the threshold grid.
    Sweep {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_parser = parse_attribute)]
        attribute: Attribute,
        #[arg(long, value_parser = parse_direction)]
        direction: Direction,
        #[command(flatten)]
        test: TestArgs,
    },
    /// Five-row filter comparison per dataset with significance marks.
    Report {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        test: TestArgs,
    },
    /// Generate a synthetic dataset.
    Synth {
        /// JSON generator configuration; defaults are used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the configured seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Dataset directory holding edges.tsv, labels.tsv and attributes.tsv.
    #[arg(long = "dataset")]
    pub datasets: Vec<PathBuf>,
    #[arg(long)]
    pub edges: Vec<PathBuf>,
    #[arg(long)]
    pub labels: Vec<PathBuf>,
    #[arg(long)]
    pub attributes: Vec<PathBuf>,
    /// Display name per dataset, in order.
    #[arg(long)]
    pub name: Vec<String>,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct TestArgs {
    #[arg(long, default_value_t = 0.3, value_parser = parse_floor)]
    pub coverage_floor: f64,
    #[arg(long, default_value_t = 0.05, value_parser = parse_alpha)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Table => "txt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Workers {
    Auto,
    Count(usize),
}

fn parse_workers(s: &str) -> Result<Workers, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Workers::Auto);
    }
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(Workers::Count(n)),
        _ => Err(format!("expected a positive count or \"auto\", got {s:?}")),
    }
}

fn parse_attribute(s: &str) -> Result<Attribute, String> {
    s.parse().map_err(|e: homophily_core::Error| e.to_string())
}

fn parse_direction(s: &str) -> Result<Direction, String> {
    s.parse().map_err(|e: homophily_core::Error| e.to_string())
}

fn parse_floor(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v < 1.0 => Ok(v),
        _ => Err(format!("coverage floor must lie in (0, 1), got {s:?}")),
    }
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v <= 0.5 => Ok(v),
        _ => Err(format!("alpha must lie in (0, 0.5], got {s:?}")),
    }
}
