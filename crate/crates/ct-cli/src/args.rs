//! Command-line surface and config-file merging.
//!
//! Every tunable can come from a flag or from a flat `key = value` TOML
//! config file; flags win, then the file, then the documented default.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ct_core::experiments::StudyConfig;
use ct_core::homology::LifespanConvention;
use ct_core::sunflower::DEFAULT_DISK_THRESHOLD;
use serde::Deserialize;

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(
    name = "ct",
    about = "Concurrence-topology analysis of binary presence/absence data",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-column mutation counts, sorted descending.
    Counts(InputArgs),
    /// Dimension-1 persistence diagram with short-cycle localization.
    Analyze(AnalyzeArgs),
    /// Short cycles of the maximum-lifespan classes only.
    Localize(AnalyzeArgs),
    /// Null-model simulation study: synthetic datasets and homology summaries.
    Simulate(StudyArgs),
    /// Bootstrap study: short-cycle membership over row resamples.
    Bootstrap(StudyArgs),
    /// Exceedance fractions of a simulation report against the observed data.
    Compare(CompareArgs),
    /// Sunflower persistence plot (SVG) from a diagram JSON file.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input score matrix (CSV/TSV: header row, leading row-label column).
    #[arg(long)]
    pub input: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub io: InputArgs,
    #[arg(long)]
    pub lifespan_convention: Option<LifespanConvention>,
    /// Flat key = value TOML config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[command(flatten)]
    pub io: InputArgs,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_synthetic: Option<usize>,
    #[arg(long)]
    pub n_bootstrap: Option<usize>,
    #[arg(long)]
    pub n_cutoff_resamples: Option<usize>,
    #[arg(long)]
    pub max_flip_attempts: Option<u64>,
    #[arg(long)]
    pub lifespan_convention: Option<LifespanConvention>,
    /// Gene label to track in membership summaries; repeatable.
    #[arg(long = "track")]
    pub tracked: Vec<String>,
    /// Worker threads; results are identical for any setting.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Stream per-run records to this newline-delimited JSON file.
    #[arg(long)]
    pub ndjson: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// Simulation report JSON produced by `ct simulate`.
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub lifespan_convention: Option<LifespanConvention>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Diagram JSON (from `ct analyze`).
    #[arg(long)]
    pub input: PathBuf,
    /// Output SVG file; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Multiplicities above this render as a disk with a printed count.
    #[arg(long)]
    pub disk_threshold: Option<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Flat key = value config file contents.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub n_synthetic: Option<usize>,
    pub n_bootstrap: Option<usize>,
    pub n_cutoff_resamples: Option<usize>,
    pub max_flip_attempts: Option<u64>,
    pub lifespan_convention: Option<LifespanConvention>,
    pub track: Option<Vec<String>>,
    pub disk_threshold: Option<usize>,
    pub jobs: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&PathBuf>) -> Result<Self, String> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
                toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", p.display()))
            }
        }
    }
}

impl StudyArgs {
    /// Flag > config file > default.
    pub fn resolve(&self, file: &FileConfig) -> StudyConfig {
        let defaults = StudyConfig::default();
        StudyConfig {
            n_synthetic: self.n_synthetic.or(file.n_synthetic).unwrap_or(defaults.n_synthetic),
            n_bootstrap: self.n_bootstrap.or(file.n_bootstrap).unwrap_or(defaults.n_bootstrap),
            n_cutoff_resamples: self
                .n_cutoff_resamples
                .or(file.n_cutoff_resamples)
                .unwrap_or(defaults.n_cutoff_resamples),
            master_seed: self.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            max_flip_attempts: self
                .max_flip_attempts
                .or(file.max_flip_attempts)
                .unwrap_or(defaults.max_flip_attempts),
            lifespan_convention: self
                .lifespan_convention
                .or(file.lifespan_convention)
                .unwrap_or(defaults.lifespan_convention),
            tracked_vertices: if self.tracked.is_empty() {
                file.track.clone().unwrap_or_default()
            } else {
                self.tracked.clone()
            },
        }
    }

    pub fn jobs(&self, file: &FileConfig) -> Option<usize> {
        self.jobs.or(file.jobs)
    }
}

impl PlotArgs {
    pub fn disk_threshold(&self, file: &FileConfig) -> usize {
        self.disk_threshold.or(file.disk_threshold).unwrap_or(DEFAULT_DISK_THRESHOLD)
    }
}
