//! Command-line surface of the `airnet` binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::evolution::{diff_snapshots, evolution_table};
use crate::fitting::{
    fit_exponential, fit_exponential_growth, fit_linear, fit_power, fit_two_regime_points, Fit,
};
use crate::graph::MergeMap;
use crate::io::{read_domestic, read_merge_map, read_points, read_snapshot, read_snapshot_dir, read_traffic};
use crate::metrics::{BetweennessScale, Binning, LowDegreeClustering, MetricOptions};
use crate::report::{
    node_table_csv, run_report, snapshot_report, to_json, traffic_report, versioned, AnalysisOptions,
    RunConfig,
};
use crate::traffic::StrengthBinning;

#[derive(Debug, Parser)]
#[command(
    name = "airnet",
    version,
    about = "Airport-network topology, turnover and traffic statistics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FitKind {
    TwoRegime,
    Exponential,
    Power,
    Linear,
    Growth,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Merge map CSV (`raw_code,city_code`).
    #[arg(long)]
    pub merge_map: Option<PathBuf>,
    /// Reject codes missing from the merge map instead of keeping them as-is.
    #[arg(long)]
    pub strict_merge: bool,
    /// Domestic airport list, one code per line.
    #[arg(long)]
    pub domestic: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    /// Log-binning base for the degree pdf behind the two-regime fit.
    #[arg(long, default_value_t = 1.5)]
    pub binning_base: f64,
    /// Fit the raw degree pdf instead of the log-binned one.
    #[arg(long)]
    pub raw_binning: bool,
    #[arg(long, value_enum, default_value = "raw")]
    pub betweenness: Scale,
    #[arg(long, value_enum, default_value = "zero")]
    pub clustering: LowDegree,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Scale {
    Raw,
    Normalized,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LowDegree {
    Zero,
    Exclude,
}

impl MetricArgs {
    fn options(&self) -> Result<AnalysisOptions> {
        let binning = if self.raw_binning {
            Binning::Raw
        } else {
            Binning::log(self.binning_base).map_err(|e| Error::Config(e.to_string()))?
        };
        Ok(AnalysisOptions {
            binning,
            metrics: MetricOptions {
                betweenness: match self.betweenness {
                    Scale::Raw => BetweennessScale::Raw,
                    Scale::Normalized => BetweennessScale::Normalized,
                },
                low_degree_clustering: match self.clustering {
                    LowDegree::Zero => LowDegreeClustering::Zero,
                    LowDegree::Exclude => LowDegreeClustering::Exclude,
                },
            },
            strength_binning: StrengthBinning::DegreeClass,
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-node table and summary statistics of one snapshot.
    Metrics {
        snapshot: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Per-period statistics table over a directory of snapshots.
    Evolve {
        dir: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Airport and route turnover between two snapshots.
    Diff {
        earlier: PathBuf,
        later: PathBuf,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Growth, seasonality, correlation and strength analyses of a traffic file.
    Traffic {
        file: PathBuf,
        /// Snapshot directory for per-link/per-node traffic and strength tables.
        #[arg(long)]
        snapshots: Option<PathBuf>,
        #[command(flatten)]
        input: InputArgs,
        /// Fit strength against individual airports rather than degree-class means.
        #[arg(long)]
        raw_strength: bool,
    },
    /// Fit a model to an `x,y` CSV.
    Fit {
        #[arg(value_enum)]
        kind: FitKind,
        file: PathBuf,
    },
    /// Batch run driven by a key=value config file.
    Report {
        config: PathBuf,
        /// Override a config entry (`key=value`); may repeat.
        #[arg(long = "set", value_parser = parse_key_value)]
        overrides: Vec<(String, String)>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Omit the wall-clock field from the manifest.
        #[arg(long)]
        no_timestamp: bool,
    },
}

fn parse_key_value(s: &str) -> std::result::Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| format!("expected key=value, got `{s}`"))
}

fn load_merge(
    input: &InputArgs,
) -> Result<(
    MergeMap,
    Option<std::collections::BTreeSet<crate::graph::AirportId>>,
)> {
    let merge = match &input.merge_map {
        Some(p) => read_merge_map(p)?,
        None => MergeMap::identity(),
    }
    .strict(input.strict_merge);
    let domestic = input.domestic.as_deref().map(read_domestic).transpose()?;
    Ok((merge, domestic))
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// Runs a command, printing its output to stdout. Returns the output text.
pub fn execute(command: Command) -> Result<String> {
    match command {
        Command::Metrics {
            snapshot,
            input,
            metric,
            format,
        } => {
            let opts = metric.options()?;
            let (merge, domestic) = load_merge(&input)?;
            let g = read_snapshot(&snapshot, &merge, domestic.as_ref())?;
            let report = crate::par::with_workers(metric.workers, || snapshot_report(&g, &opts));
            Ok(match format {
                Format::Csv => node_table_csv(&report.node_table),
                Format::Json => to_json(&report),
            })
        }
        Command::Evolve {
            dir,
            input,
            metric,
            format,
        } => {
            let opts = metric.options()?;
            let (merge, domestic) = load_merge(&input)?;
            let snaps = read_snapshot_dir(&dir, &merge, domestic.as_ref())?;
            let table =
                crate::par::with_workers(metric.workers, || evolution_table(&snaps, &opts.evolution()))?;
            Ok(match format {
                Format::Csv => table.to_csv(),
                Format::Json => versioned(&table),
            })
        }
        Command::Diff {
            earlier,
            later,
            input,
        } => {
            let (merge, domestic) = load_merge(&input)?;
            let a = read_snapshot(&earlier, &merge, domestic.as_ref())?;
            let b = read_snapshot(&later, &merge, domestic.as_ref())?;
            Ok(versioned(&diff_snapshots(&a, &b)?))
        }
        Command::Traffic {
            file,
            snapshots,
            input,
            raw_strength,
        } => {
            let (merge, domestic) = load_merge(&input)?;
            let data = read_traffic(&file)?;
            let snaps = match snapshots {
                Some(dir) => read_snapshot_dir(&dir, &merge, domestic.as_ref())?,
                None => Vec::new(),
            };
            let opts = AnalysisOptions {
                strength_binning: if raw_strength {
                    StrengthBinning::Raw
                } else {
                    StrengthBinning::DegreeClass
                },
                ..AnalysisOptions::default()
            };
            Ok(to_json(&traffic_report(&data, &snaps, &merge, &opts)))
        }
        Command::Fit { kind, file } => {
            let pts = read_points(&file)?;
            let block = match kind {
                FitKind::TwoRegime => fit_two_regime_points(&pts)?.block(),
                FitKind::Exponential => fit_exponential(&pts)?.block(),
                FitKind::Power => fit_power(&pts)?.block(),
                FitKind::Linear => fit_linear(&pts)?.block(),
                FitKind::Growth => fit_exponential_growth(&pts)?.block(),
            };
            Ok(versioned(&block))
        }
        Command::Report {
            config,
            mut overrides,
            output,
            workers,
            format,
            no_timestamp,
        } => {
            if let Some(o) = output {
                let abs = std::env::current_dir().map(|d| d.join(&o)).unwrap_or(o);
                overrides.push(("output_dir".into(), abs.display().to_string()));
            }
            if let Some(w) = workers {
                overrides.push(("workers".into(), w.to_string()));
            }
            if let Some(f) = format {
                overrides.push(("format".into(), format_name(f).into()));
            }
            if no_timestamp {
                overrides.push(("timestamp".into(), "false".into()));
            }
            let cfg = RunConfig::load(&config, &overrides)?;
            let outcome = run_report(&cfg)?;
            let summary = serde_json::json!({
                "output_dir": outcome.output_dir.display().to_string(),
                "files": outcome.files,
                "errors": outcome.errors,
            });
            if !outcome.errors.is_empty() {
                // The summary still goes to stdout so scripts can find the files.
                print!("{}", to_json(&summary));
                return Err(Error::Degenerate(format!(
                    "report written to {} with {} failed section(s); see manifest.json",
                    outcome.output_dir.display(),
                    outcome.errors.len()
                )));
            }
            Ok(to_json(&summary))
        }
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli.command) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            let code = e.exit_code();
            eprintln!(
                "{}",
                serde_json::json!({ "error": e.to_string(), "exit_code": code })
            );
            code
        }
    }
}
