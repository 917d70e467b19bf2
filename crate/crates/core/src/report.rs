//! Batch runs: configuration, per-section report assembly and output files.
//!
//! Every JSON document carries `schema_version`. Report content depends only
//! on the inputs and the configuration; the single wall-clock field
//! (`generated_at` in the manifest) can be switched off.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{diff_snapshots, evolution_table, EvolutionOptions, EvolutionTable, TurnoverReport};
use crate::fitting::{
    fit_exponential, fit_exponential_growth, fit_two_regime_power_law, Fit, FitBlock, LinearFit,
};
use crate::graph::{AirportId, GraphSnapshot, Half, MergeMap, PeriodLabel};
use crate::io::{read_domestic, read_merge_map, read_snapshot_dir, read_traffic, TrafficData};
use crate::metrics::{
    clustering, degree_distribution, degree_distribution_of, in_out_correlation, nearest_neighbor_degree,
    node_metrics, reciprocity, shortest_path_stats, BetweennessScale, Binning, DegreeKind, DistributionTable,
    LowDegreeClustering, MetricOptions, NodeMetrics, PathStats, ReciprocityResult,
};
use crate::traffic::{
    correlate_series, per_link_per_node_traffic, seasonal_decompose, strength_degree_fit, strength_table,
    NormalizedTraffic, SeasonalDecomposition, StrengthBinning, StrengthField, StrengthFit, StrengthTable,
    TimeSeries, TrafficField, TrafficSeries,
};

pub const SCHEMA_VERSION: u32 = 1;

/// A value, or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Computed<T> {
    Value(T),
    Failed { error: String },
}

impl<T> Computed<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Computed::Value(v) => Some(v),
            Computed::Failed { .. } => None,
        }
    }

    pub fn error(&self) -> Option<&str> {
        match self {
            Computed::Value(_) => None,
            Computed::Failed { error } => Some(error),
        }
    }
}

impl<T> From<Result<T>> for Computed<T> {
    fn from(r: Result<T>) -> Self {
        match r {
            Ok(v) => Computed::Value(v),
            Err(e) => Computed::Failed { error: e.to_string() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Options shared by the per-snapshot computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisOptions {
    pub binning: Binning,
    pub metrics: MetricOptions,
    pub strength_binning: StrengthBinning,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            binning: Binning::Logarithmic { base: 1.5 },
            metrics: MetricOptions::default(),
            strength_binning: StrengthBinning::DegreeClass,
        }
    }
}

impl AnalysisOptions {
    pub fn evolution(&self) -> EvolutionOptions {
        EvolutionOptions {
            binning: self.binning,
            metrics: self.metrics,
        }
    }
}

/// Everything computed for one snapshot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotReport {
    pub schema_version: u32,
    pub period: PeriodLabel,
    pub nodes: usize,
    pub arcs: usize,
    pub edges: usize,
    pub mean_degree: f64,
    pub mean_k_in: f64,
    pub mean_k_out: f64,
    pub degree_pdf: DistributionTable,
    pub degree_pdf_binned: Computed<DistributionTable>,
    pub in_degree_pdf: DistributionTable,
    pub out_degree_pdf: DistributionTable,
    pub degree_fit: Computed<FitBlock>,
    pub in_out_fit: Computed<LinearFit>,
    pub knn_by_degree: Computed<Vec<(usize, f64)>>,
    pub clustering_by_degree: Vec<(usize, f64)>,
    pub mean_clustering: f64,
    pub paths: Computed<PathStats>,
    pub reciprocity: Computed<ReciprocityResult>,
    pub betweenness_scale: BetweennessScale,
    pub betweenness_degree_fit: Computed<FitBlock>,
    pub node_table: Vec<NodeMetrics>,
}

impl SnapshotReport {
    /// Failed sections, each prefixed with the period.
    pub fn errors(&self) -> Vec<String> {
        let p = self.period;
        [
            ("degree_pdf_binned", self.degree_pdf_binned.error()),
            ("degree_fit", self.degree_fit.error()),
            ("in_out_fit", self.in_out_fit.error()),
            ("knn_by_degree", self.knn_by_degree.error()),
            ("paths", self.paths.error()),
            ("reciprocity", self.reciprocity.error()),
            ("betweenness_degree_fit", self.betweenness_degree_fit.error()),
        ]
        .into_iter()
        .filter_map(|(name, e)| e.map(|e| format!("{p} {name}: {e}")))
        .collect()
    }
}

pub fn snapshot_report(g: &GraphSnapshot, opts: &AnalysisOptions) -> SnapshotReport {
    let nodes = node_metrics(g, opts.metrics);
    let raw = |kind| degree_distribution_of(g, kind, Binning::Raw).expect("raw binning");
    let binned: Computed<DistributionTable> = degree_distribution(g, opts.binning).into();
    let degree_fit = match binned.value() {
        Some(d) => fit_two_regime_power_law(d).map(|f| f.block()).into(),
        None => Computed::Failed {
            error: "degree distribution unavailable".into(),
        },
    };
    let kb: Vec<(f64, f64)> = nodes.iter().map(|r| (r.k as f64, r.b)).collect();
    let clustering = clustering(g, opts.metrics.low_degree_clustering);
    SnapshotReport {
        schema_version: SCHEMA_VERSION,
        period: g.period(),
        nodes: g.node_count(),
        arcs: g.arc_count(),
        edges: g.undirected().edge_count(),
        mean_degree: g.mean_degree(),
        mean_k_in: g.mean_in_degree(),
        mean_k_out: g.mean_out_degree(),
        degree_pdf: raw(DegreeKind::Undirected),
        degree_pdf_binned: binned,
        in_degree_pdf: raw(DegreeKind::In),
        out_degree_pdf: raw(DegreeKind::Out),
        degree_fit,
        in_out_fit: in_out_correlation(g).into(),
        knn_by_degree: nearest_neighbor_degree(g).map(|r| r.by_degree).into(),
        clustering_by_degree: clustering.by_degree,
        mean_clustering: clustering.mean,
        paths: shortest_path_stats(g).into(),
        reciprocity: reciprocity(g).into(),
        betweenness_scale: opts.metrics.betweenness,
        betweenness_degree_fit: fit_exponential(&kb).map(|f| f.block()).into(),
        node_table: nodes,
    }
}

fn opt_f64(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

pub fn node_table_csv(rows: &[NodeMetrics]) -> String {
    let mut out = String::from("node,k,k_in,k_out,c,b,knn\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.node,
            r.k,
            r.k_in,
            r.k_out,
            r.c,
            r.b,
            opt_f64(r.knn)
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesAnalysis {
    pub field: TrafficField,
    /// Growth fit on the deseasonalised trend for monthly data, on the raw
    /// series otherwise.
    pub growth: Computed<FitBlock>,
    pub seasonal: Option<Computed<SeasonalDecomposition>>,
    pub normalized: Option<Computed<NormalizedTraffic>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrengthSection {
    pub table: StrengthTable,
    pub passenger_fit: Computed<StrengthFit>,
    pub cargo_fit: Computed<StrengthFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrafficReport {
    pub schema_version: u32,
    pub national: Vec<SeriesAnalysis>,
    pub correlations: BTreeMap<String, Computed<LinearFit>>,
    pub strength: BTreeMap<i32, Computed<StrengthSection>>,
}

impl TrafficReport {
    pub fn errors(&self) -> Vec<String> {
        let mut out = Vec::new();
        for s in &self.national {
            let f = format!("{:?}", s.field).to_lowercase();
            if let Some(e) = s.growth.error() {
                out.push(format!("traffic {f} growth: {e}"));
            }
            if let Some(e) = s.seasonal.as_ref().and_then(Computed::error) {
                out.push(format!("traffic {f} seasonal: {e}"));
            }
            if let Some(e) = s.normalized.as_ref().and_then(Computed::error) {
                out.push(format!("traffic {f} per-link/per-node: {e}"));
            }
        }
        for (name, c) in &self.correlations {
            if let Some(e) = c.error() {
                out.push(format!("traffic correlation {name}: {e}"));
            }
        }
        for (year, s) in &self.strength {
            match s {
                Computed::Failed { error } => out.push(format!("strength {year}: {error}")),
                Computed::Value(v) => {
                    for (what, c) in [("passenger", &v.passenger_fit), ("cargo", &v.cargo_fit)] {
                        if let Some(e) = c.error() {
                            out.push(format!("strength {year} {what} fit: {e}"));
                        }
                    }
                }
            }
        }
        out
    }
}

fn analyse_series(
    series: &TrafficSeries,
    field: TrafficField,
    snapshots: &[GraphSnapshot],
) -> SeriesAnalysis {
    let ts = series.field(field);
    let (growth, seasonal) = if series.is_monthly() {
        let decomposition: Computed<SeasonalDecomposition> = seasonal_decompose(&ts).into();
        let growth = match decomposition.value() {
            Some(d) => fit_exponential_growth(&d.trend_series().time_axis())
                .map(|f| f.block())
                .into(),
            None => fit_exponential_growth(&ts.time_axis()).map(|f| f.block()).into(),
        };
        (growth, Some(decomposition))
    } else {
        (
            fit_exponential_growth(&ts.time_axis()).map(|f| f.block()).into(),
            None,
        )
    };
    let normalized = (!snapshots.is_empty() && field != TrafficField::Gdp).then(|| {
        let covered = ts_within_snapshot_years(&ts, snapshots);
        per_link_per_node_traffic(&covered, snapshots, &BTreeMap::new()).into()
    });
    SeriesAnalysis {
        field,
        growth,
        seasonal,
        normalized,
    }
}

/// Restricts a series to the years some snapshot covers; earlier traffic
/// has no topology to normalise by.
fn ts_within_snapshot_years(ts: &TimeSeries, snapshots: &[GraphSnapshot]) -> TimeSeries {
    let years: BTreeSet<i32> = snapshots.iter().map(|g| g.period().year).collect();
    TimeSeries::new(
        ts.points
            .iter()
            .filter(|(d, _)| years.contains(&d.year))
            .copied()
            .collect(),
    )
}

fn snapshot_for_year(snapshots: &[GraphSnapshot], year: i32) -> Option<&GraphSnapshot> {
    [Half::H1, Half::H2]
        .iter()
        .find_map(|&h| snapshots.iter().find(|g| g.period() == PeriodLabel::new(year, h)))
}

pub fn traffic_report(
    data: &TrafficData,
    snapshots: &[GraphSnapshot],
    merge: &MergeMap,
    opts: &AnalysisOptions,
) -> TrafficReport {
    let mut national = Vec::new();
    let mut correlations = BTreeMap::new();
    if let Some(n) = &data.national {
        let has_gdp = n.observations().iter().any(|o| o.gdp.is_some());
        for field in [TrafficField::Passengers, TrafficField::Cargo] {
            national.push(analyse_series(n, field, snapshots));
        }
        let p = n.field(TrafficField::Passengers);
        let c = n.field(TrafficField::Cargo);
        correlations.insert(
            "national cargo~passengers".into(),
            correlate_series(&p, &c).into(),
        );
        if has_gdp {
            let g = n.field(TrafficField::Gdp);
            correlations.insert("national passengers~gdp".into(), correlate_series(&g, &p).into());
            correlations.insert("national cargo~gdp".into(), correlate_series(&g, &c).into());
        }
    }
    for (id, s) in &data.airports {
        // Two points always correlate perfectly.
        if s.observations().len() >= 3 {
            let p = s.field(TrafficField::Passengers);
            let c = s.field(TrafficField::Cargo);
            correlations.insert(format!("{id} cargo~passengers"), correlate_series(&p, &c).into());
        }
    }

    let years: BTreeSet<i32> = data
        .airports
        .values()
        .flat_map(|s| s.observations().iter().map(|o| o.date.year))
        .collect();
    let mut strength = BTreeMap::new();
    for year in years {
        let Some(g) = snapshot_for_year(snapshots, year) else {
            continue;
        };
        let section = strength_table(&data.airport_year(year), merge, g).map(|table| {
            let fit = |f| strength_degree_fit(&table.records, f, opts.strength_binning).into();
            StrengthSection {
                passenger_fit: fit(StrengthField::Passenger),
                cargo_fit: fit(StrengthField::Cargo),
                table,
            }
        });
        strength.insert(year, section.into());
    }
    TrafficReport {
        schema_version: SCHEMA_VERSION,
        national,
        correlations,
        strength,
    }
}

/// Configuration of a batch run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub snapshot_dir: PathBuf,
    pub merge_map: Option<PathBuf>,
    pub strict_merge: bool,
    pub domestic: Option<PathBuf>,
    pub traffic: Option<PathBuf>,
    pub traffic_analysis: bool,
    pub output_dir: PathBuf,
    pub analysis: AnalysisOptions,
    pub format: ReportFormat,
    pub workers: usize,
    pub timestamp: bool,
    /// Config values as written, echoed into the manifest.
    pub echo: BTreeMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "snapshot_dir",
    "merge_map",
    "strict_merge",
    "domestic",
    "traffic",
    "traffic_analysis",
    "output_dir",
    "binning",
    "binning_base",
    "betweenness",
    "clustering",
    "strength_binning",
    "seasonal_model",
    "format",
    "workers",
    "timestamp",
];

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true/false, got `{v}`"))),
    }
}

/// Parses `key = value` lines; `#` starts a comment line.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

impl RunConfig {
    /// Builds a configuration from `key = value` pairs. Later pairs override
    /// earlier ones, so flag overrides are appended after the file's pairs.
    /// Relative paths resolve against `base`.
    pub fn from_pairs(base: &Path, pairs: &[(String, String)]) -> Result<Self> {
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for (k, v) in pairs {
            if !KNOWN_KEYS.contains(&k.as_str()) {
                return Err(Error::Config(format!("unknown key `{k}`")));
            }
            map.insert(k.clone(), v.clone());
        }
        let path = |key: &str| map.get(key).filter(|v| !v.is_empty()).map(|v| base.join(v));
        let snapshot_dir =
            path("snapshot_dir").ok_or_else(|| Error::Config("snapshot_dir is required".into()))?;
        let output_dir = path("output_dir").unwrap_or_else(|| base.join("report"));

        let base_value = match map.get("binning_base") {
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("binning_base: not a number `{v}`")))?,
            None => 1.5,
        };
        let binning = match map.get("binning").map(String::as_str).unwrap_or("log") {
            "log" => Binning::log(base_value).map_err(|e| Error::Config(e.to_string()))?,
            "raw" => Binning::Raw,
            other => return Err(Error::Config(format!("binning: expected log|raw, got `{other}`"))),
        };
        let betweenness = match map.get("betweenness").map(String::as_str).unwrap_or("raw") {
            "raw" => BetweennessScale::Raw,
            "normalized" => BetweennessScale::Normalized,
            other => {
                return Err(Error::Config(format!(
                    "betweenness: expected raw|normalized, got `{other}`"
                )))
            }
        };
        let low_degree_clustering = match map.get("clustering").map(String::as_str).unwrap_or("zero") {
            "zero" => LowDegreeClustering::Zero,
            "exclude" => LowDegreeClustering::Exclude,
            other => {
                return Err(Error::Config(format!(
                    "clustering: expected zero|exclude, got `{other}`"
                )))
            }
        };
        let strength_binning = match map
            .get("strength_binning")
            .map(String::as_str)
            .unwrap_or("degree_class")
        {
            "degree_class" => StrengthBinning::DegreeClass,
            "raw" => StrengthBinning::Raw,
            other => {
                return Err(Error::Config(format!(
                    "strength_binning: expected degree_class|raw, got `{other}`"
                )))
            }
        };
        match map
            .get("seasonal_model")
            .map(String::as_str)
            .unwrap_or("multiplicative")
        {
            "multiplicative" => {}
            other => {
                return Err(Error::Config(format!(
                    "seasonal_model: only `multiplicative` is supported, got `{other}`"
                )))
            }
        }
        let format = match map.get("format").map(String::as_str).unwrap_or("csv") {
            "csv" => ReportFormat::Csv,
            "json" => ReportFormat::Json,
            other => return Err(Error::Config(format!("format: expected csv|json, got `{other}`"))),
        };
        let workers = match map.get("workers") {
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("workers: not a count `{v}`")))?,
            None => 0,
        };
        let traffic = path("traffic");
        let traffic_analysis = match map.get("traffic_analysis") {
            Some(v) => parse_bool("traffic_analysis", v)?,
            None => traffic.is_some(),
        };
        Ok(RunConfig {
            snapshot_dir,
            merge_map: path("merge_map"),
            strict_merge: map
                .get("strict_merge")
                .map_or(Ok(false), |v| parse_bool("strict_merge", v))?,
            domestic: path("domestic"),
            traffic,
            traffic_analysis,
            output_dir,
            analysis: AnalysisOptions {
                binning,
                metrics: MetricOptions {
                    betweenness,
                    low_degree_clustering,
                },
                strength_binning,
            },
            format,
            workers,
            timestamp: map
                .get("timestamp")
                .map_or(Ok(true), |v| parse_bool("timestamp", v))?,
            echo: map,
        })
    }

    /// Reads a config file and applies `overrides` after it.
    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut pairs = parse_config_text(&text)?;
        pairs.extend_from_slice(overrides);
        let base = path.parent().unwrap_or(Path::new("."));
        RunConfig::from_pairs(base, &pairs)
    }

    /// Checks every referenced input before any computation starts.
    pub fn validate(&self) -> Result<()> {
        if !self.snapshot_dir.is_dir() {
            return Err(Error::Config(format!(
                "snapshot_dir {} is not a directory",
                self.snapshot_dir.display()
            )));
        }
        for (key, p) in [("merge_map", &self.merge_map), ("domestic", &self.domestic)] {
            if let Some(p) = p {
                if !p.is_file() {
                    return Err(Error::Config(format!("{key} {} does not exist", p.display())));
                }
            }
        }
        if self.traffic_analysis {
            match &self.traffic {
                None => {
                    return Err(Error::Config(
                        "traffic_analysis requested but no traffic file configured".into(),
                    ))
                }
                Some(p) if !p.is_file() => {
                    return Err(Error::Config(format!(
                        "traffic file {} does not exist",
                        p.display()
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }
}

/// Loaded inputs of a run.
pub struct Inputs {
    pub merge: MergeMap,
    pub domestic: Option<BTreeSet<AirportId>>,
    pub snapshots: Vec<GraphSnapshot>,
    pub traffic: Option<TrafficData>,
}

pub fn load_inputs(config: &RunConfig) -> Result<Inputs> {
    let merge = match &config.merge_map {
        Some(p) => read_merge_map(p)?,
        None => MergeMap::identity(),
    }
    .strict(config.strict_merge);
    let domestic = config.domestic.as_deref().map(read_domestic).transpose()?;
    let snapshots = read_snapshot_dir(&config.snapshot_dir, &merge, domestic.as_ref())?;
    let traffic = if config.traffic_analysis {
        config.traffic.as_deref().map(read_traffic).transpose()?
    } else {
        None
    };
    Ok(Inputs {
        merge,
        domestic,
        snapshots,
        traffic,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
    pub status: &'static str,
    pub config: BTreeMap<String, String>,
    pub periods: Vec<PeriodLabel>,
    pub files: Vec<String>,
    pub errors: Vec<String>,
}

/// In-memory result of a run, before anything is written.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub snapshots: Vec<SnapshotReport>,
    pub evolution: EvolutionTable,
    pub turnover: Vec<TurnoverReport>,
    pub traffic: Option<TrafficReport>,
    pub errors: Vec<String>,
}

pub fn compute_bundle(inputs: &Inputs, opts: &AnalysisOptions) -> Result<ReportBundle> {
    let snapshots: Vec<SnapshotReport> = inputs
        .snapshots
        .iter()
        .map(|g| snapshot_report(g, opts))
        .collect();
    let evolution = evolution_table(&inputs.snapshots, &opts.evolution())?;
    let turnover = inputs
        .snapshots
        .windows(2)
        .map(|w| diff_snapshots(&w[0], &w[1]))
        .collect::<Result<Vec<_>>>()?;
    let traffic = inputs
        .traffic
        .as_ref()
        .map(|t| traffic_report(t, &inputs.snapshots, &inputs.merge, opts));

    let mut errors: Vec<String> = snapshots.iter().flat_map(SnapshotReport::errors).collect();
    for row in &evolution.rows {
        errors.extend(row.notes.iter().map(|n| format!("{} evolution {n}", row.period)));
    }
    if let Some(t) = &traffic {
        errors.extend(t.errors());
    }
    Ok(ReportBundle {
        snapshots,
        evolution,
        turnover,
        traffic,
        errors,
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialise");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    inner: &'a T,
}

pub fn versioned<T: Serialize>(inner: &T) -> String {
    to_json(&Versioned {
        schema_version: SCHEMA_VERSION,
        inner,
    })
}

/// Outcome of [`run_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub output_dir: PathBuf,
    pub files: Vec<String>,
    pub errors: Vec<String>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.errors.is_empty() {
            0
        } else {
            4
        }
    }
}

fn write_file(dir: &Path, name: &str, body: &str, files: &mut Vec<String>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    files.push(name.to_string());
    Ok(())
}

/// Validates the configuration, computes every section and writes the
/// report files plus `manifest.json`. Failed sections are listed in the
/// manifest, which is then marked `partial`.
pub fn run_report(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let inputs = load_inputs(config)?;
    let bundle = crate::par::with_workers(config.workers, || compute_bundle(&inputs, &config.analysis))?;

    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();

    for s in &bundle.snapshots {
        let stem = format!("metrics_{}", s.period);
        match config.format {
            ReportFormat::Json => write_file(dir, &format!("{stem}.json"), &to_json(s), &mut files)?,
            ReportFormat::Csv => {
                write_file(
                    dir,
                    &format!("{stem}.csv"),
                    &node_table_csv(&s.node_table),
                    &mut files,
                )?;
                let mut summary = serde_json::to_value(s).expect("serialisable");
                summary.as_object_mut().expect("object").remove("node_table");
                write_file(dir, &format!("{stem}.json"), &to_json(&summary), &mut files)?;
            }
        }
    }
    match config.format {
        ReportFormat::Csv => write_file(dir, "evolution.csv", &bundle.evolution.to_csv(), &mut files)?,
        ReportFormat::Json => write_file(dir, "evolution.json", &versioned(&bundle.evolution), &mut files)?,
    }
    for t in &bundle.turnover {
        let name = format!("turnover_{}_{}.json", t.period_from, t.period_to);
        write_file(dir, &name, &versioned(t), &mut files)?;
    }
    if let Some(t) = &bundle.traffic {
        write_file(dir, "traffic.json", &to_json(t), &mut files)?;
    }

    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        generated_at: config.timestamp.then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        }),
        status: if bundle.errors.is_empty() {
            "complete"
        } else {
            "partial"
        },
        // The output location is not part of the result.
        config: config
            .echo
            .iter()
            .filter(|(k, _)| k.as_str() != "output_dir")
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect(),
        periods: inputs.snapshots.iter().map(GraphSnapshot::period).collect(),
        files: files.clone(),
        errors: bundle.errors.clone(),
    };
    write_file(dir, "manifest.json", &to_json(&manifest), &mut files)?;

    Ok(RunOutcome {
        output_dir: dir.clone(),
        files,
        errors: bundle.errors,
    })
}
