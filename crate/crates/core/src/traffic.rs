//! Traffic-flow analytics: airport strength versus degree, growth and
//! seasonality of national series, and correlations between series.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::{fit_linear, fit_power, LinearFit, PowerFit};
use crate::graph::{AirportId, GraphSnapshot, Half, MergeMap, PeriodLabel};
use crate::metrics::DistributionTable;

/// A year, or a calendar month of a year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Date {
    pub year: i32,
    pub month: Option<u8>,
}

impl Date {
    pub fn year(year: i32) -> Self {
        Date { year, month: None }
    }

    pub fn month(year: i32, month: u8) -> Self {
        assert!((1..=12).contains(&month), "month out of range: {month}");
        Date {
            year,
            month: Some(month),
        }
    }

    fn ordinal(&self) -> i64 {
        match self.month {
            Some(m) => self.year as i64 * 12 + (m as i64 - 1),
            None => self.year as i64,
        }
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.month {
            Some(m) => write!(f, "{:04}-{:02}", self.year, m),
            None => write!(f, "{:04}", self.year),
        }
    }
}

impl FromStr for Date {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSeries(format!("bad date `{s}` (expected YYYY or YYYY-MM)"));
        let s = s.trim();
        let (y, m) = match s.split_once('-') {
            Some((y, m)) => (y, Some(m)),
            None => (s, None),
        };
        if y.len() != 4 || !y.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let year = y.parse().map_err(|_| bad())?;
        match m {
            None => Ok(Date::year(year)),
            Some(m) => {
                let m: u8 = m.parse().map_err(|_| bad())?;
                if !(1..=12).contains(&m) {
                    return Err(bad());
                }
                Ok(Date::month(year, m))
            }
        }
    }
}

impl TryFrom<String> for Date {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Date> for String {
    fn from(d: Date) -> String {
        d.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Scope {
    National,
    Airport(AirportId),
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::National => f.write_str("NATIONAL"),
            Scope::Airport(id) => write!(f, "{id}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observation {
    pub date: Date,
    pub passengers: f64,
    pub cargo_tonnes: f64,
    pub gdp: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrafficField {
    Passengers,
    Cargo,
    Gdp,
}

/// Dated passenger/cargo/GDP observations for the whole network or one airport.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrafficSeries {
    pub scope: Scope,
    observations: Vec<Observation>,
}

impl TrafficSeries {
    /// Validates strictly increasing dates of one granularity and
    /// non-negative values.
    pub fn new(scope: Scope, observations: Vec<Observation>) -> Result<Self> {
        for w in observations.windows(2) {
            if w[0].date >= w[1].date {
                return Err(Error::InvalidSeries(format!(
                    "{scope}: dates not strictly increasing at {}",
                    w[1].date
                )));
            }
            if w[0].date.month.is_some() != w[1].date.month.is_some() {
                return Err(Error::InvalidSeries(format!(
                    "{scope}: mixed annual and monthly dates at {}",
                    w[1].date
                )));
            }
        }
        for o in &observations {
            let values = [Some(o.passengers), Some(o.cargo_tonnes), o.gdp];
            if values.iter().flatten().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::InvalidSeries(format!(
                    "{scope}: negative or non-finite value at {}",
                    o.date
                )));
            }
        }
        Ok(TrafficSeries { scope, observations })
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn is_monthly(&self) -> bool {
        self.observations.first().is_some_and(|o| o.date.month.is_some())
    }

    /// One field as a plain series; observations without a GDP value are
    /// skipped for [`TrafficField::Gdp`].
    pub fn field(&self, field: TrafficField) -> TimeSeries {
        TimeSeries {
            points: self
                .observations
                .iter()
                .filter_map(|o| {
                    let v = match field {
                        TrafficField::Passengers => Some(o.passengers),
                        TrafficField::Cargo => Some(o.cargo_tonnes),
                        TrafficField::Gdp => o.gdp,
                    };
                    v.map(|v| (o.date, v))
                })
                .collect(),
        }
    }

    /// Annual totals (monthly observations summed per year).
    pub fn annual(&self) -> TrafficSeries {
        if !self.is_monthly() {
            return self.clone();
        }
        let mut years: BTreeMap<i32, Observation> = BTreeMap::new();
        for o in &self.observations {
            let e = years.entry(o.date.year).or_insert(Observation {
                date: Date::year(o.date.year),
                passengers: 0.0,
                cargo_tonnes: 0.0,
                gdp: None,
            });
            e.passengers += o.passengers;
            e.cargo_tonnes += o.cargo_tonnes;
            if let Some(g) = o.gdp {
                *e.gdp.get_or_insert(0.0) += g;
            }
        }
        TrafficSeries {
            scope: self.scope.clone(),
            observations: years.into_values().collect(),
        }
    }
}

/// A dated single-valued series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    pub points: Vec<(Date, f64)>,
}

impl TimeSeries {
    pub fn new(points: Vec<(Date, f64)>) -> Self {
        TimeSeries { points }
    }

    /// `(t, value)` with `t` counted in the series' own unit (months or
    /// years) from the first date.
    pub fn time_axis(&self) -> Vec<(f64, f64)> {
        let Some(first) = self.points.first() else {
            return Vec::new();
        };
        let origin = first.0.ordinal();
        self.points
            .iter()
            .map(|(d, v)| ((d.ordinal() - origin) as f64, *v))
            .collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }
}

/// Traffic for one airport in one year, keyed by raw or canonical code.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AirportTraffic {
    pub code: String,
    pub year: i32,
    pub passengers: f64,
    pub cargo_tonnes: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrengthRecord {
    pub node: AirportId,
    pub s_passenger: f64,
    pub s_cargo: f64,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrengthTable {
    pub period: PeriodLabel,
    pub records: Vec<StrengthRecord>,
    pub passenger_ccdf: DistributionTable,
    pub cargo_ccdf: DistributionTable,
}

/// Joins annual airport throughput to the degrees of a snapshot of the same
/// year. Airports of one city are summed after merge-map resolution.
pub fn strength_table(
    traffic: &[AirportTraffic],
    merge: &MergeMap,
    g: &GraphSnapshot,
) -> Result<StrengthTable> {
    let mut sums: BTreeMap<AirportId, (f64, f64)> = BTreeMap::new();
    let mut unknown = BTreeSet::new();
    for t in traffic {
        if t.year != g.period().year {
            return Err(Error::YearMismatch {
                traffic_year: t.year,
                period: g.period(),
            });
        }
        let id = merge.resolve(&t.code)?;
        if !g.contains(&id) {
            unknown.insert(id.to_string());
            continue;
        }
        let e = sums.entry(id).or_default();
        e.0 += t.passengers;
        e.1 += t.cargo_tonnes;
    }
    if !unknown.is_empty() {
        return Err(Error::Join {
            period: g.period(),
            codes: unknown.into_iter().collect(),
        });
    }
    let und = g.undirected();
    let records: Vec<StrengthRecord> = sums
        .into_iter()
        .map(|(node, (p, c))| {
            let k = und.degree(g.index_of(&node).expect("joined above"));
            StrengthRecord {
                node,
                s_passenger: p,
                s_cargo: c,
                k,
            }
        })
        .collect();
    let passengers: Vec<f64> = records.iter().map(|r| r.s_passenger).collect();
    let cargo: Vec<f64> = records.iter().map(|r| r.s_cargo).collect();
    Ok(StrengthTable {
        period: g.period(),
        passenger_ccdf: DistributionTable::ccdf(&passengers),
        cargo_ccdf: DistributionTable::ccdf(&cargo),
        records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrengthField {
    Passenger,
    Cargo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrengthBinning {
    /// Mean strength per degree class.
    #[default]
    DegreeClass,
    /// One point per airport.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrengthFit {
    pub fit: PowerFit,
    /// Records dropped for zero degree or zero strength.
    pub excluded: usize,
}

/// Power-law fit of strength against degree, `s ∝ k^β`.
pub fn strength_degree_fit(
    records: &[StrengthRecord],
    field: StrengthField,
    binning: StrengthBinning,
) -> Result<StrengthFit> {
    let usable: Vec<(f64, f64)> = records
        .iter()
        .map(|r| {
            let s = match field {
                StrengthField::Passenger => r.s_passenger,
                StrengthField::Cargo => r.s_cargo,
            };
            (r.k as f64, s)
        })
        .filter(|&(k, s)| k > 0.0 && s > 0.0)
        .collect();
    let excluded = records.len() - usable.len();
    if usable.is_empty() {
        return Err(Error::InsufficientData { needed: 3, got: 0 });
    }
    let points = match binning {
        StrengthBinning::Raw => usable,
        StrengthBinning::DegreeClass => {
            let mut classes: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
            for (k, s) in usable {
                let e = classes.entry(k as u64).or_default();
                e.0 += s;
                e.1 += 1;
            }
            classes
                .into_iter()
                .map(|(k, (sum, n))| (k as f64, sum / n as f64))
                .collect()
        }
    };
    Ok(StrengthFit {
        fit: fit_power(&points)?,
        excluded,
    })
}

/// Multiplicative decomposition `observation = trend × index × residual`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeasonalDecomposition {
    pub dates: Vec<Date>,
    /// Centred 2×12 moving average; `None` within six months of either end.
    pub trend: Vec<Option<f64>>,
    /// Seasonal index per calendar month, January first; mean 1.
    pub indices: [f64; 12],
    /// `observation / (trend × index)`; the six months at either end use the
    /// trend continued log-linearly.
    pub residuals: Vec<f64>,
    /// Months whose log residual lies more than 3 MAD from the median.
    pub outliers: Vec<Date>,
}

impl SeasonalDecomposition {
    pub fn trend_series(&self) -> TimeSeries {
        TimeSeries::new(
            self.dates
                .iter()
                .zip(&self.trend)
                .filter_map(|(d, t)| t.map(|t| (*d, t)))
                .collect(),
        )
    }
}

const OUTLIER_MADS: f64 = 3.0;
const MAD_FLOOR: f64 = 1e-9;
const ROBUST_PASSES: usize = 10;

fn centered_moving_average(values: &[f64]) -> Vec<Option<f64>> {
    let n = values.len();
    (0..n)
        .map(|t| {
            (t >= 6 && t + 6 < n).then(|| {
                let inner: f64 = values[t - 5..=t + 5].iter().sum();
                (inner + 0.5 * (values[t - 6] + values[t + 6])) / 12.0
            })
        })
        .collect()
}

/// Mean ratio to trend per calendar month, normalised to mean 1. Months in
/// `skip` are left out; a month with every observation skipped falls back to
/// the median of all its ratios.
fn seasonal_indices(values: &[f64], trend: &[Option<f64>], months: &[usize], skip: &[usize]) -> [f64; 12] {
    let mut kept: [Vec<f64>; 12] = Default::default();
    let mut all: [Vec<f64>; 12] = Default::default();
    for (i, ((v, t), &m)) in values.iter().zip(trend).zip(months).enumerate() {
        if let Some(t) = t {
            all[m].push(v / t);
            if !skip.contains(&i) {
                kept[m].push(v / t);
            }
        }
    }
    let mut raw = [0.0; 12];
    for m in 0..12 {
        raw[m] = if kept[m].is_empty() {
            median(&mut all[m])
        } else {
            kept[m].iter().sum::<f64>() / kept[m].len() as f64
        };
    }
    let mean = raw.iter().sum::<f64>() / 12.0;
    raw.map(|r| r / mean)
}

/// The centred trend, continued log-linearly over the six months at either
/// end from the twelve nearest centred values.
fn extended_trend(trend: &[Option<f64>]) -> Vec<f64> {
    let defined: Vec<usize> = (0..trend.len()).filter(|&i| trend[i].is_some()).collect();
    let line = |idx: &[usize]| {
        let pts: Vec<(f64, f64)> = idx.iter().map(|&i| (i as f64, trend[i].unwrap().ln())).collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        move |t: f64| (my + slope * (t - mx)).exp()
    };
    let span = defined.len().min(12);
    let head = line(&defined[..span]);
    let tail = line(&defined[defined.len() - span..]);
    let (first, last) = (defined[0], defined[defined.len() - 1]);
    (0..trend.len())
        .map(|i| match trend[i] {
            Some(t) => t,
            None if i < first => head(i as f64),
            None => {
                debug_assert!(i > last);
                tail(i as f64)
            }
        })
        .collect()
}

/// Replaces the `flagged` observations by log-linear interpolation of the
/// deseasonalised values of their nearest unflagged neighbours. Before the
/// first or after the last unflagged month, a least-squares line through the
/// nearest year of unflagged months is extended instead; two points alone
/// extrapolate noise.
fn interpolate_flagged(
    observed: &[f64],
    months: &[usize],
    indices: &[f64; 12],
    flagged: &[usize],
) -> Vec<f64> {
    let adjusted: Vec<f64> = observed
        .iter()
        .zip(months)
        .map(|(v, &m)| (v / indices[m]).ln())
        .collect();
    let good: Vec<usize> = (0..observed.len()).filter(|i| !flagged.contains(i)).collect();
    if good.len() < 2 {
        return observed.to_vec();
    }
    let line = |idx: &[usize]| {
        let n = idx.len() as f64;
        let mx = idx.iter().map(|&i| i as f64).sum::<f64>() / n;
        let my = idx.iter().map(|&i| adjusted[i]).sum::<f64>() / n;
        let sxy: f64 = idx.iter().map(|&i| (i as f64 - mx) * (adjusted[i] - my)).sum();
        let sxx: f64 = idx.iter().map(|&i| (i as f64 - mx).powi(2)).sum();
        move |t: usize| my + sxy / sxx * (t as f64 - mx)
    };
    let span = good.len().min(12);
    let head = line(&good[..span]);
    let tail = line(&good[good.len() - span..]);
    let mut out = observed.to_vec();
    for &i in flagged {
        let after = good.partition_point(|&g| g < i);
        let log_value = match (after.checked_sub(1).map(|k| good[k]), good.get(after)) {
            (Some(a), Some(&b)) => {
                let w = (i - a) as f64 / (b - a) as f64;
                adjusted[a] + w * (adjusted[b] - adjusted[a])
            }
            (None, _) => head(i),
            (_, None) => tail(i),
        };
        out[i] = log_value.exp() * indices[months[i]];
    }
    out
}

/// Median ratio to trend per calendar month, normalised to mean 1.
fn median_indices(values: &[f64], trend: &[Option<f64>], months: &[usize]) -> [f64; 12] {
    let mut ratios: [Vec<f64>; 12] = Default::default();
    for ((v, t), &m) in values.iter().zip(trend).zip(months) {
        if let Some(t) = t {
            ratios[m].push(v / t);
        }
    }
    let raw = ratios.map(|mut r| median(&mut r));
    let mean = raw.iter().sum::<f64>() / 12.0;
    raw.map(|r| r / mean)
}

/// Median of the 13-month window centred on each month, defined where the
/// window fits.
fn running_median(values: &[f64]) -> Vec<Option<f64>> {
    let n = values.len();
    (0..n)
        .map(|t| (t >= 6 && t + 6 < n).then(|| median(&mut values[t - 6..=t + 6].to_vec())))
        .collect()
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn flag_outliers(residuals: &[f64]) -> Vec<usize> {
    let logs: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    let med = median(&mut logs.clone());
    let mut dev: Vec<f64> = logs.iter().map(|l| (l - med).abs()).collect();
    flag_beyond(&logs, med, median(&mut dev))
}

fn flag_beyond(logs: &[f64], centre: f64, mad: f64) -> Vec<usize> {
    let mad = mad.max(MAD_FLOOR);
    (0..logs.len())
        .filter(|&i| (logs[i] - centre).abs() > OUTLIER_MADS * mad)
        .collect()
}

/// Residual MAD implied by the month-to-month changes of the adjusted series.
/// Residuals against a running median are exactly 1 wherever the median
/// picked that month, so their own MAD understates the noise.
fn difference_mad(adjusted: &[f64]) -> f64 {
    let mut steps: Vec<f64> = adjusted.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    let centre = median(&mut steps.clone());
    let mut dev: Vec<f64> = steps.iter_mut().map(|d| (*d - centre).abs()).collect();
    median(&mut dev) / std::f64::consts::SQRT_2
}

/// Multiplicative seasonal decomposition of a contiguous monthly series.
///
/// Flagged months are replaced by an interpolation of their neighbours and
/// the trend and indices re-estimated, so a single deep dip neither drags the
/// trend down nor pushes its neighbours over the threshold. Outliers are those
/// of the final fit. Residuals are always taken against the original
/// observations.
pub fn seasonal_decompose(series: &TimeSeries) -> Result<SeasonalDecomposition> {
    let n = series.points.len();
    if n < 24 {
        return Err(Error::InsufficientData { needed: 24, got: n });
    }
    let mut months = Vec::with_capacity(n);
    for (i, (d, v)) in series.points.iter().enumerate() {
        let Some(m) = d.month else {
            return Err(Error::InvalidSeries(format!(
                "seasonal decomposition needs monthly dates, got {d}"
            )));
        };
        if i > 0 && d.ordinal() != series.points[i - 1].0.ordinal() + 1 {
            return Err(Error::InvalidSeries(format!("gap in monthly series before {d}")));
        }
        if !(*v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("non-positive observation at {d}")));
        }
        months.push(m as usize - 1);
    }
    let observed = series.values();

    let residuals_for = |trend: &[f64], indices: &[f64; 12]| -> Vec<f64> {
        observed
            .iter()
            .zip(trend)
            .zip(&months)
            .map(|((v, t), &m)| v / (t * indices[m]))
            .collect()
    };

    // First pass uses medians throughout. A moving average would spread one
    // extreme month over the whole year around it and flag its neighbours.
    // The rough running median of the raw series only seeds the indices; the
    // second one runs on the seasonally adjusted series.
    let rough = median_indices(&observed, &running_median(&observed), &months);
    let adjusted: Vec<f64> = observed.iter().zip(&months).map(|(v, &m)| v / rough[m]).collect();
    let mut trend = running_median(&adjusted);
    let mut indices = median_indices(&observed, &trend, &months);
    let mut residuals = residuals_for(&extended_trend(&trend), &indices);
    let logs: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    let adjusted: Vec<f64> = observed
        .iter()
        .zip(&months)
        .map(|(v, &m)| v / indices[m])
        .collect();
    let mut flagged = flag_beyond(&logs, median(&mut logs.clone()), difference_mad(&adjusted));

    // Later passes rebuild the trend with flagged months replaced by an
    // interpolation of their unflagged neighbours and leave them out of their
    // month's index. Replacements come from observations only, so a
    // contaminated trend cannot feed back into them.
    let mut used: Vec<usize> = Vec::new();
    for _ in 0..ROBUST_PASSES {
        if flagged == used {
            break;
        }
        used = flagged.clone();
        let cleaned = interpolate_flagged(&observed, &months, &indices, &used);
        trend = centered_moving_average(&cleaned);
        indices = seasonal_indices(&observed, &trend, &months, &used);
        residuals = residuals_for(&extended_trend(&trend), &indices);
        flagged = flag_outliers(&residuals);
    }

    Ok(SeasonalDecomposition {
        dates: series.points.iter().map(|p| p.0).collect(),
        trend,
        indices,
        residuals,
        outliers: flagged.into_iter().map(|i| series.points[i].0).collect(),
    })
}

/// OLS of `b` on `a` over the dates both series share.
pub fn correlate_series(a: &TimeSeries, b: &TimeSeries) -> Result<LinearFit> {
    let lookup: BTreeMap<Date, f64> = b.points.iter().copied().collect();
    let points: Vec<(f64, f64)> = a
        .points
        .iter()
        .filter_map(|(d, x)| lookup.get(d).map(|y| (*x, *y)))
        .collect();
    if points.is_empty() {
        return Err(Error::Alignment);
    }
    fit_linear(&points)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedTraffic {
    pub per_link: TimeSeries,
    pub per_node: TimeSeries,
    /// Snapshot used for each date.
    pub periods: Vec<(Date, PeriodLabel)>,
}

/// Divides traffic by the edge and node counts of the snapshot matched to
/// each date.
///
/// Explicit `overrides` win. Otherwise a monthly date maps to its own
/// half-year and an annual date to the first half of its year, falling back
/// to the second half.
pub fn per_link_per_node_traffic(
    series: &TimeSeries,
    snapshots: &[GraphSnapshot],
    overrides: &BTreeMap<Date, PeriodLabel>,
) -> Result<NormalizedTraffic> {
    let by_period: BTreeMap<PeriodLabel, &GraphSnapshot> =
        snapshots.iter().map(|g| (g.period(), g)).collect();
    let find = |d: &Date| -> Option<&GraphSnapshot> {
        if let Some(p) = overrides.get(d) {
            return by_period.get(p).copied();
        }
        let halves: &[Half] = match d.month {
            Some(m) if m <= 6 => &[Half::H1],
            Some(_) => &[Half::H2],
            None => &[Half::H1, Half::H2],
        };
        halves
            .iter()
            .find_map(|&h| by_period.get(&PeriodLabel::new(d.year, h)).copied())
    };
    let mut per_link = Vec::new();
    let mut per_node = Vec::new();
    let mut periods = Vec::new();
    for (d, v) in &series.points {
        let g = find(d).ok_or_else(|| Error::MissingSnapshot(d.to_string()))?;
        let edges = g.undirected().edge_count();
        if edges == 0 {
            return Err(Error::Degenerate(format!("snapshot {} has no links", g.period())));
        }
        per_link.push((*d, v / edges as f64));
        per_node.push((*d, v / g.node_count() as f64));
        periods.push((*d, g.period()));
    }
    Ok(NormalizedTraffic {
        per_link: TimeSeries::new(per_link),
        per_node: TimeSeries::new(per_node),
        periods,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> AirportId {
        AirportId::new(s).unwrap()
    }

    fn monthly(values: &[f64], start_year: i32) -> TimeSeries {
        TimeSeries::new(
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (Date::month(start_year + (i / 12) as i32, (i % 12) as u8 + 1), v))
                .collect(),
        )
    }

    fn annual(values: &[f64], start_year: i32) -> TimeSeries {
        TimeSeries::new(
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (Date::year(start_year + i as i32), v))
                .collect(),
        )
    }

    fn snapshot(period: &str, n_nodes: usize, edges: &[(usize, usize)]) -> GraphSnapshot {
        let name = |i: usize| id(&format!("N{i:03}"));
        GraphSnapshot::new(
            period.parse().unwrap(),
            (0..n_nodes).map(name),
            edges.iter().map(|&(a, b)| (name(a), name(b))),
        )
        .unwrap()
    }

    #[test]
    fn date_parse_roundtrip() {
        assert_eq!("2008".parse::<Date>().unwrap(), Date::year(2008));
        assert_eq!("2008-03".parse::<Date>().unwrap(), Date::month(2008, 3));
        assert_eq!(Date::month(2008, 3).to_string(), "2008-03");
        assert!("2008-13".parse::<Date>().is_err());
        assert!("08".parse::<Date>().is_err());
    }

    #[test]
    fn series_validation() {
        let obs = |y| Observation {
            date: Date::year(y),
            passengers: 1.0,
            cargo_tonnes: 1.0,
            gdp: None,
        };
        assert!(TrafficSeries::new(Scope::National, vec![obs(2001), obs(2001)]).is_err());
        let mut neg = obs(2002);
        neg.cargo_tonnes = -1.0;
        assert!(TrafficSeries::new(Scope::National, vec![obs(2001), neg]).is_err());
        assert!(TrafficSeries::new(Scope::National, vec![obs(2001), obs(2002)]).is_ok());
    }

    #[test]
    fn strength_single_zero_airport() {
        let g = snapshot("2008H1", 2, &[(0, 1)]);
        let t = vec![AirportTraffic {
            code: "N000".into(),
            year: 2008,
            passengers: 0.0,
            cargo_tonnes: 0.0,
        }];
        let table = strength_table(&t, &MergeMap::identity(), &g).unwrap();
        let e: Vec<(f64, f64)> = table.passenger_ccdf.entries.iter().map(|e| (e.x, e.p)).collect();
        assert_eq!(e, vec![(0.0, 1.0)]);
    }

    #[test]
    fn strength_three_airports_ccdf() {
        let g = snapshot("2008H1", 3, &[(0, 1), (1, 2)]);
        let t: Vec<AirportTraffic> = [1.0, 10.0, 100.0]
            .iter()
            .enumerate()
            .map(|(i, &s)| AirportTraffic {
                code: format!("N{i:03}"),
                year: 2008,
                passengers: s,
                cargo_tonnes: s,
            })
            .collect();
        let table = strength_table(&t, &MergeMap::identity(), &g).unwrap();
        let ccdf = &table.passenger_ccdf.entries;
        assert_eq!(ccdf[0].p, 1.0);
        assert_eq!(ccdf.first().unwrap().x, 1.0);
        assert_eq!(ccdf.last().unwrap().x, 100.0);
        assert!(ccdf.windows(2).all(|w| w[0].p >= w[1].p));
    }

    #[test]
    fn strength_join_and_year_errors() {
        let g = snapshot("2008H1", 2, &[(0, 1)]);
        let rec = |code: &str, year| AirportTraffic {
            code: code.into(),
            year,
            passengers: 1.0,
            cargo_tonnes: 1.0,
        };
        let err =
            strength_table(&[rec("XXX", 2008), rec("YYY", 2008)], &MergeMap::identity(), &g).unwrap_err();
        assert!(matches!(&err, Error::Join { codes, .. } if codes == &["XXX", "YYY"]));
        assert!(matches!(
            strength_table(&[rec("N000", 2007)], &MergeMap::identity(), &g),
            Err(Error::YearMismatch { .. })
        ));
    }

    #[test]
    fn strength_merges_city_airports() {
        let g = snapshot("2008H1", 2, &[(0, 1)]);
        let merge = MergeMap::new([("PVG", "N000"), ("SHA", "N000")]).unwrap();
        let rec = |code: &str| AirportTraffic {
            code: code.into(),
            year: 2008,
            passengers: 5.0,
            cargo_tonnes: 1.0,
        };
        let table = strength_table(&[rec("PVG"), rec("sha")], &merge, &g).unwrap();
        assert_eq!(table.records.len(), 1);
        assert_eq!(table.records[0].s_passenger, 10.0);
    }

    #[test]
    fn strength_fit_exact_square() {
        let records: Vec<StrengthRecord> = (1..=30)
            .map(|k| StrengthRecord {
                node: id(&format!("A{k}")),
                s_passenger: (k * k) as f64,
                s_cargo: 5.0 * (k as f64).powf(2.79),
                k,
            })
            .collect();
        let p =
            strength_degree_fit(&records, StrengthField::Passenger, StrengthBinning::DegreeClass).unwrap();
        assert!((p.fit.exponent - 2.0).abs() < 1e-9);
        let c = strength_degree_fit(&records, StrengthField::Cargo, StrengthBinning::Raw).unwrap();
        assert!((c.fit.exponent - 2.79).abs() < 1e-9);
        assert!((c.fit.prefactor - 5.0).abs() < 1e-9);
    }

    #[test]
    fn strength_fit_exclusions() {
        let records = vec![
            StrengthRecord {
                node: id("A"),
                s_passenger: 0.0,
                s_cargo: 1.0,
                k: 3,
            },
            StrengthRecord {
                node: id("B"),
                s_passenger: 4.0,
                s_cargo: 1.0,
                k: 0,
            },
        ];
        assert!(matches!(
            strength_degree_fit(&records, StrengthField::Passenger, StrengthBinning::Raw),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn seasonal_constant_series() {
        let s = monthly(&[50.0; 36], 2000);
        let d = seasonal_decompose(&s).unwrap();
        assert!(d.indices.iter().all(|&i| (i - 1.0).abs() < 1e-12));
        assert!(d.trend.iter().flatten().all(|&t| (t - 50.0).abs() < 1e-9));
        assert!(d.outliers.is_empty());
    }

    #[test]
    fn seasonal_rejects_short_or_annual() {
        assert!(matches!(
            seasonal_decompose(&monthly(&[1.0; 23], 2000)),
            Err(Error::InsufficientData { needed: 24, got: 23 })
        ));
        assert!(seasonal_decompose(&annual(&[1.0; 30], 1950)).is_err());
    }

    #[test]
    fn seasonal_reconstructs_observations() {
        let values: Vec<f64> = (0..48)
            .map(|t| 100.0 * (0.02 * t as f64).exp() * (1.0 + 0.2 * ((t % 12) as f64 - 5.5) / 5.5))
            .collect();
        let d = seasonal_decompose(&monthly(&values, 2000)).unwrap();
        let mean = d.indices.iter().sum::<f64>() / 12.0;
        assert!((mean - 1.0).abs() < 1e-9);
        for (t, v) in values.iter().enumerate() {
            let r = d.residuals[t];
            if let Some(tr) = d.trend[t] {
                let rebuilt = tr * d.indices[t % 12] * r;
                assert!((rebuilt - v).abs() <= 1e-9 * v);
                assert!(r > 0.0);
            }
        }
    }

    #[test]
    fn correlate_examples() {
        let a = annual(&[1.0, 2.0, 5.0, 9.0], 2001);
        let b = TimeSeries::new(a.points.iter().map(|(d, v)| (*d, 0.045 * v)).collect());
        let f = correlate_series(&a, &b).unwrap();
        assert!((f.slope - 0.045).abs() < 1e-12);
        assert!((f.pearson_r - 1.0).abs() < 1e-12);

        let same = correlate_series(&a, &a).unwrap();
        assert!((same.slope - 1.0).abs() < 1e-12 && same.intercept.abs() < 1e-12);

        let disjoint = annual(&[1.0, 2.0], 1990);
        assert!(matches!(correlate_series(&a, &disjoint), Err(Error::Alignment)));
    }

    #[test]
    fn per_link_per_node_examples() {
        let edges: Vec<(usize, usize)> = (0..10)
            .flat_map(|i| [(i, (i + 1) % 10), (i, (i + 3) % 10)])
            .collect();
        let g = snapshot("2005H1", 10, &edges);
        assert_eq!(g.undirected().edge_count(), 20);
        let series = annual(&[1000.0], 2005);
        let r = per_link_per_node_traffic(&series, std::slice::from_ref(&g), &BTreeMap::new()).unwrap();
        assert_eq!(r.per_node.points[0].1, 100.0);
        assert_eq!(r.per_link.points[0].1, 50.0);

        let zero = annual(&[0.0], 2005);
        let r = per_link_per_node_traffic(&zero, std::slice::from_ref(&g), &BTreeMap::new()).unwrap();
        assert_eq!(r.per_node.points[0].1, 0.0);

        let missing = annual(&[1.0], 1999);
        assert!(matches!(
            per_link_per_node_traffic(&missing, std::slice::from_ref(&g), &BTreeMap::new()),
            Err(Error::MissingSnapshot(_))
        ));

        let mut overrides = BTreeMap::new();
        overrides.insert(Date::year(1999), g.period());
        assert!(per_link_per_node_traffic(&missing, &[g], &overrides).is_ok());
    }

    #[test]
    fn per_node_growth_with_fixed_topology() {
        // Traffic triples over 17 years on an unchanged network.
        let g = snapshot("2002H2", 10, &[(0, 1), (1, 2), (2, 3)]);
        let years: Vec<f64> = (0..=17).map(|t| 3f64.powf(t as f64 / 17.0)).collect();
        let series = annual(&years, 1991);
        let mut overrides = BTreeMap::new();
        for (d, _) in &series.points {
            overrides.insert(*d, g.period());
        }
        let r = per_link_per_node_traffic(&series, &[g], &overrides).unwrap();
        let first = r.per_node.points[0].1;
        let last = r.per_node.points.last().unwrap().1;
        assert!(((last / first - 1.0) * 100.0 - 200.0).abs() < 1e-9);
    }

    #[test]
    fn time_axis_units() {
        let m = monthly(&[1.0, 2.0, 3.0], 2001);
        assert_eq!(m.time_axis()[2].0, 2.0);
        let a = annual(&[1.0, 2.0], 1991);
        assert_eq!(a.time_axis()[1].0, 1.0);
    }
}
