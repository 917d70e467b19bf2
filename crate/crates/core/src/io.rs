//! Readers for the on-disk formats.
//!
//! * Snapshot: CSV with header `src,dst`, one arc per line. Comment lines
//!   `# period=2009H1` set the period (otherwise taken from a file stem such
//!   as `2009H1.csv`) and `# node=XYZ` lists an airport that may have no arcs.
//! * Merge map: CSV `raw_code,city_code`.
//! * Domestic list: one code per line, `#` comments allowed.
//! * Traffic: CSV `date,scope,passengers,cargo_tonnes[,gdp]` where `date` is
//!   `YYYY` or `YYYY-MM` and `scope` is `NATIONAL` or an airport code. A
//!   `cargo_kg` column is accepted instead of `cargo_tonnes` and converted.
//! * Points: CSV `x,y` for the standalone fitter.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::{build_snapshot_with_nodes, AirportId, GraphSnapshot, MergeMap, PeriodLabel};
use crate::traffic::{AirportTraffic, Date, Observation, Scope, TrafficSeries};

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
}

fn header_names(path: &Path, rdr: &mut csv::Reader<&[u8]>) -> Result<Vec<String>> {
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(path, line_of(&e), e.to_string()))?;
    Ok(headers.iter().map(|h| h.to_ascii_lowercase()).collect())
}

fn line_of(e: &csv::Error) -> u64 {
    e.position().map_or(0, |p| p.line())
}

fn records(path: &Path, rdr: &mut csv::Reader<&[u8]>) -> Result<Vec<(u64, csv::StringRecord)>> {
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, line_of(&e), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push((line, rec));
    }
    Ok(out)
}

/// Contents of a snapshot file before merging and filtering.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSnapshot {
    pub period: PeriodLabel,
    pub arcs: Vec<(String, String)>,
    pub nodes: Vec<String>,
}

pub fn parse_snapshot_file(path: &Path) -> Result<RawSnapshot> {
    let text = read_to_string(path)?;
    let mut declared: Option<PeriodLabel> = None;
    let mut nodes = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let Some(comment) = line.trim().strip_prefix('#') else {
            continue;
        };
        let line_no = i as u64 + 1;
        if let Some((key, value)) = comment.split_once('=') {
            match key.trim() {
                "period" => {
                    let p = value
                        .trim()
                        .parse()
                        .map_err(|e: Error| Error::parse(path, line_no, e.to_string()))?;
                    declared = Some(p);
                }
                "node" => nodes.push(value.trim().to_string()),
                _ => {}
            }
        }
    }
    let from_name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .and_then(|s| s.parse::<PeriodLabel>().ok());
    let period = match (declared, from_name) {
        (Some(d), Some(f)) if d != f => {
            return Err(Error::parse(
                path,
                0,
                format!("period comment {d} disagrees with file name {f}"),
            ))
        }
        (Some(p), _) | (None, Some(p)) => p,
        (None, None) => {
            return Err(Error::parse(
                path,
                0,
                "no period: add `# period=YYYYH1` or name the file YYYYH1.csv",
            ))
        }
    };

    let mut rdr = csv_reader(&text);
    let headers = header_names(path, &mut rdr)?;
    if headers != ["src", "dst"] {
        return Err(Error::parse(
            path,
            1,
            format!("expected header `src,dst`, found `{}`", headers.join(",")),
        ));
    }
    let mut arcs = Vec::new();
    for (line, rec) in records(path, &mut rdr)? {
        if rec.len() != 2 || rec[0].is_empty() || rec[1].is_empty() {
            return Err(Error::parse(
                path,
                line,
                format!(
                    "expected `src,dst`, found `{}`",
                    rec.iter().collect::<Vec<_>>().join(",")
                ),
            ));
        }
        arcs.push((rec[0].to_string(), rec[1].to_string()));
    }
    Ok(RawSnapshot { period, arcs, nodes })
}

pub fn read_snapshot(
    path: &Path,
    merge: &MergeMap,
    domestic: Option<&BTreeSet<AirportId>>,
) -> Result<GraphSnapshot> {
    let raw = parse_snapshot_file(path)?;
    let extra = raw
        .nodes
        .iter()
        .map(|c| AirportId::new(c))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::parse(path, 0, e.to_string()))?;
    build_snapshot_with_nodes(&raw.arcs, merge, domestic, raw.period, &extra).map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(path, 0, other.to_string()),
    })
}

/// Every `*.csv` in `dir`, ordered by period.
pub fn read_snapshot_dir(
    dir: &Path,
    merge: &MergeMap,
    domestic: Option<&BTreeSet<AirportId>>,
) -> Result<Vec<GraphSnapshot>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")) {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(Error::parse(dir, 0, "directory has no snapshot files (*.csv)"));
    }
    let mut by_period: BTreeMap<PeriodLabel, GraphSnapshot> = BTreeMap::new();
    for path in paths {
        let g = read_snapshot(&path, merge, domestic)?;
        if by_period.insert(g.period(), g.clone()).is_some() {
            return Err(Error::DuplicatePeriod(g.period()));
        }
    }
    Ok(by_period.into_values().collect())
}

pub fn read_merge_map(path: &Path) -> Result<MergeMap> {
    let text = read_to_string(path)?;
    let mut rdr = csv_reader(&text);
    let headers = header_names(path, &mut rdr)?;
    if headers != ["raw_code", "city_code"] {
        return Err(Error::parse(path, 1, "expected header `raw_code,city_code`"));
    }
    let mut pairs = Vec::new();
    for (line, rec) in records(path, &mut rdr)? {
        if rec.len() != 2 || rec[0].is_empty() || rec[1].is_empty() {
            return Err(Error::parse(path, line, "expected `raw_code,city_code`"));
        }
        pairs.push((rec[0].to_string(), rec[1].to_string()));
    }
    MergeMap::new(pairs)
}

pub fn read_domestic(path: &Path) -> Result<BTreeSet<AirportId>> {
    let text = read_to_string(path)?;
    let mut set = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.contains(',') || line.contains(char::is_whitespace) {
            return Err(Error::parse(
                path,
                i as u64 + 1,
                "expected one airport code per line",
            ));
        }
        set.insert(AirportId::new(line)?);
    }
    Ok(set)
}

/// All series of a traffic file.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficData {
    pub national: Option<TrafficSeries>,
    pub airports: BTreeMap<AirportId, TrafficSeries>,
}

impl TrafficData {
    /// Per-airport totals for one year, monthly rows summed.
    pub fn airport_year(&self, year: i32) -> Vec<AirportTraffic> {
        self.airports
            .iter()
            .filter_map(|(id, s)| {
                s.annual()
                    .observations()
                    .iter()
                    .find(|o| o.date.year == year)
                    .map(|o| AirportTraffic {
                        code: id.to_string(),
                        year,
                        passengers: o.passengers,
                        cargo_tonnes: o.cargo_tonnes,
                    })
            })
            .collect()
    }
}

pub fn read_traffic(path: &Path) -> Result<TrafficData> {
    let text = read_to_string(path)?;
    let mut rdr = csv_reader(&text);
    let headers = header_names(path, &mut rdr)?;
    let cargo_scale = match headers.get(3).map(String::as_str) {
        Some("cargo_tonnes") => 1.0,
        Some("cargo_kg") => 1e-3,
        _ => {
            return Err(Error::parse(
                path,
                1,
                "expected header `date,scope,passengers,cargo_tonnes[,gdp]`",
            ))
        }
    };
    let has_gdp = match headers.len() {
        4 => false,
        5 if headers[4] == "gdp" => true,
        _ => {
            return Err(Error::parse(
                path,
                1,
                "expected header `date,scope,passengers,cargo_tonnes[,gdp]`",
            ))
        }
    };
    if headers[..3] != ["date", "scope", "passengers"] {
        return Err(Error::parse(
            path,
            1,
            "expected header `date,scope,passengers,cargo_tonnes[,gdp]`",
        ));
    }

    let mut groups: BTreeMap<Scope, BTreeMap<Date, (u64, Observation)>> = BTreeMap::new();
    for (line, rec) in records(path, &mut rdr)? {
        let err = |msg: String| Error::parse(path, line, msg);
        if rec.len() != headers.len() {
            return Err(err(format!(
                "expected {} fields, found {}",
                headers.len(),
                rec.len()
            )));
        }
        let date: Date = rec[0].parse().map_err(|e: Error| err(e.to_string()))?;
        let scope = if rec[1].eq_ignore_ascii_case("NATIONAL") {
            Scope::National
        } else {
            Scope::Airport(AirportId::new(&rec[1]).map_err(|e| err(e.to_string()))?)
        };
        let num = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| err(format!("bad {what} value `{s}`")))
        };
        let gdp = if has_gdp && !rec[4].is_empty() {
            Some(num(&rec[4], "gdp")?)
        } else {
            None
        };
        let obs = Observation {
            date,
            passengers: num(&rec[2], "passengers")?,
            cargo_tonnes: num(&rec[3], "cargo")? * cargo_scale,
            gdp,
        };
        let group = groups.entry(scope.clone()).or_default();
        if let Some((first, _)) = group.insert(date, (line, obs)) {
            return Err(err(format!(
                "duplicate {scope} row for {date} (first at line {first})"
            )));
        }
    }

    let mut national = None;
    let mut airports = BTreeMap::new();
    for (scope, rows) in groups {
        let series = TrafficSeries::new(scope.clone(), rows.into_values().map(|r| r.1).collect())
            .map_err(|e| Error::parse(path, 0, e.to_string()))?;
        match scope {
            Scope::National => national = Some(series),
            Scope::Airport(id) => {
                airports.insert(id, series);
            }
        }
    }
    Ok(TrafficData { national, airports })
}

pub fn read_points(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = read_to_string(path)?;
    let mut rdr = csv_reader(&text);
    let headers = header_names(path, &mut rdr)?;
    if headers != ["x", "y"] {
        return Err(Error::parse(path, 1, "expected header `x,y`"));
    }
    let mut pts = Vec::new();
    for (line, rec) in records(path, &mut rdr)? {
        let parse = |s: &str| s.parse::<f64>().ok().filter(|v| v.is_finite());
        match (rec.len(), rec.get(0).and_then(parse), rec.get(1).and_then(parse)) {
            (2, Some(x), Some(y)) => pts.push((x, y)),
            _ => return Err(Error::parse(path, line, "expected two numbers `x,y`")),
        }
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn snapshot_dir_sorted() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "2003H1.csv", "src,dst\nPEK,SHA\n");
        write(dir.path(), "2002H2.csv", "src,dst\nPEK,CAN\nCAN,PEK\n");
        let snaps = read_snapshot_dir(dir.path(), &MergeMap::identity(), None).unwrap();
        let periods: Vec<String> = snaps.iter().map(|g| g.period().to_string()).collect();
        assert_eq!(periods, ["2002H2", "2003H1"]);
    }

    #[test]
    fn malformed_line_reports_position() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "2003H1.csv", "src,dst\nPEK,SHA\nPEK\n");
        let err = read_snapshot(&p, &MergeMap::identity(), None).unwrap_err();
        match &err {
            Error::Parse { line, .. } => assert_eq!(*line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("2003H1.csv:3"));
    }

    #[test]
    fn duplicate_period_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "a.csv", "# period=2003H1\nsrc,dst\nPEK,SHA\n");
        write(dir.path(), "b.csv", "# period=2003H1\nsrc,dst\nPEK,CAN\n");
        assert!(matches!(
            read_snapshot_dir(dir.path(), &MergeMap::identity(), None),
            Err(Error::DuplicatePeriod(_))
        ));
    }

    #[test]
    fn period_comment_and_isolated_nodes() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "spring.csv",
            "# period=2004H1\n# node=LXA\nsrc,dst\nPEK,SHA\n",
        );
        let g = read_snapshot(&p, &MergeMap::identity(), None).unwrap();
        assert_eq!(g.period().to_string(), "2004H1");
        assert_eq!(g.node_count(), 3);

        let q = write(dir.path(), "undated.csv", "src,dst\nPEK,SHA\n");
        assert!(read_snapshot(&q, &MergeMap::identity(), None).is_err());
        let r = write(dir.path(), "2004H2.csv", "# period=2004H1\nsrc,dst\nPEK,SHA\n");
        assert!(read_snapshot(&r, &MergeMap::identity(), None).is_err());
    }

    #[test]
    fn merge_and_domestic_files() {
        let dir = tempfile::tempdir().unwrap();
        let m = write(dir.path(), "merge.csv", "raw_code,city_code\nPVG,SHA\nNAY,PEK\n");
        let d = write(dir.path(), "domestic.txt", "# cities\nPEK\nSHA\n\n");
        let merge = read_merge_map(&m).unwrap();
        assert_eq!(merge.resolve("pvg").unwrap().as_str(), "SHA");
        let dom = read_domestic(&d).unwrap();
        assert_eq!(dom.len(), 2);
        let bad = write(dir.path(), "bad.csv", "raw,city\nPVG,SHA\n");
        assert!(read_merge_map(&bad).is_err());
    }

    #[test]
    fn traffic_file_groups_and_converts() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "traffic.csv",
            "date,scope,passengers,cargo_kg,gdp\n\
             2001,NATIONAL,70,1530,10\n\
             2000,NATIONAL,60,1000,9\n\
             2001,PEK,10,500,\n",
        );
        let t = read_traffic(&p).unwrap();
        let nat = t.national.unwrap();
        assert_eq!(nat.observations().len(), 2);
        assert_eq!(nat.observations()[0].date, Date::year(2000));
        assert!((nat.observations()[1].cargo_tonnes - 1.53).abs() < 1e-12);
        assert_eq!(nat.observations()[1].gdp, Some(10.0));
        assert_eq!(t.airports.len(), 1);
        let pek = &t.airports[&AirportId::new("PEK").unwrap()];
        assert_eq!(pek.observations()[0].gdp, None);
    }

    #[test]
    fn traffic_errors_carry_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "t.csv",
            "date,scope,passengers,cargo_tonnes\n2001,NATIONAL,70,1\n2002,NATIONAL,-3,1\n",
        );
        assert!(matches!(read_traffic(&p), Err(Error::Parse { line: 3, .. })));
        let q = write(
            dir.path(),
            "d.csv",
            "date,scope,passengers,cargo_tonnes\n2001,NATIONAL,70,1\n2001,NATIONAL,71,1\n",
        );
        assert!(matches!(read_traffic(&q), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn points_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "p.csv", "x,y\n1,2\n3,4.5\n");
        assert_eq!(read_points(&p).unwrap(), vec![(1.0, 2.0), (3.0, 4.5)]);
        let q = write(dir.path(), "q.csv", "x,y\n1,abc\n");
        assert!(matches!(read_points(&q), Err(Error::Parse { line: 2, .. })));
    }
}
