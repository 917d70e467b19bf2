//! Cross-snapshot accounting: airport and route turnover between consecutive
//! periods, and the per-period table of headline statistics.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fitting::fit_two_regime_power_law;
use crate::graph::{AirportId, GraphSnapshot, PeriodLabel};
use crate::metrics::{
    clustering, degree_distribution, reciprocity, shortest_path_stats, Binning, MetricOptions,
};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ArcList {
    pub count: usize,
    pub arcs: Vec<(AirportId, AirportId)>,
}

impl ArcList {
    fn push(&mut self, arc: (AirportId, AirportId)) {
        self.count += 1;
        self.arcs.push(arc);
    }
}

/// Route changes between two periods.
///
/// Added arcs are split by whether their endpoints are old (present in both
/// periods) or new; deleted arcs by whether their endpoints persist or were
/// removed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TurnoverReport {
    pub period_from: PeriodLabel,
    pub period_to: PeriodLabel,
    pub nodes_added: Vec<AirportId>,
    pub nodes_removed: Vec<AirportId>,
    #[serde(rename = "aOO")]
    pub added_old_old: ArcList,
    #[serde(rename = "aON")]
    pub added_old_new: ArcList,
    #[serde(rename = "aNN")]
    pub added_new_new: ArcList,
    #[serde(rename = "dOO")]
    pub deleted_old_old: ArcList,
    #[serde(rename = "dOR")]
    pub deleted_old_removed: ArcList,
    #[serde(rename = "dRR")]
    pub deleted_removed_removed: ArcList,
    /// Arc count of the earlier snapshot, the base of `pct_changed`.
    pub base_arcs: usize,
    /// `(added + deleted) / base_arcs × 100`; `None` when the base is empty.
    pub pct_changed: Option<f64>,
}

impl TurnoverReport {
    pub fn added_total(&self) -> usize {
        self.added_old_old.count + self.added_old_new.count + self.added_new_new.count
    }

    pub fn deleted_total(&self) -> usize {
        self.deleted_old_old.count + self.deleted_old_removed.count + self.deleted_removed_removed.count
    }

    pub fn is_zero(&self) -> bool {
        self.nodes_added.is_empty()
            && self.nodes_removed.is_empty()
            && self.added_total() == 0
            && self.deleted_total() == 0
    }
}

pub fn diff_snapshots(earlier: &GraphSnapshot, later: &GraphSnapshot) -> Result<TurnoverReport> {
    if earlier.period() >= later.period() {
        return Err(Error::PeriodOrder {
            from: earlier.period(),
            to: later.period(),
        });
    }
    Ok(diff_sets(
        earlier.period(),
        later.period(),
        &earlier.node_set(),
        &later.node_set(),
        &earlier.arc_set(),
        &later.arc_set(),
    ))
}

/// Set-algebra core of [`diff_snapshots`], without the ordering check.
pub fn diff_sets(
    period_from: PeriodLabel,
    period_to: PeriodLabel,
    nodes_from: &BTreeSet<AirportId>,
    nodes_to: &BTreeSet<AirportId>,
    arcs_from: &BTreeSet<(AirportId, AirportId)>,
    arcs_to: &BTreeSet<(AirportId, AirportId)>,
) -> TurnoverReport {
    let added_nodes: BTreeSet<&AirportId> = nodes_to.difference(nodes_from).collect();
    let removed_nodes: BTreeSet<&AirportId> = nodes_from.difference(nodes_to).collect();

    let mut report = TurnoverReport {
        period_from,
        period_to,
        nodes_added: added_nodes.iter().map(|&id| id.clone()).collect(),
        nodes_removed: removed_nodes.iter().map(|&id| id.clone()).collect(),
        added_old_old: ArcList::default(),
        added_old_new: ArcList::default(),
        added_new_new: ArcList::default(),
        deleted_old_old: ArcList::default(),
        deleted_old_removed: ArcList::default(),
        deleted_removed_removed: ArcList::default(),
        base_arcs: arcs_from.len(),
        pct_changed: None,
    };

    for arc in arcs_to.difference(arcs_from) {
        let fresh = added_nodes.contains(&arc.0) as u8 + added_nodes.contains(&arc.1) as u8;
        let list = match fresh {
            0 => &mut report.added_old_old,
            1 => &mut report.added_old_new,
            _ => &mut report.added_new_new,
        };
        list.push(arc.clone());
    }
    for arc in arcs_from.difference(arcs_to) {
        let gone = removed_nodes.contains(&arc.0) as u8 + removed_nodes.contains(&arc.1) as u8;
        let list = match gone {
            0 => &mut report.deleted_old_old,
            1 => &mut report.deleted_old_removed,
            _ => &mut report.deleted_removed_removed,
        };
        list.push(arc.clone());
    }

    let changed = report.added_total() + report.deleted_total();
    report.pct_changed = match (arcs_from.len(), changed) {
        (0, 0) => Some(0.0),
        (0, _) => None,
        (base, c) => Some(100.0 * c as f64 / base as f64),
    };
    report
}

/// Headline statistics of one period.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionRow {
    pub period: PeriodLabel,
    pub mean_degree: f64,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub mean_k_in: f64,
    pub mean_k_out: f64,
    pub reciprocity: Option<f64>,
    pub clustering: f64,
    pub mean_path_length: Option<f64>,
    pub diameter: Option<usize>,
    /// Statistics that could not be computed, and why.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionTable {
    pub rows: Vec<EvolutionRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolutionOptions {
    /// Binning of the degree pdf the two-regime fit runs on.
    pub binning: Binning,
    pub metrics: MetricOptions,
}

impl Default for EvolutionOptions {
    fn default() -> Self {
        EvolutionOptions {
            binning: Binning::Logarithmic { base: 1.5 },
            metrics: MetricOptions::default(),
        }
    }
}

/// Computes one row. A complete symmetric digraph has undefined reciprocity
/// (uniform adjacency) and is reported as perfectly reciprocal.
pub fn snapshot_row(g: &GraphSnapshot, opts: &EvolutionOptions) -> Result<EvolutionRow> {
    let mut notes = Vec::new();
    let dist = degree_distribution(g, opts.binning)?;
    let (lambda1, lambda2) = match fit_two_regime_power_law(&dist) {
        Ok(f) => (Some(f.lambda1), Some(f.lambda2)),
        Err(e) => {
            notes.push(format!("lambda: {e}"));
            (None, None)
        }
    };
    let reciprocity = match reciprocity(g) {
        Ok(r) => Some(r.r),
        Err(_) if g.node_count() >= 2 && g.arc_count() == g.node_count() * (g.node_count() - 1) => {
            notes.push("R: complete digraph, reported as 1".into());
            Some(1.0)
        }
        Err(e) => {
            notes.push(format!("R: {e}"));
            None
        }
    };
    let (mean_path_length, diameter) = match shortest_path_stats(g) {
        Ok(s) => (Some(s.mean_length), Some(s.diameter)),
        Err(e) => {
            notes.push(format!("paths: {e}"));
            (None, None)
        }
    };
    Ok(EvolutionRow {
        period: g.period(),
        mean_degree: g.mean_degree(),
        lambda1,
        lambda2,
        mean_k_in: g.mean_in_degree(),
        mean_k_out: g.mean_out_degree(),
        reciprocity,
        clustering: clustering(g, opts.metrics.low_degree_clustering).mean,
        mean_path_length,
        diameter,
        notes,
    })
}

pub fn evolution_table(snapshots: &[GraphSnapshot], opts: &EvolutionOptions) -> Result<EvolutionTable> {
    if snapshots.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    for w in snapshots.windows(2) {
        if w[0].period() >= w[1].period() {
            return Err(Error::PeriodOrder {
                from: w[0].period(),
                to: w[1].period(),
            });
        }
    }
    let rows = crate::par::map_ordered(snapshots, |g| {
        snapshot_row(g, opts).map_err(|e| e.in_period(g.period()))
    });
    Ok(EvolutionTable {
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

impl EvolutionTable {
    pub const CSV_HEADER: &'static str = "period,mean_degree,lambda1,lambda2,k_in,k_out,R,C,d,D";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.period,
                r.mean_degree,
                opt(r.lambda1),
                opt(r.lambda2),
                r.mean_k_in,
                r.mean_k_out,
                opt(r.reciprocity),
                r.clustering,
                opt(r.mean_path_length),
                opt(r.diameter),
            );
        }
        out
    }
}
