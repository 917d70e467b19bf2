//! Directed airport-network snapshots.
//!
//! A [`GraphSnapshot`] is the binary adjacency of one timetable period after
//! city merging and domestic filtering. Nodes are kept sorted by code, so
//! node indices are stable for a given node set.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical city-level airport code (uppercase, non-empty).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AirportId(String);

impl AirportId {
    pub fn new(code: &str) -> Result<Self> {
        let code = code.trim();
        if code.is_empty() {
            return Err(Error::InvalidSnapshot("empty airport code".into()));
        }
        Ok(AirportId(code.to_uppercase()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AirportId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for AirportId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AirportId::new(s)
    }
}

impl TryFrom<String> for AirportId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        AirportId::new(&s)
    }
}

impl From<AirportId> for String {
    fn from(id: AirportId) -> String {
        id.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Half {
    H1,
    H2,
}

/// A schedule period: a year and a half-year, ordered chronologically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PeriodLabel {
    pub year: i32,
    pub half: Half,
}

impl PeriodLabel {
    pub fn new(year: i32, half: Half) -> Self {
        PeriodLabel { year, half }
    }
}

impl fmt::Display for PeriodLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let half = match self.half {
            Half::H1 => "H1",
            Half::H2 => "H2",
        };
        write!(f, "{}{}", self.year, half)
    }
}

impl FromStr for PeriodLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_uppercase();
        let bad = || Error::InvalidPeriod(s.to_string());
        if t.len() < 3 {
            return Err(bad());
        }
        let (year, half) = t.split_at(t.len() - 2);
        let half = match half {
            "H1" => Half::H1,
            "H2" => Half::H2,
            _ => return Err(bad()),
        };
        if year.is_empty() || !year.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let year = year.parse().map_err(|_| bad())?;
        Ok(PeriodLabel { year, half })
    }
}

impl TryFrom<String> for PeriodLabel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PeriodLabel> for String {
    fn from(p: PeriodLabel) -> String {
        p.to_string()
    }
}

/// Degrees of one node: `k` counts distinct neighbours in the undirected
/// projection, `k_in`/`k_out` count arcs in the digraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeRecord {
    pub node: AirportId,
    pub k: usize,
    pub k_in: usize,
    pub k_out: usize,
}

/// One period's directed graph with binary adjacency, no self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSnapshot {
    period: PeriodLabel,
    ids: Vec<AirportId>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    arc_count: usize,
}

impl GraphSnapshot {
    /// Builds a snapshot from canonical ids. Arc endpoints are added to the
    /// node set; duplicate arcs collapse. Self-loops are rejected.
    pub fn new<N, A>(period: PeriodLabel, nodes: N, arcs: A) -> Result<Self>
    where
        N: IntoIterator<Item = AirportId>,
        A: IntoIterator<Item = (AirportId, AirportId)>,
    {
        let arcs: BTreeSet<(AirportId, AirportId)> = arcs.into_iter().collect();
        let mut node_set: BTreeSet<AirportId> = nodes.into_iter().collect();
        for (a, b) in &arcs {
            if a == b {
                return Err(Error::InvalidSnapshot(format!("self-loop at {a}")));
            }
            node_set.insert(a.clone());
            node_set.insert(b.clone());
        }
        if node_set.is_empty() {
            return Err(Error::InvalidSnapshot(format!("{period} has no airports")));
        }
        let ids: Vec<AirportId> = node_set.into_iter().collect();
        let index: HashMap<&AirportId, usize> = ids.iter().enumerate().map(|(i, id)| (id, i)).collect();
        let mut out_adj = vec![Vec::new(); ids.len()];
        let mut in_adj = vec![Vec::new(); ids.len()];
        for (a, b) in &arcs {
            let (i, j) = (index[a], index[b]);
            out_adj[i].push(j);
            in_adj[j].push(i);
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
        }
        Ok(GraphSnapshot {
            period,
            ids,
            out_adj,
            in_adj,
            arc_count: arcs.len(),
        })
    }

    pub fn period(&self) -> PeriodLabel {
        self.period
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    /// Node ids in index order (sorted).
    pub fn ids(&self) -> &[AirportId] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &AirportId {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &AirportId) -> Option<usize> {
        self.ids.binary_search(id).ok()
    }

    pub fn contains(&self, id: &AirportId) -> bool {
        self.index_of(id).is_some()
    }

    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out_adj[i]
    }

    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        &self.in_adj[i]
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.out_adj[i].binary_search(&j).is_ok()
    }

    /// Arcs as index pairs, lexicographically ordered.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(i, outs)| outs.iter().map(move |&j| (i, j)))
    }

    /// Arcs as id pairs.
    pub fn arc_set(&self) -> BTreeSet<(AirportId, AirportId)> {
        self.arcs()
            .map(|(i, j)| (self.ids[i].clone(), self.ids[j].clone()))
            .collect()
    }

    pub fn node_set(&self) -> BTreeSet<AirportId> {
        self.ids.iter().cloned().collect()
    }

    /// Undirected projection: `{i, j}` is an edge iff `i→j` or `j→i`.
    pub fn undirected(&self) -> UndirectedView {
        let adj: Vec<Vec<usize>> = (0..self.node_count())
            .map(|i| {
                let mut n: Vec<usize> = self.out_adj[i]
                    .iter()
                    .chain(self.in_adj[i].iter())
                    .copied()
                    .collect();
                n.sort_unstable();
                n.dedup();
                n
            })
            .collect();
        UndirectedView::from_sorted_adjacency(adj)
    }

    pub fn degree_sequences(&self) -> Vec<DegreeRecord> {
        let und = self.undirected();
        (0..self.node_count())
            .map(|i| DegreeRecord {
                node: self.ids[i].clone(),
                k: und.degree(i),
                k_in: self.in_adj[i].len(),
                k_out: self.out_adj[i].len(),
            })
            .collect()
    }

    /// Mean undirected degree, `2|E| / N`.
    pub fn mean_degree(&self) -> f64 {
        2.0 * self.undirected().edge_count() as f64 / self.node_count() as f64
    }

    /// Mean in-degree; equal to the mean out-degree, `|arcs| / N`.
    pub fn mean_in_degree(&self) -> f64 {
        self.arc_count as f64 / self.node_count() as f64
    }

    pub fn mean_out_degree(&self) -> f64 {
        let total: usize = self.out_adj.iter().map(Vec::len).sum();
        total as f64 / self.node_count() as f64
    }

    pub fn is_symmetric(&self) -> bool {
        self.arcs().all(|(i, j)| self.has_arc(j, i))
    }

    pub fn with_period(mut self, period: PeriodLabel) -> Self {
        self.period = period;
        self
    }
}

/// Simple undirected graph over the snapshot's node indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedView {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl UndirectedView {
    fn from_sorted_adjacency(adj: Vec<Vec<usize>>) -> Self {
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        UndirectedView { adj, edge_count }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    /// Edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, n)| n.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Connected components, largest first; ties ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        comps
    }
}

/// Raw timetable code → canonical city code.
///
/// A lenient map resolves unlisted codes to themselves; a strict map rejects
/// them. Lookups are case-insensitive.
#[derive(Debug, Clone, Default)]
pub struct MergeMap {
    entries: HashMap<String, AirportId>,
    strict: bool,
}

impl MergeMap {
    pub fn identity() -> Self {
        MergeMap::default()
    }

    pub fn new<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut map = HashMap::new();
        for (raw, city) in entries {
            let raw = raw.as_ref().trim().to_uppercase();
            if raw.is_empty() {
                return Err(Error::InvalidSnapshot("empty raw code in merge map".into()));
            }
            map.insert(raw, AirportId::new(city.as_ref())?);
        }
        Ok(MergeMap {
            entries: map,
            strict: false,
        })
    }

    pub fn strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn resolve(&self, raw: &str) -> Result<AirportId> {
        let key = raw.trim().to_uppercase();
        if key.is_empty() {
            return Err(Error::InvalidSnapshot("empty airport code".into()));
        }
        match self.entries.get(&key) {
            Some(id) => Ok(id.clone()),
            None if self.strict => Err(Error::UnmappedCode(key)),
            None => Ok(AirportId(key)),
        }
    }
}

/// Builds one period's snapshot from raw `(src, dst)` records.
///
/// Codes go through `merge`, arcs touching an airport outside `domestic` are
/// dropped (no filter when `None`), and arcs that collapse onto one city are
/// dropped while the city itself stays a node.
pub fn build_snapshot<S: AsRef<str>>(
    records: &[(S, S)],
    merge: &MergeMap,
    domestic: Option<&BTreeSet<AirportId>>,
    period: PeriodLabel,
) -> Result<GraphSnapshot> {
    build_snapshot_with_nodes(records, merge, domestic, period, &[])
}

/// [`build_snapshot`] plus explicitly listed airports (which may be isolated).
pub fn build_snapshot_with_nodes<S: AsRef<str>>(
    records: &[(S, S)],
    merge: &MergeMap,
    domestic: Option<&BTreeSet<AirportId>>,
    period: PeriodLabel,
    extra_nodes: &[AirportId],
) -> Result<GraphSnapshot> {
    if records.is_empty() && extra_nodes.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let is_domestic = |id: &AirportId| domestic.is_none_or(|d| d.contains(id));
    let mut nodes = BTreeSet::new();
    let mut arcs = BTreeSet::new();
    for (src, dst) in records {
        let a = merge.resolve(src.as_ref())?;
        let b = merge.resolve(dst.as_ref())?;
        if !is_domestic(&a) || !is_domestic(&b) {
            continue;
        }
        nodes.insert(a.clone());
        nodes.insert(b.clone());
        if a != b {
            arcs.insert((a, b));
        }
    }
    for id in extra_nodes {
        let id = merge.resolve(id.as_str())?;
        if is_domestic(&id) {
            nodes.insert(id);
        }
    }
    GraphSnapshot::new(period, nodes, arcs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> AirportId {
        AirportId::new(s).unwrap()
    }

    fn p() -> PeriodLabel {
        "2009H1".parse().unwrap()
    }

    fn domestic(codes: &[&str]) -> BTreeSet<AirportId> {
        codes.iter().map(|c| id(c)).collect()
    }

    #[test]
    fn period_parse_and_order() {
        let a: PeriodLabel = "2002H2".parse().unwrap();
        let b: PeriodLabel = "2003h1".parse().unwrap();
        assert!(a < b);
        assert_eq!(b.to_string(), "2003H1");
        assert!("2003H3".parse::<PeriodLabel>().is_err());
        assert!("H1".parse::<PeriodLabel>().is_err());
        assert!("20x3H1".parse::<PeriodLabel>().is_err());
    }

    #[test]
    fn symmetric_pair_with_identity_merge() {
        let merge = MergeMap::new([("PVG", "SHA")]).unwrap();
        let d = domestic(&["PEK", "SHA"]);
        let g = build_snapshot(&[("PEK", "SHA"), ("SHA", "PEK")], &merge, Some(&d), p()).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.arc_count(), 2);
    }

    #[test]
    fn merged_self_loop_is_dropped() {
        let merge = MergeMap::new([("SHA", "SH"), ("PVG", "SH")]).unwrap();
        let g = build_snapshot(&[("SHA", "PVG")], &merge, None, p()).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.arc_count(), 0);
        assert_eq!(g.ids(), &[id("SH")]);
    }

    #[test]
    fn international_arc_is_dropped() {
        let d = domestic(&["PEK", "SHA"]);
        let g = build_snapshot(
            &[("PEK", "SHA"), ("PEK", "LAX")],
            &MergeMap::identity(),
            Some(&d),
            p(),
        )
        .unwrap();
        assert_eq!(g.arc_count(), 1);
        assert!(!g.contains(&id("LAX")));
    }

    #[test]
    fn strict_merge_names_unmapped_code() {
        let merge = MergeMap::new([("PVG", "SHA")]).unwrap().strict(true);
        let err = build_snapshot(&[("PVG", "ctu")], &merge, None, p()).unwrap_err();
        assert!(matches!(&err, Error::UnmappedCode(c) if c == "CTU"));
        assert!(err.to_string().contains("CTU"));
    }

    #[test]
    fn empty_records_rejected() {
        let recs: [(&str, &str); 0] = [];
        assert!(matches!(
            build_snapshot(&recs, &MergeMap::identity(), None, p()),
            Err(Error::EmptyRecords)
        ));
    }

    #[test]
    fn codes_are_case_folded_and_duplicates_collapse() {
        let g = build_snapshot(
            &[("pek", "sha"), ("PEK", "SHA"), ("Pek", "Sha")],
            &MergeMap::identity(),
            None,
            p(),
        )
        .unwrap();
        assert_eq!(g.arc_count(), 1);
        assert_eq!(g.ids(), &[id("PEK"), id("SHA")]);
    }

    #[test]
    fn explicit_isolated_node() {
        let g =
            build_snapshot_with_nodes(&[("A", "B")], &MergeMap::identity(), None, p(), &[id("Z")]).unwrap();
        assert_eq!(g.node_count(), 3);
        let z = g.index_of(&id("Z")).unwrap();
        assert_eq!(g.undirected().degree(z), 0);
    }

    #[test]
    fn projection_examples() {
        let cycle = GraphSnapshot::new(
            p(),
            [],
            [(id("A"), id("B")), (id("B"), id("C")), (id("C"), id("A"))],
        )
        .unwrap();
        let u = cycle.undirected();
        assert_eq!(u.edge_count(), 3);
        assert!(u.has_edge(0, 1) && u.has_edge(1, 2) && u.has_edge(0, 2));

        let pair = GraphSnapshot::new(p(), [], [(id("A"), id("B")), (id("B"), id("A"))]).unwrap();
        assert_eq!(pair.undirected().edge_count(), 1);

        let empty = GraphSnapshot::new(p(), [id("A"), id("B")], []).unwrap();
        let u = empty.undirected();
        assert_eq!(u.edge_count(), 0);
        assert_eq!(u.node_count(), 2);
    }

    #[test]
    fn degree_examples() {
        let tri = GraphSnapshot::new(
            p(),
            [],
            ["A", "B", "C"]
                .iter()
                .flat_map(|a| ["A", "B", "C"].iter().map(move |b| (id(a), id(b))))
                .filter(|(a, b)| a != b),
        )
        .unwrap();
        for r in tri.degree_sequences() {
            assert_eq!((r.k, r.k_in, r.k_out), (2, 2, 2));
        }
        assert_eq!(tri.mean_degree(), 2.0);

        let star = GraphSnapshot::new(
            p(),
            [],
            ["B", "C", "D"]
                .iter()
                .flat_map(|l| [(id("A"), id(l)), (id(l), id("A"))]),
        )
        .unwrap();
        let degs = star.degree_sequences();
        assert_eq!(degs[0].k, 3);
        assert!(degs[1..].iter().all(|r| r.k == 1));
        assert_eq!(star.mean_degree(), 1.5);
    }

    #[test]
    fn self_loop_rejected_by_constructor() {
        assert!(GraphSnapshot::new(p(), [], [(id("A"), id("A"))]).is_err());
    }

    #[test]
    fn components_largest_first() {
        let g = GraphSnapshot::new(
            p(),
            [id("Z")],
            [(id("A"), id("B")), (id("C"), id("D")), (id("D"), id("E"))],
        )
        .unwrap();
        let sizes: Vec<usize> = g.undirected().components().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![3, 2, 1]);
    }
}
