//! Per-snapshot topological statistics.
//!
//! Degree, clustering, neighbour-degree and path statistics are taken on the
//! undirected projection; in/out degrees and reciprocity on the digraph.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::{fit_linear, LinearFit};
use crate::graph::{AirportId, GraphSnapshot, UndirectedView};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistKind {
    Pdf,
    Ccdf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Binning {
    Raw,
    Logarithmic { base: f64 },
}

impl Binning {
    pub fn log(base: f64) -> Result<Self> {
        if !(base > 1.0 && base.is_finite()) {
            return Err(Error::Domain(format!(
                "log-binning base must exceed 1, got {base}"
            )));
        }
        Ok(Binning::Logarithmic { base })
    }
}

/// One row of a distribution. For a pdf, `p` is a density per unit of `x`
/// and `width` the number of integer values the row covers (1 when raw), so
/// `Σ p·width = 1`. For a ccdf, `p = P(X ≥ x)` and `width` is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistEntry {
    pub x: f64,
    pub p: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionTable {
    pub kind: DistKind,
    pub binning: Binning,
    pub entries: Vec<DistEntry>,
}

impl DistributionTable {
    /// Empirical pmf of integer values.
    pub fn pdf(values: &[usize]) -> Self {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &v in values {
            *counts.entry(v).or_default() += 1;
        }
        let n = values.len() as f64;
        DistributionTable {
            kind: DistKind::Pdf,
            binning: Binning::Raw,
            entries: counts
                .into_iter()
                .map(|(x, c)| DistEntry {
                    x: x as f64,
                    p: c as f64 / n,
                    width: 1.0,
                })
                .collect(),
        }
    }

    /// Density over geometric bins `[base^i, base^(i+1))`.
    ///
    /// Zero values cannot be placed on a log axis and are left out; the
    /// density is normalised over the positive values. Each row sits at the
    /// geometric centre of the integers its bin covers; bins without
    /// observations are omitted.
    pub fn log_binned(values: &[usize], base: f64) -> Result<Self> {
        let binning = Binning::log(base)?;
        let positive: Vec<usize> = values.iter().copied().filter(|&v| v > 0).collect();
        let mut entries = Vec::new();
        if let Some(&max) = positive.iter().max() {
            let total = positive.len() as f64;
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for &v in &positive {
                *counts.entry(v).or_default() += 1;
            }
            let mut edge = 1.0f64;
            let mut lo = 1usize;
            while lo <= max {
                edge *= base;
                // Integers in [previous edge, edge); the small slack keeps
                // exact powers like 1.5^2 = 2.25 from drifting across.
                let hi = ((edge - 1e-9).ceil() as usize).saturating_sub(1);
                if hi < lo {
                    continue;
                }
                // The top bin ends at the largest observation.
                let hi = hi.min(max);
                let c: usize = counts.range(lo..=hi).map(|(_, c)| c).sum();
                if c > 0 {
                    let width = (hi - lo + 1) as f64;
                    entries.push(DistEntry {
                        x: ((lo * hi) as f64).sqrt(),
                        p: c as f64 / (total * width),
                        width,
                    });
                }
                lo = hi + 1;
            }
        }
        Ok(DistributionTable {
            kind: DistKind::Pdf,
            binning,
            entries,
        })
    }

    /// Complementary cumulative distribution `P(X ≥ x)` at each distinct value.
    pub fn ccdf(values: &[f64]) -> Self {
        let mut sorted: Vec<f64> = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let mut entries = Vec::new();
        let mut i = 0;
        while i < sorted.len() {
            let x = sorted[i];
            entries.push(DistEntry {
                x,
                p: (sorted.len() - i) as f64 / n,
                width: 1.0,
            });
            while i < sorted.len() && sorted[i] == x {
                i += 1;
            }
        }
        DistributionTable {
            kind: DistKind::Ccdf,
            binning: Binning::Raw,
            entries,
        }
    }

    /// `Σ p·width`; 1 for a pdf.
    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|e| e.p * e.width).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeKind {
    Undirected,
    In,
    Out,
}

pub fn degree_distribution(g: &GraphSnapshot, binning: Binning) -> Result<DistributionTable> {
    degree_distribution_of(g, DegreeKind::Undirected, binning)
}

pub fn degree_distribution_of(
    g: &GraphSnapshot,
    kind: DegreeKind,
    binning: Binning,
) -> Result<DistributionTable> {
    let degrees: Vec<usize> = g
        .degree_sequences()
        .into_iter()
        .map(|r| match kind {
            DegreeKind::Undirected => r.k,
            DegreeKind::In => r.k_in,
            DegreeKind::Out => r.k_out,
        })
        .collect();
    match binning {
        Binning::Raw => Ok(DistributionTable::pdf(&degrees)),
        Binning::Logarithmic { base } => DistributionTable::log_binned(&degrees, base),
    }
}

/// OLS of `k_out` on `k_in` over nodes with at least one arc.
pub fn in_out_correlation(g: &GraphSnapshot) -> Result<LinearFit> {
    let points: Vec<(f64, f64)> = g
        .degree_sequences()
        .into_iter()
        .filter(|r| r.k_in + r.k_out > 0)
        .map(|r| (r.k_in as f64, r.k_out as f64))
        .collect();
    if points.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: points.len(),
        });
    }
    fit_linear(&points).map_err(|_| Error::Degenerate("every active node has the same in-degree".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnnResult {
    /// Mean neighbour degree per node; `None` for isolated nodes.
    pub per_node: Vec<Option<f64>>,
    /// `(k, mean knn over nodes of degree k)`, ascending in `k`.
    pub by_degree: Vec<(usize, f64)>,
}

pub fn nearest_neighbor_degree(g: &GraphSnapshot) -> Result<KnnResult> {
    let u = g.undirected();
    if u.edge_count() == 0 {
        return Err(Error::Degenerate("no edges: neighbour degree undefined".into()));
    }
    let per_node: Vec<Option<f64>> = (0..u.node_count())
        .map(|i| {
            let nb = u.neighbors(i);
            (!nb.is_empty()).then(|| nb.iter().map(|&j| u.degree(j) as f64).sum::<f64>() / nb.len() as f64)
        })
        .collect();
    let by_degree = class_means(
        per_node
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (u.degree(i), v))),
    );
    Ok(KnnResult { per_node, by_degree })
}

fn class_means(values: impl Iterator<Item = (usize, f64)>) -> Vec<(usize, f64)> {
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for (k, v) in values {
        let e = acc.entry(k).or_default();
        e.0 += v;
        e.1 += 1;
    }
    acc.into_iter().map(|(k, (s, c))| (k, s / c as f64)).collect()
}

/// How nodes with fewer than two neighbours enter the mean clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowDegreeClustering {
    /// Counted with c = 0.
    #[default]
    Zero,
    /// Left out of the mean and of C(k).
    Exclude,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusteringResult {
    pub per_node: Vec<f64>,
    pub by_degree: Vec<(usize, f64)>,
    pub mean: f64,
}

fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Triangles through each node of an undirected view.
pub fn triangles(u: &UndirectedView) -> Vec<usize> {
    (0..u.node_count())
        .map(|i| {
            let ni = u.neighbors(i);
            ni.iter()
                .map(|&j| sorted_intersection_len(ni, u.neighbors(j)))
                .sum::<usize>()
                / 2
        })
        .collect()
}

pub fn clustering(g: &GraphSnapshot, low_degree: LowDegreeClustering) -> ClusteringResult {
    let u = g.undirected();
    let tri = triangles(&u);
    let per_node: Vec<f64> = (0..u.node_count())
        .map(|i| {
            let k = u.degree(i);
            if k < 2 {
                0.0
            } else {
                2.0 * tri[i] as f64 / (k * (k - 1)) as f64
            }
        })
        .collect();
    let included = |i: usize| low_degree == LowDegreeClustering::Zero || u.degree(i) >= 2;
    let by_degree = class_means(
        (0..u.node_count())
            .filter(|&i| included(i))
            .map(|i| (u.degree(i), per_node[i])),
    );
    let (sum, count) = (0..u.node_count())
        .filter(|&i| included(i))
        .fold((0.0, 0usize), |(s, c), i| (s + per_node[i], c + 1));
    let mean = if count > 0 { sum / count as f64 } else { 0.0 };
    ClusteringResult {
        per_node,
        by_degree,
        mean,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathCount {
    pub length: usize,
    pub count: u64,
    pub percentage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathStats {
    /// Average shortest-path length over connected unordered pairs.
    pub mean_length: f64,
    pub diameter: usize,
    pub histogram: Vec<PathCount>,
    /// Unordered pairs counted (the largest component's `n(n-1)/2`).
    pub pairs: u64,
    /// Sizes of all connected components, largest first.
    pub component_sizes: Vec<usize>,
}

/// BFS hop distances from `source`; `usize::MAX` marks unreachable nodes.
pub fn bfs_distances(u: &UndirectedView, source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; u.node_count()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        for &w in u.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Shortest-path histogram, mean length and diameter on the largest
/// connected component of the undirected projection.
pub fn shortest_path_stats(g: &GraphSnapshot) -> Result<PathStats> {
    let u = g.undirected();
    let comps = u.components();
    let component_sizes: Vec<usize> = comps.iter().map(Vec::len).collect();
    let lcc = &comps[0];
    if lcc.len() < 2 {
        return Err(Error::Degenerate("no connected pair of airports".into()));
    }
    let per_source: Vec<Vec<u64>> = crate::par::map_ordered(lcc, |&s| {
        let mut hist = Vec::new();
        for d in bfs_distances(&u, s) {
            if d != 0 && d != usize::MAX {
                if hist.len() <= d {
                    hist.resize(d + 1, 0);
                }
                hist[d] += 1;
            }
        }
        hist
    });
    let mut ordered = Vec::new();
    for h in per_source {
        if ordered.len() < h.len() {
            ordered.resize(h.len(), 0u64);
        }
        for (d, c) in h.into_iter().enumerate() {
            ordered[d] += c;
        }
    }
    let pairs: u64 = ordered.iter().sum::<u64>() / 2;
    let total_length: u64 = ordered.iter().enumerate().map(|(d, &c)| d as u64 * c / 2).sum();
    let histogram: Vec<PathCount> = ordered
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0)
        .map(|(length, &c)| PathCount {
            length,
            count: c / 2,
            percentage: 100.0 * (c / 2) as f64 / pairs as f64,
        })
        .collect();
    Ok(PathStats {
        mean_length: total_length as f64 / pairs as f64,
        diameter: histogram.last().map_or(0, |h| h.length),
        histogram,
        pairs,
        component_sizes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetweennessScale {
    /// Fractional shortest-path pair counts.
    #[default]
    Raw,
    /// Raw counts times `2 / ((N-1)(N-2))`.
    Normalized,
}

/// Brandes dependency accumulation from one source.
fn brandes_source(u: &UndirectedView, s: usize, delta_out: &mut [f64]) {
    let n = u.node_count();
    let mut dist = vec![usize::MAX; n];
    let mut sigma = vec![0.0f64; n];
    let mut delta = vec![0.0f64; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    dist[s] = 0;
    sigma[s] = 1.0;
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in u.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
            }
        }
    }
    for &w in order.iter().rev() {
        for &v in u.neighbors(w) {
            if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
        }
        if w != s {
            delta_out[w] += delta[w];
        }
    }
}

/// Sources per reduction chunk. Partial sums are formed per chunk and then
/// added in chunk order, so the result does not depend on the worker count.
const BETWEENNESS_CHUNK: usize = 32;

/// Unnormalised shortest-path betweenness on the undirected projection,
/// endpoints excluded, each unordered pair counted once.
pub fn betweenness(g: &GraphSnapshot) -> Vec<f64> {
    let u = g.undirected();
    let n = u.node_count();
    let sources: Vec<usize> = (0..n).collect();
    let chunks: Vec<&[usize]> = sources.chunks(BETWEENNESS_CHUNK).collect();
    let partials = crate::par::map_ordered(&chunks, |chunk| {
        let mut acc = vec![0.0; n];
        for &s in chunk.iter() {
            brandes_source(&u, s, &mut acc);
        }
        acc
    });
    let mut b = vec![0.0; n];
    for p in partials {
        for (x, y) in b.iter_mut().zip(p) {
            *x += y;
        }
    }
    for x in &mut b {
        *x /= 2.0;
    }
    b
}

pub fn betweenness_scaled(g: &GraphSnapshot, scale: BetweennessScale) -> Vec<f64> {
    let mut b = betweenness(g);
    if scale == BetweennessScale::Normalized {
        let n = g.node_count() as f64;
        let f = if n >= 3.0 {
            2.0 / ((n - 1.0) * (n - 2.0))
        } else {
            0.0
        };
        b.iter_mut().for_each(|x| *x *= f);
    }
    b
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReciprocityResult {
    pub r: f64,
    /// `Σ a_ij / (N(N-1))`.
    pub arc_density: f64,
}

/// Correlation between `a_ij` and `a_ji` over ordered pairs `i ≠ j`.
///
/// With `L` arcs of which `L_rec` have their reverse present and
/// `P = N(N-1)`, the double sums reduce to `(L_rec - ā L) / (L (1 - ā))`,
/// evaluated here as `(L_rec P - L²) / (L P - L²)` in integers so that
/// symmetric graphs give exactly 1.
pub fn reciprocity(g: &GraphSnapshot) -> Result<ReciprocityResult> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::Degenerate(
            "reciprocity needs at least two airports".into(),
        ));
    }
    let arcs = g.arc_count() as i128;
    let ordered_pairs = (n * (n - 1)) as i128;
    let a_bar = arcs as f64 / ordered_pairs as f64;
    if arcs == 0 || arcs == ordered_pairs {
        return Err(Error::Degenerate(format!(
            "uniform adjacency (density {a_bar}) has no reciprocity"
        )));
    }
    let reciprocated = g.arcs().filter(|&(i, j)| g.has_arc(j, i)).count() as i128;
    let numerator = reciprocated * ordered_pairs - arcs * arcs;
    let denominator = arcs * ordered_pairs - arcs * arcs;
    Ok(ReciprocityResult {
        r: (numerator as f64 / denominator as f64).clamp(-1.0, 1.0),
        arc_density: a_bar,
    })
}

/// One row of the per-node report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeMetrics {
    pub node: AirportId,
    pub k: usize,
    pub k_in: usize,
    pub k_out: usize,
    pub c: f64,
    pub b: f64,
    pub knn: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricOptions {
    pub betweenness: BetweennessScale,
    pub low_degree_clustering: LowDegreeClustering,
}

pub fn node_metrics(g: &GraphSnapshot, opts: MetricOptions) -> Vec<NodeMetrics> {
    let degrees = g.degree_sequences();
    let c = clustering(g, opts.low_degree_clustering).per_node;
    let b = betweenness_scaled(g, opts.betweenness);
    let knn = nearest_neighbor_degree(g)
        .map(|r| r.per_node)
        .unwrap_or_else(|_| vec![None; g.node_count()]);
    degrees
        .into_iter()
        .enumerate()
        .map(|(i, d)| NodeMetrics {
            node: d.node,
            k: d.k,
            k_in: d.k_in,
            k_out: d.k_out,
            c: c[i],
            b: b[i],
            knn: knn[i],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PeriodLabel;

    fn id(s: &str) -> AirportId {
        AirportId::new(s).unwrap()
    }

    fn sym(edges: &[(&str, &str)]) -> GraphSnapshot {
        GraphSnapshot::new(
            "2009H1".parse::<PeriodLabel>().unwrap(),
            [],
            edges.iter().flat_map(|(a, b)| [(id(a), id(b)), (id(b), id(a))]),
        )
        .unwrap()
    }

    fn directed(arcs: &[(&str, &str)]) -> GraphSnapshot {
        GraphSnapshot::new(
            "2009H1".parse::<PeriodLabel>().unwrap(),
            [],
            arcs.iter().map(|(a, b)| (id(a), id(b))),
        )
        .unwrap()
    }

    fn triangle() -> GraphSnapshot {
        sym(&[("A", "B"), ("B", "C"), ("A", "C")])
    }

    fn star() -> GraphSnapshot {
        sym(&[("H", "A"), ("H", "B"), ("H", "C")])
    }

    fn path3() -> GraphSnapshot {
        sym(&[("A", "B"), ("B", "C")])
    }

    fn entries(t: &DistributionTable) -> Vec<(f64, f64)> {
        t.entries.iter().map(|e| (e.x, e.p)).collect()
    }

    #[test]
    fn degree_distribution_examples() {
        let t = degree_distribution(&triangle(), Binning::Raw).unwrap();
        assert_eq!(entries(&t), vec![(2.0, 1.0)]);
        let s = degree_distribution(&star(), Binning::Raw).unwrap();
        assert_eq!(entries(&s), vec![(1.0, 0.75), (3.0, 0.25)]);
    }

    #[test]
    fn log_binning_layout() {
        let values: Vec<usize> = (1..=30).collect();
        let t = DistributionTable::log_binned(&values, 1.5).unwrap();
        // 1 | 2 | 3 | 4-5 | 6-7 | 8-11 | 12-17 | 18-25 | 26-30 (top bin clipped at the maximum)
        let widths: Vec<f64> = t.entries.iter().map(|e| e.width).collect();
        assert_eq!(widths, vec![1.0, 1.0, 1.0, 2.0, 2.0, 4.0, 6.0, 8.0, 5.0]);
        assert_eq!(t.entries[8].x, (26.0f64 * 30.0).sqrt());
        assert!((t.total_mass() - 1.0).abs() < 1e-12);
        assert!(t.entries.windows(2).all(|w| w[0].x < w[1].x));
        assert!(DistributionTable::log_binned(&values, 1.0).is_err());
    }

    #[test]
    fn log_binning_skips_zero_degree() {
        let t = DistributionTable::log_binned(&[0, 0, 1, 2], 2.0).unwrap();
        assert!((t.total_mass() - 1.0).abs() < 1e-12);
        assert_eq!(t.entries[0].x, 1.0);
    }

    #[test]
    fn log_binning_uniform_sample_is_flat() {
        // Every integer once: density 1/30 in every bin, the clipped top one included.
        let values: Vec<usize> = (1..=30).collect();
        let t = DistributionTable::log_binned(&values, 1.5).unwrap();
        assert!(t.entries.iter().all(|e| (e.p - 1.0 / 30.0).abs() < 1e-15));
    }

    #[test]
    fn ccdf_examples() {
        let t = DistributionTable::ccdf(&[0.0]);
        assert_eq!(entries(&t), vec![(0.0, 1.0)]);
        let t = DistributionTable::ccdf(&[100.0, 1.0, 10.0, 10.0]);
        assert_eq!(entries(&t), vec![(1.0, 1.0), (10.0, 0.75), (100.0, 0.25)]);
    }

    #[test]
    fn in_out_symmetric_and_cycle() {
        let f = in_out_correlation(&star()).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12);
        assert!(f.intercept.abs() < 1e-12);
        assert!((f.pearson_r - 1.0).abs() < 1e-12);

        let cycle = directed(&[("A", "B"), ("B", "C"), ("C", "A")]);
        assert!(matches!(in_out_correlation(&cycle), Err(Error::Degenerate(_))));
    }

    #[test]
    fn knn_examples() {
        let r = nearest_neighbor_degree(&star()).unwrap();
        assert_eq!(r.by_degree, vec![(1, 3.0), (3, 1.0)]);
        let r = nearest_neighbor_degree(&triangle()).unwrap();
        assert_eq!(r.by_degree, vec![(2, 2.0)]);

        let lonely = GraphSnapshot::new("2009H1".parse().unwrap(), [id("A")], []).unwrap();
        assert!(nearest_neighbor_degree(&lonely).is_err());
    }

    #[test]
    fn clustering_examples() {
        let c = clustering(&triangle(), LowDegreeClustering::Zero);
        assert_eq!(c.per_node, vec![1.0; 3]);
        assert_eq!(c.mean, 1.0);

        let c = clustering(&star(), LowDegreeClustering::Zero);
        assert_eq!(c.per_node, vec![0.0; 4]);
        assert_eq!(c.mean, 0.0);
    }

    #[test]
    fn clustering_low_degree_convention() {
        // Triangle with a pendant: A-B-C-A plus C-D.
        let g = sym(&[("A", "B"), ("B", "C"), ("A", "C"), ("C", "D")]);
        let zero = clustering(&g, LowDegreeClustering::Zero);
        let excl = clustering(&g, LowDegreeClustering::Exclude);
        // c(A)=c(B)=1, c(C)=1/3, c(D)=0.
        assert!((zero.mean - (2.0 + 1.0 / 3.0) / 4.0).abs() < 1e-12);
        assert!((excl.mean - (2.0 + 1.0 / 3.0) / 3.0).abs() < 1e-12);
        assert_eq!(zero.by_degree[0], (1, 0.0));
        assert_eq!(excl.by_degree[0].0, 2);
    }

    #[test]
    fn path_stats_examples() {
        let s = shortest_path_stats(&star()).unwrap();
        assert_eq!(s.diameter, 2);
        assert!((s.mean_length - 1.5).abs() < 1e-12);
        assert_eq!(
            s.histogram,
            vec![
                PathCount {
                    length: 1,
                    count: 3,
                    percentage: 50.0
                },
                PathCount {
                    length: 2,
                    count: 3,
                    percentage: 50.0
                },
            ]
        );
        let p = shortest_path_stats(&path3()).unwrap();
        assert!((p.mean_length - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(p.diameter, 2);
    }

    #[test]
    fn path_stats_use_largest_component() {
        let g = sym(&[("A", "B"), ("B", "C"), ("X", "Y")]);
        let s = shortest_path_stats(&g).unwrap();
        assert_eq!(s.component_sizes, vec![3, 2]);
        assert_eq!(s.pairs, 3);
    }

    #[test]
    fn betweenness_examples() {
        assert_eq!(betweenness(&path3()), vec![0.0, 1.0, 0.0]);
        let s = star();
        let h = s.index_of(&id("H")).unwrap();
        let b = betweenness(&s);
        assert_eq!(b[h], 3.0);
        assert_eq!(b.iter().sum::<f64>(), 3.0);
        let n = betweenness_scaled(&s, BetweennessScale::Normalized);
        assert!((n[h] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn betweenness_splits_equal_paths() {
        // 4-cycle: each opposite pair has two shortest paths.
        let g = sym(&[("A", "B"), ("B", "C"), ("C", "D"), ("D", "A")]);
        assert_eq!(betweenness(&g), vec![0.5; 4]);
    }

    #[test]
    fn reciprocity_examples() {
        let r = reciprocity(&path3()).unwrap();
        assert!((r.r - 1.0).abs() < 1e-12);

        let cycle = directed(&[("A", "B"), ("B", "C"), ("C", "A")]);
        let r = reciprocity(&cycle).unwrap();
        assert_eq!(r.arc_density, 0.5);
        assert!((r.r + 1.0).abs() < 1e-12);

        assert!(matches!(reciprocity(&triangle()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn node_metrics_rows() {
        let rows = node_metrics(&star(), MetricOptions::default());
        let hub = rows.iter().find(|r| r.node.as_str() == "H").unwrap();
        assert_eq!((hub.k, hub.k_in, hub.k_out), (3, 3, 3));
        assert_eq!(hub.b, 3.0);
        assert_eq!(hub.knn, Some(1.0));
    }
}
