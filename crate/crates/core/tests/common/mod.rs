//! Brute-force reference implementations and seeded generators shared by the
//! integration tests. Nothing here calls into the library's metric code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use airnet::graph::{AirportId, GraphSnapshot, Half, PeriodLabel};
use airnet::metrics::{
    betweenness, clustering, nearest_neighbor_degree, reciprocity, shortest_path_stats, LowDegreeClustering,
};
use rand::Rng;

pub fn period(year: i32, half: Half) -> PeriodLabel {
    PeriodLabel::new(year, half)
}

/// Zero-padded so that id order equals index order.
pub fn node_id(i: usize) -> AirportId {
    AirportId::new(&format!("V{i:03}")).unwrap()
}

pub fn snapshot(n: usize, arcs: &[(usize, usize)]) -> GraphSnapshot {
    snapshot_at(period(2000, Half::H1), n, arcs)
}

pub fn snapshot_at(p: PeriodLabel, n: usize, arcs: &[(usize, usize)]) -> GraphSnapshot {
    GraphSnapshot::new(
        p,
        (0..n).map(node_id),
        arcs.iter().map(|&(a, b)| (node_id(a), node_id(b))),
    )
    .unwrap()
}

/// Dense directed adjacency.
pub fn adjacency(n: usize, arcs: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; n]; n];
    for &(i, j) in arcs {
        a[i][j] = true;
    }
    a
}

pub fn symmetrize(a: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| a[i][j] || a[j][i]).collect())
        .collect()
}

pub fn degrees(u: &[Vec<bool>]) -> Vec<usize> {
    u.iter().map(|row| row.iter().filter(|&&x| x).count()).collect()
}

/// All-pairs hop distances by Floyd–Warshall.
pub fn floyd(u: &[Vec<bool>]) -> Vec<Vec<Option<usize>>> {
    let n = u.len();
    let mut d: Vec<Vec<Option<usize>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Some(0)
                    } else if u[i][j] {
                        Some(1)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Every shortest path between `s` and `t`, as explicit vertex sequences.
fn shortest_paths(u: &[Vec<bool>], dist: &[Vec<Option<usize>>], s: usize, t: usize) -> Vec<Vec<usize>> {
    fn walk(
        u: &[Vec<bool>],
        dist: &[Vec<Option<usize>>],
        t: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let v = *path.last().unwrap();
        if v == t {
            out.push(path.clone());
            return;
        }
        let remaining = dist[v][t].unwrap();
        for w in 0..u.len() {
            if u[v][w] && dist[w][t] == Some(remaining - 1) {
                path.push(w);
                walk(u, dist, t, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    if dist[s][t].is_some() {
        walk(u, dist, t, &mut vec![s], &mut out);
    }
    out
}

/// Betweenness by enumerating every shortest path of every unordered pair.
pub fn brute_betweenness(u: &[Vec<bool>]) -> Vec<f64> {
    let n = u.len();
    let dist = floyd(u);
    let mut b = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let paths = shortest_paths(u, &dist, s, t);
            if paths.is_empty() {
                continue;
            }
            let total = paths.len() as f64;
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    b[v] += 1.0 / total;
                }
            }
        }
    }
    b
}

pub fn brute_knn(u: &[Vec<bool>]) -> Vec<Option<f64>> {
    let k = degrees(u);
    (0..u.len())
        .map(|i| {
            let nb: Vec<usize> = (0..u.len()).filter(|&j| u[i][j]).collect();
            (!nb.is_empty()).then(|| nb.iter().map(|&j| k[j] as f64).sum::<f64>() / nb.len() as f64)
        })
        .collect()
}

/// Local clustering with `c = 0` below degree two.
pub fn brute_clustering(u: &[Vec<bool>]) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| {
            let nb: Vec<usize> = (0..n).filter(|&j| u[i][j]).collect();
            if nb.len() < 2 {
                return 0.0;
            }
            let mut linked = 0usize;
            let mut pairs = 0usize;
            for (x, &a) in nb.iter().enumerate() {
                for &b in &nb[x + 1..] {
                    pairs += 1;
                    linked += u[a][b] as usize;
                }
            }
            linked as f64 / pairs as f64
        })
        .collect()
}

/// Pearson correlation of `a_ij` with `a_ji` over ordered pairs `i != j`,
/// evaluated as the literal double sum. `None` when the variance vanishes.
pub fn brute_reciprocity(a: &[Vec<bool>]) -> Option<f64> {
    let n = a.len();
    if n < 2 {
        return None;
    }
    let val = |i: usize, j: usize| a[i][j] as u8 as f64;
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += val(i, j);
            }
        }
    }
    let mean = sum / (n * (n - 1)) as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                num += (val(i, j) - mean) * (val(j, i) - mean);
                den += (val(i, j) - mean).powi(2);
            }
        }
    }
    (den > 0.0).then(|| num / den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrutePaths {
    pub mean: f64,
    pub diameter: usize,
    pub histogram: BTreeMap<usize, u64>,
    pub pairs: u64,
}

/// Path statistics on the largest component (ties broken by smallest member).
pub fn brute_paths(u: &[Vec<bool>]) -> Option<BrutePaths> {
    let n = u.len();
    let dist = floyd(u);
    let mut best: Vec<usize> = Vec::new();
    let mut assigned = vec![false; n];
    for s in 0..n {
        if assigned[s] {
            continue;
        }
        let comp: Vec<usize> = (0..n).filter(|&t| dist[s][t].is_some()).collect();
        for &t in &comp {
            assigned[t] = true;
        }
        if comp.len() > best.len() {
            best = comp;
        }
    }
    if best.len() < 2 {
        return None;
    }
    let mut histogram = BTreeMap::new();
    let (mut total, mut pairs) = (0u64, 0u64);
    for (x, &s) in best.iter().enumerate() {
        for &t in &best[x + 1..] {
            let d = dist[s][t].unwrap();
            *histogram.entry(d).or_insert(0u64) += 1;
            total += d as u64;
            pairs += 1;
        }
    }
    Some(BrutePaths {
        mean: total as f64 / pairs as f64,
        diameter: *histogram.keys().last().unwrap(),
        histogram,
        pairs,
    })
}

/// Ordinary least squares from the textbook sums: (slope, intercept, r).
pub fn ols(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let syy: f64 = points.iter().map(|p| p.1 * p.1).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let r = (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt());
    (slope, intercept, r)
}

/// Each ordered pair `i != j` is an arc with probability `p`.
pub fn random_digraph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(p) {
                arcs.push((i, j));
            }
        }
    }
    arcs
}

/// Each unordered pair is a two-way route with probability `p`.
pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                arcs.push((i, j));
                arcs.push((j, i));
            }
        }
    }
    arcs
}

pub fn is_connected(u: &[Vec<bool>]) -> bool {
    let d = floyd(u);
    d[0].iter().all(Option::is_some)
}

/// Absolute-or-relative closeness at `tol`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

const ORACLE_TOL: f64 = 1e-9;

/// Compares betweenness, clustering, knn, d, D, the path histogram and R of
/// the library against the brute-force versions above.
pub fn compare_with_oracles(n: usize, arcs: &[(usize, usize)]) -> Result<(), String> {
    let g = snapshot(n, arcs);
    let a = adjacency(n, arcs);
    let u = symmetrize(&a);
    let ctx = || format!("n={n} arcs={arcs:?}");

    for (i, (x, y)) in betweenness(&g).iter().zip(brute_betweenness(&u)).enumerate() {
        if !close(*x, y, ORACLE_TOL) {
            return Err(format!("betweenness of node {i}: {x} vs {y}; {}", ctx()));
        }
    }
    let c = clustering(&g, LowDegreeClustering::Zero);
    for (i, (x, y)) in c.per_node.iter().zip(brute_clustering(&u)).enumerate() {
        if !close(*x, y, ORACLE_TOL) {
            return Err(format!("clustering of node {i}: {x} vs {y}; {}", ctx()));
        }
    }
    match nearest_neighbor_degree(&g) {
        Ok(knn) => {
            for (i, (x, y)) in knn.per_node.iter().zip(brute_knn(&u)).enumerate() {
                let ok = match (x, y) {
                    (Some(x), Some(y)) => close(*x, y, ORACLE_TOL),
                    (None, None) => true,
                    _ => false,
                };
                if !ok {
                    return Err(format!("knn of node {i}: {x:?} vs {y:?}; {}", ctx()));
                }
            }
        }
        Err(_) if arcs.is_empty() => {}
        Err(e) => return Err(format!("knn failed: {e}; {}", ctx())),
    }
    match (shortest_path_stats(&g), brute_paths(&u)) {
        (Ok(s), Some(o)) => {
            let hist: Vec<(usize, u64)> = s.histogram.iter().map(|h| (h.length, h.count)).collect();
            let expected: Vec<(usize, u64)> = o.histogram.into_iter().collect();
            if !close(s.mean_length, o.mean, ORACLE_TOL)
                || s.diameter != o.diameter
                || s.pairs != o.pairs
                || hist != expected
            {
                return Err(format!(
                    "paths: d={} D={} {hist:?} vs d={} D={} {expected:?}; {}",
                    s.mean_length,
                    s.diameter,
                    o.mean,
                    o.diameter,
                    ctx()
                ));
            }
        }
        (Err(_), None) => {}
        (s, o) => return Err(format!("path stats disagree: {s:?} vs {o:?}; {}", ctx())),
    }
    match (reciprocity(&g), brute_reciprocity(&a)) {
        (Ok(r), Some(o)) if close(r.r, o, ORACLE_TOL) => {}
        (Err(_), None) => {}
        (r, o) => return Err(format!("reciprocity: {r:?} vs {o:?}; {}", ctx())),
    }
    Ok(())
}
