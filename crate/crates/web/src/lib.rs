//! Browser demo. Every operation takes plain numbers or text and returns a
//! JSON document; the wasm exports wrap the native functions one to one so
//! the logic is testable without a browser.

use airnet::fitting::{fit_exponential, fit_exponential_growth, fit_two_regime_power_law, Fit};
use airnet::graph::{AirportId, GraphSnapshot, Half, PeriodLabel};
use airnet::metrics::{
    clustering, degree_distribution, reciprocity, shortest_path_stats, Binning, LowDegreeClustering,
};
use airnet::traffic::{seasonal_decompose, Date, TimeSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

pub type DemoResult = Result<Value, String>;

const MAX_NODES: usize = 3000;

/// Hidden-variable network: node `i` draws a Pareto weight `w_i` with tail
/// exponent `gamma`, the pair `{i, j}` is linked with probability
/// `min(c w_i w_j, 1)` where `c` targets `mean_degree`, and each link is
/// two-way with probability `two_way`, otherwise one-way in a random direction.
pub fn random_network(
    n: usize,
    mean_degree: f64,
    gamma: f64,
    two_way: f64,
    seed: u64,
) -> Result<GraphSnapshot, String> {
    if !(2..=MAX_NODES).contains(&n) {
        return Err(format!("node count must be between 2 and {MAX_NODES}"));
    }
    if mean_degree.is_nan() || mean_degree <= 0.0 || mean_degree >= n as f64 {
        return Err("mean degree must be positive and below the node count".into());
    }
    if gamma.is_nan() || gamma <= 2.0 {
        return Err("tail exponent must exceed 2".into());
    }
    if !(0.0..=1.0).contains(&two_way) {
        return Err("two-way fraction must lie in [0, 1]".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..n)
        .map(|_| (1.0 - rng.random::<f64>()).powf(-1.0 / (gamma - 1.0)))
        .collect();
    // Expected degree sum before capping is c (W² - Σw²).
    let total: f64 = weights.iter().sum();
    let squares: f64 = weights.iter().map(|w| w * w).sum();
    let c = mean_degree * n as f64 / (total * total - squares);
    let ids: Vec<AirportId> = (0..n)
        .map(|i| AirportId::new(&format!("N{i:04}")).unwrap())
        .collect();
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() >= (c * weights[i] * weights[j]).min(1.0) {
                continue;
            }
            if rng.random_bool(two_way) {
                arcs.push((ids[i].clone(), ids[j].clone()));
                arcs.push((ids[j].clone(), ids[i].clone()));
            } else if rng.random_bool(0.5) {
                arcs.push((ids[i].clone(), ids[j].clone()));
            } else {
                arcs.push((ids[j].clone(), ids[i].clone()));
            }
        }
    }
    GraphSnapshot::new(PeriodLabel::new(2000, Half::H1), ids, arcs).map_err(|e| e.to_string())
}

/// Topology summary of a random network plus its log-binned degree
/// distribution and the two-regime power-law fit to it.
pub fn network_stats(n: usize, mean_degree: f64, gamma: f64, two_way: f64, seed: u64) -> DemoResult {
    let g = random_network(n, mean_degree, gamma, two_way, seed)?;
    let dist =
        degree_distribution(&g, Binning::log(1.5).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let fit = fit_two_regime_power_law(&dist).ok();
    let paths = shortest_path_stats(&g).ok();
    Ok(json!({
        "nodes": g.node_count(),
        "arcs": g.arc_count(),
        "edges": g.undirected().edge_count(),
        "mean_degree": g.mean_degree(),
        "reciprocity": reciprocity(&g).ok().map(|r| r.r),
        "clustering": clustering(&g, LowDegreeClustering::Zero).mean,
        "mean_path_length": paths.as_ref().map(|p| p.mean_length),
        "diameter": paths.as_ref().map(|p| p.diameter),
        "largest_component": paths.as_ref().and_then(|p| p.component_sizes.first().copied()),
        "distribution": dist.entries.iter().map(|e| [e.x, e.p]).collect::<Vec<_>>(),
        "fit": fit.map(|f| f.block()),
    }))
}

/// Parses `x,y` or whitespace-separated pairs, one per line; `#` starts a
/// comment.
pub fn parse_points(text: &str) -> Result<Vec<(f64, f64)>, String> {
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let [x, y] = fields[..] else {
            return Err(format!("line {}: expected two numbers", lineno + 1));
        };
        let parse = |f: &str| {
            f.parse::<f64>()
                .map_err(|_| format!("line {}: not a number: {f}", lineno + 1))
        };
        points.push((parse(x)?, parse(y)?));
    }
    Ok(points)
}

/// Fits `y = A exp(x / s) + c` to the pasted points and samples the curve
/// across their range.
pub fn exponential_explorer(text: &str) -> DemoResult {
    let points = parse_points(text)?;
    let fit = fit_exponential(&points).map_err(|e| e.to_string())?;
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.0), hi.max(p.0))
        });
    let curve: Vec<[f64; 2]> = (0..=100)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / 100.0;
            [x, fit.eval(x)]
        })
        .collect();
    Ok(json!({
        "points": points.iter().map(|p| [p.0, p.1]).collect::<Vec<_>>(),
        "fit": fit.block(),
        "curve": curve,
    }))
}

/// Seasonal pattern used by the synthetic monthly series.
pub const DEMO_INDICES: [f64; 12] = [
    0.92, 0.88, 0.97, 1.00, 1.02, 1.03, 1.10, 1.12, 0.98, 1.03, 0.96, 0.99,
];

/// Decomposes 48 synthetic months of `exp(rate t)` times a fixed seasonal
/// pattern and log-normal noise, with month `dip` (if any) scaled by
/// `dip_factor`.
pub fn seasonal_explorer(
    rate: f64,
    noise: f64,
    dip: Option<usize>,
    dip_factor: f64,
    seed: u64,
) -> DemoResult {
    if !(0.0..=0.5).contains(&noise) {
        return Err("noise must lie in [0, 0.5]".into());
    }
    if dip_factor.is_nan() || dip_factor <= 0.0 {
        return Err("dip factor must be positive".into());
    }
    if !rate.is_finite() || rate.abs() > 0.5 {
        return Err("monthly rate must lie in [-0.5, 0.5]".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<(Date, f64)> = (0..48)
        .map(|t| {
            // Box-Muller draw; only needed for this demo.
            let (u1, u2): (f64, f64) = (1.0 - rng.random::<f64>(), rng.random());
            let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
            let v = 1000.0 * (rate * t as f64).exp() * DEMO_INDICES[t % 12] * (noise * z).exp();
            (Date::month(2000 + (t / 12) as i32, (t % 12 + 1) as u8), v)
        })
        .collect();
    if let Some(k) = dip {
        let Some(point) = points.get_mut(k) else {
            return Err("dip month must be below 48".into());
        };
        point.1 *= dip_factor;
    }
    let d = seasonal_decompose(&TimeSeries::new(points.clone())).map_err(|e| e.to_string())?;
    let growth = fit_exponential_growth(&d.trend_series().time_axis()).map_err(|e| e.to_string())?;
    let outliers: Vec<usize> = (0..points.len())
        .filter(|&t| d.outliers.contains(&points[t].0))
        .collect();
    Ok(json!({
        "observed": points.iter().map(|p| p.1).collect::<Vec<_>>(),
        "trend": d.trend,
        "indices": d.indices,
        "true_indices": DEMO_INDICES,
        "outliers": outliers,
        "growth": growth.block(),
    }))
}

fn to_js(result: DemoResult) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

#[wasm_bindgen(js_name = networkStats)]
pub fn network_stats_js(n: usize, mean_degree: f64, gamma: f64, two_way: f64, seed: u32) -> String {
    to_js(network_stats(n, mean_degree, gamma, two_way, seed.into()))
}

#[wasm_bindgen(js_name = exponentialExplorer)]
pub fn exponential_explorer_js(text: &str) -> String {
    to_js(exponential_explorer(text))
}

/// A negative `dip` means no dip.
#[wasm_bindgen(js_name = seasonalExplorer)]
pub fn seasonal_explorer_js(rate: f64, noise: f64, dip: i32, dip_factor: f64, seed: u32) -> String {
    to_js(seasonal_explorer(
        rate,
        noise,
        usize::try_from(dip).ok(),
        dip_factor,
        seed.into(),
    ))
}
