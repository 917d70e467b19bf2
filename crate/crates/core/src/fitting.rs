//! Parameter estimation for the functional forms used across the analyses:
//! two-regime power law, exponential with offset, pure power law, straight
//! line and exponential growth.
//!
//! Log-linear forms are fitted by ordinary least squares in log space. The
//! exponential-with-offset form has no linearisation and goes through a
//! damped Gauss-Newton (Levenberg-Marquardt) iteration.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::DistributionTable;

/// Serialisable summary shared by every fit type.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitBlock {
    pub model: &'static str,
    pub parameters: BTreeMap<&'static str, f64>,
    pub goodness_of_fit: BTreeMap<&'static str, f64>,
    pub n_points: usize,
}

pub trait Fit {
    fn block(&self) -> FitBlock;
}

fn block<const P: usize, const G: usize>(
    model: &'static str,
    parameters: [(&'static str, f64); P],
    goodness: [(&'static str, f64); G],
    n_points: usize,
) -> FitBlock {
    FitBlock {
        model,
        parameters: parameters.into_iter().collect(),
        goodness_of_fit: goodness.into_iter().collect(),
        n_points,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub pearson_r: f64,
    pub n_points: usize,
}

impl Fit for LinearFit {
    fn block(&self) -> FitBlock {
        block(
            "linear",
            [("slope", self.slope), ("intercept", self.intercept)],
            [("pearson_r", self.pearson_r)],
            self.n_points,
        )
    }
}

/// `y = prefactor * x^exponent`, fitted on `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerFit {
    pub prefactor: f64,
    pub exponent: f64,
    pub r2: f64,
    pub n_points: usize,
}

impl Fit for PowerFit {
    fn block(&self) -> FitBlock {
        block(
            "power",
            [("prefactor", self.prefactor), ("exponent", self.exponent)],
            [("r2", self.r2)],
            self.n_points,
        )
    }
}

/// `y = amplitude * exp(x / scale) + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentialFit {
    pub amplitude: f64,
    pub scale: f64,
    pub offset: f64,
    pub rmse: f64,
    pub sse: f64,
    pub iterations: usize,
    pub n_points: usize,
}

impl ExponentialFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.amplitude * (x / self.scale).exp() + self.offset
    }
}

impl Fit for ExponentialFit {
    fn block(&self) -> FitBlock {
        block(
            "exponential",
            [
                ("amplitude", self.amplitude),
                ("scale", self.scale),
                ("offset", self.offset),
            ],
            [("rmse", self.rmse), ("sse", self.sse)],
            self.n_points,
        )
    }
}

/// Two straight lines in log-log space meeting at a shared breakpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoRegimeFit {
    pub lambda1: f64,
    pub lambda2: f64,
    pub intercept1: f64,
    pub intercept2: f64,
    pub k_break: f64,
    pub sse: f64,
    pub n_points: usize,
    /// `(candidate breakpoint, total sse)` for every scanned candidate.
    #[serde(skip)]
    pub candidates: Vec<(f64, f64)>,
}

impl Fit for TwoRegimeFit {
    fn block(&self) -> FitBlock {
        block(
            "two_regime_power_law",
            [
                ("lambda1", self.lambda1),
                ("lambda2", self.lambda2),
                ("intercept1", self.intercept1),
                ("intercept2", self.intercept2),
                ("k_break", self.k_break),
            ],
            [("sse", self.sse)],
            self.n_points,
        )
    }
}

/// `T(t) = level * exp(rate * t)`, `t` measured from the epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthFit {
    pub level: f64,
    pub rate: f64,
    /// Root-mean-square residual of `ln T`.
    pub rmse_log: f64,
    pub n_points: usize,
}

impl Fit for GrowthFit {
    fn block(&self) -> FitBlock {
        block(
            "exponential_growth",
            [("level", self.level), ("rate", self.rate)],
            [("rmse_log", self.rmse_log)],
            self.n_points,
        )
    }
}

struct Ols {
    slope: f64,
    intercept: f64,
    sxx: f64,
    sxy: f64,
    syy: f64,
    sse: f64,
}

/// Least squares on centred sums. Callers guarantee `xs.len() >= 2`.
fn ols(xs: &[f64], ys: &[f64]) -> Ols {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    Ols {
        slope,
        intercept,
        sxx,
        sxy,
        syy,
        sse,
    }
}

fn check_finite(points: &[(f64, f64)]) -> Result<()> {
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Domain("non-finite value in fit input".into()));
    }
    Ok(())
}

fn check_positive(points: &[(f64, f64)]) -> Result<()> {
    if let Some((x, y)) = points.iter().find(|(x, y)| *x <= 0.0 || *y <= 0.0) {
        return Err(Error::Domain(format!(
            "log-space fit needs positive values, got ({x}, {y})"
        )));
    }
    Ok(())
}

/// Ordinary least squares `y = slope * x + intercept` with Pearson r.
/// Constant `y` yields slope 0 and r 0.
pub fn fit_linear(points: &[(f64, f64)]) -> Result<LinearFit> {
    if points.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: points.len(),
        });
    }
    check_finite(points)?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    let fit = ols(&xs, &ys);
    if fit.sxx <= 0.0 {
        return Err(Error::Degenerate("x has zero variance".into()));
    }
    let pearson_r = if fit.syy > 0.0 {
        (fit.sxy / (fit.sxx * fit.syy).sqrt()).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    Ok(LinearFit {
        slope: fit.slope,
        intercept: fit.intercept,
        pearson_r,
        n_points: points.len(),
    })
}

pub fn fit_power(points: &[(f64, f64)]) -> Result<PowerFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: points.len(),
        });
    }
    check_finite(points)?;
    check_positive(points)?;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let fit = ols(&xs, &ys);
    if fit.sxx <= 0.0 {
        return Err(Error::Degenerate("x has a single distinct value".into()));
    }
    let r2 = if fit.syy > 0.0 {
        1.0 - fit.sse / fit.syy
    } else {
        1.0
    };
    Ok(PowerFit {
        prefactor: fit.intercept.exp(),
        exponent: fit.slope,
        r2,
        n_points: points.len(),
    })
}

/// Log-linear growth fit on `(t, value)` points; `t = 0` is the epoch.
pub fn fit_exponential_growth(points: &[(f64, f64)]) -> Result<GrowthFit> {
    if points.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: points.len(),
        });
    }
    check_finite(points)?;
    if let Some((t, v)) = points.iter().find(|(_, v)| *v <= 0.0) {
        return Err(Error::Domain(format!(
            "growth fit needs positive observations, got {v} at t={t}"
        )));
    }
    let ts: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let fit = ols(&ts, &ys);
    if fit.sxx <= 0.0 {
        return Err(Error::Degenerate("all observations share one date".into()));
    }
    Ok(GrowthFit {
        level: fit.intercept.exp(),
        rate: fit.slope,
        rmse_log: (fit.sse / points.len() as f64).sqrt(),
        n_points: points.len(),
    })
}

/// Scans every interior breakpoint of a log-log distribution and keeps the
/// one with the smallest total squared error. The breakpoint belongs to
/// both segments, each segment has at least three points, and ties go to
/// the smaller breakpoint.
pub fn fit_two_regime_power_law(dist: &DistributionTable) -> Result<TwoRegimeFit> {
    let points: Vec<(f64, f64)> = dist.entries.iter().map(|e| (e.x, e.p)).collect();
    fit_two_regime_points(&points)
}

pub fn fit_two_regime_points(points: &[(f64, f64)]) -> Result<TwoRegimeFit> {
    if points.len() < 6 {
        return Err(Error::InsufficientData {
            needed: 6,
            got: points.len(),
        });
    }
    check_finite(points)?;
    check_positive(points)?;
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Domain("duplicate x in two-regime fit input".into()));
    }
    let lx: Vec<f64> = sorted.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = sorted.iter().map(|p| p.1.ln()).collect();
    let n = sorted.len();

    // SSE differences below rounding noise of the total sum of squares are ties.
    let mean_ly = ly.iter().sum::<f64>() / n as f64;
    let tie = 1e-12 * ly.iter().map(|v| (v - mean_ly).powi(2)).sum::<f64>();
    let mut best: Option<(usize, Ols, Ols, f64)> = None;
    let mut candidates = Vec::with_capacity(n - 4);
    for b in 2..=n - 3 {
        let left = ols(&lx[..=b], &ly[..=b]);
        let right = ols(&lx[b..], &ly[b..]);
        let sse = left.sse + right.sse;
        candidates.push((sorted[b].0, sse));
        if best.as_ref().is_none_or(|(_, _, _, s)| sse < *s - tie) {
            best = Some((b, left, right, sse));
        }
    }
    let (b, left, right, sse) = best.expect("at least one candidate for n >= 6");
    Ok(TwoRegimeFit {
        lambda1: left.slope,
        lambda2: right.slope,
        intercept1: left.intercept,
        intercept2: right.intercept,
        k_break: sorted[b].0,
        sse,
        n_points: n,
        candidates,
    })
}

const MAX_ITERATIONS: usize = 500;
const REL_TOLERANCE: f64 = 1e-10;

/// Linear-interpolated quantile of an already sorted slice.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn exp_sse(points: &[(f64, f64)], p: [f64; 3]) -> f64 {
    points
        .iter()
        .map(|&(x, y)| {
            let r = y - (p[0] * (x / p[1]).exp() + p[2]);
            r * r
        })
        .sum()
}

/// Solves a 3x3 symmetric system by Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn exp_initial_guess(points: &[(f64, f64)]) -> Result<[f64; 3]> {
    let mut ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    ys.sort_by(f64::total_cmp);
    let (y_min, y_max) = (ys[0], ys[ys.len() - 1]);
    let range = y_max - y_min;
    if range <= 0.0 {
        return Err(Error::Degenerate("flat data has no exponential signal".into()));
    }
    let x_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let offset = y_min - 0.05 * range;
    let y_q1 = quantile(&ys, 0.25);
    let ratio = ((y_max - offset) / (y_q1 - offset)).ln();
    if ratio <= 0.0 || !ratio.is_finite() {
        return Err(Error::Degenerate(
            "upper three quarters of the data are flat".into(),
        ));
    }
    let scale = (x_max - x_min) / ratio;
    let amplitude = (y_max - offset) / (x_max / scale).exp();
    Ok([amplitude, scale, offset])
}

/// Fits `y = A e^{x/t1} + y0` by Levenberg-Marquardt.
///
/// Accepted steps never increase the squared error. Iteration stops when an
/// accepted step changes the error by less than 1e-10 relative, or when no
/// damping level yields an improving step.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<ExponentialFit> {
    if points.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: points.len(),
        });
    }
    check_finite(points)?;
    let x_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if x_max <= x_min {
        return Err(Error::Degenerate("x has zero spread".into()));
    }

    let mut p = exp_initial_guess(points)?;
    let mut sse = exp_sse(points, p);
    if !sse.is_finite() {
        return Err(Error::Degenerate("initial guess overflows".into()));
    }
    let mut lambda = 1e-3;
    let n = points.len();
    let finish = |p: [f64; 3], sse: f64, iterations: usize| ExponentialFit {
        amplitude: p[0],
        scale: p[1],
        offset: p[2],
        rmse: (sse / n as f64).sqrt(),
        sse,
        iterations,
        n_points: n,
    };

    for iter in 1..=MAX_ITERATIONS {
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for &(x, y) in points {
            let e = (x / p[1]).exp();
            let r = y - (p[0] * e + p[2]);
            let j = [e, -p[0] * x * e / (p[1] * p[1]), 1.0];
            for a in 0..3 {
                jtr[a] += j[a] * r;
                for b in 0..3 {
                    jtj[a][b] += j[a] * j[b];
                }
            }
        }

        let mut accepted = None;
        while lambda < 1e16 {
            let mut damped = jtj;
            for (a, row) in damped.iter_mut().enumerate() {
                row[a] += lambda * jtj[a][a].max(1e-12);
            }
            if let Some(step) = solve3(damped, jtr) {
                let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
                if trial[1] != 0.0 {
                    let trial_sse = exp_sse(points, trial);
                    if trial_sse.is_finite() && trial_sse <= sse {
                        accepted = Some((trial, trial_sse));
                        lambda = (lambda / 10.0).max(1e-12);
                        break;
                    }
                }
            }
            lambda *= 10.0;
        }

        let Some((trial, trial_sse)) = accepted else {
            return Ok(finish(p, sse, iter));
        };
        debug_assert!(trial_sse <= sse);
        let rel = if sse > 0.0 { (sse - trial_sse) / sse } else { 0.0 };
        p = trial;
        sse = trial_sse;
        if sse == 0.0 || rel < REL_TOLERANCE {
            return Ok(finish(p, sse, iter));
        }
    }
    Err(Error::FitFailed {
        iterations: MAX_ITERATIONS,
        best: Box::new(finish(p, sse, MAX_ITERATIONS)),
    })
}
