use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::ScalarField;
use super::operator::{dot, norm, Laplacian};
use crate::brownian::{steps_for, walks};
use crate::error::{invalid, Error, Result};
use crate::geometry::{components4, Point2, RasterSet};
use crate::rng::RngSpec;
use crate::stats;

/// Default relative eigenvalue change at which inverse iteration stops.
pub const DEFAULT_TOL: f64 = 1e-9;

const MAX_OUTER: usize = 500;
const INNER_TOL: f64 = 1e-10;
const BOOTSTRAP: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Grid,
    Stochastic,
    Certificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub lambda1: f64,
    pub method: Method,
    pub h: f64,
    /// Eigenvalue of each 4-connected component, in label order.
    pub components: Vec<f64>,
    /// 95% bootstrap interval, stochastic estimates only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci: Option<[f64; 2]>,
    /// Ground state of every component, each scaled to maximum 1.
    #[serde(skip)]
    pub eigenfunction: Option<ScalarField>,
}

/// Smallest eigenvalue of `−Δ_h` with zero exterior on every 4-component of
/// `domain`, by inverse power iteration with conjugate-gradient inner solves.
/// Stops when the Rayleigh quotient changes by less than `tol` (relative).
pub fn lambda1_grid(domain: &RasterSet, tol: f64) -> Result<EigenResult> {
    if domain.is_empty() {
        return Err(Error::EmptySet);
    }
    if !(tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    let comps = components4(domain);
    let solved: Vec<(Laplacian, f64, Vec<f64>)> = comps
        .members
        .par_iter()
        .map(|m| {
            let op = Laplacian::new(domain, m);
            let (lambda, v) = ground_state(&op, tol)?;
            Ok((op, lambda, v))
        })
        .collect::<Result<_>>()?;
    let mut values = vec![0.0; domain.grid().len()];
    for (op, _, v) in &solved {
        for (&k, &x) in op.cells.iter().zip(v) {
            values[k] = x;
        }
    }
    let components: Vec<f64> = solved.iter().map(|s| s.1).collect();
    let lambda1 = components.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(EigenResult {
        lambda1,
        method: Method::Grid,
        h: domain.h(),
        components,
        ci: None,
        eigenfunction: Some(ScalarField::new(domain.clone(), values, 0.0)?),
    })
}

fn rayleigh(op: &Laplacian, v: &[f64], av: &mut [f64]) -> f64 {
    op.apply(v, av, 0.0);
    dot(v, av) / dot(v, v)
}

pub(crate) fn ground_state(op: &Laplacian, tol: f64) -> Result<(f64, Vec<f64>)> {
    let n = op.len();
    let cap = 20 * n + 1000;
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut av = vec![0.0; n];
    let mut lambda = rayleigh(op, &v, &mut av);
    let mut w = vec![0.0; n];
    for _ in 0..MAX_OUTER {
        for k in 0..n {
            w[k] = v[k] / lambda;
        }
        op.solve(&v, &mut w, 0.0, INNER_TOL, cap)?;
        let s = norm(&w);
        for k in 0..n {
            v[k] = w[k] / s;
        }
        let next = rayleigh(op, &v, &mut av);
        let done = (next - lambda).abs() <= tol * next;
        lambda = next;
        if done {
            let top = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let bottom = v.iter().copied().fold(f64::INFINITY, f64::min);
            let scale = if top.abs() >= bottom.abs() { top } else { bottom };
            v.iter_mut().for_each(|x| *x /= scale);
            return Ok((lambda, v));
        }
    }
    let residual = av.iter().zip(&v).map(|(a, x)| (a - lambda * x).powi(2)).sum::<f64>().sqrt() / lambda;
    Err(Error::NoConvergence { iterations: MAX_OUTER, residual })
}

/// Decay rate of Brownian survival in `domain`: least-squares slope of
/// `−log P(T > t)` over the tail half of `t_grid`, pooled over `x0s`, with a
/// 95% bootstrap interval over paths.
pub fn lambda1_stochastic(
    rng: &RngSpec,
    domain: &RasterSet,
    x0s: &[Point2],
    t_grid: &[f64],
    n: usize,
    dt: f64,
) -> Result<EigenResult> {
    if domain.is_empty() {
        return Err(Error::EmptySet);
    }
    if domain.touches_frame() {
        return invalid("domain has no exterior inside its bounding box");
    }
    if x0s.is_empty() || x0s.iter().any(|&x| !domain.contains(x)) {
        return invalid("starting points must lie in the domain");
    }
    if t_grid.len() < 2 || t_grid[0] <= 0.0 || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("t_grid must be positive and strictly increasing");
    }
    let (t_min, t_max) = (t_grid[0], t_grid[t_grid.len() - 1]);
    if t_max < 4.0 * t_min {
        return invalid("t_grid must span at least a factor 4");
    }
    if n < 100 || !(dt > 0.0 && dt <= t_min) {
        return invalid(format!("need n >= 100 and 0 < dt <= {t_min}"));
    }
    let m = steps_for(t_max, dt);
    let steps: Vec<Vec<usize>> = x0s
        .iter()
        .enumerate()
        .map(|(s, &x0)| walks(&rng.fork(s as u64), x0, domain, dt, m, n).into_iter().map(|w| w.steps_inside).collect())
        .collect();
    let thresholds: Vec<usize> = t_grid.iter().map(|&t| steps_for(t, dt)).collect();
    if survivors(&steps, &thresholds[1..2])[0] == 0 {
        return Err(Error::TGridTooCoarse);
    }
    let tail = t_grid.len() / 2;
    let lambda1 = decay_rate(&t_grid[tail..], &survivors(&steps, &thresholds[tail..])).ok_or(Error::TGridTooCoarse)?;

    let mut boot_rng = rng.fork(u64::MAX).rng();
    let mut rates = Vec::with_capacity(BOOTSTRAP);
    let mut resampled = steps.clone();
    for _ in 0..BOOTSTRAP {
        for (src, dst) in steps.iter().zip(resampled.iter_mut()) {
            for d in dst.iter_mut() {
                *d = src[boot_rng.random_range(0..src.len())];
            }
        }
        if let Some(r) = decay_rate(&t_grid[tail..], &survivors(&resampled, &thresholds[tail..])) {
            rates.push(r);
        }
    }
    rates.sort_by(f64::total_cmp);
    let ci = (rates.len() >= 2).then(|| [stats::quantile(&rates, 0.025), stats::quantile(&rates, 0.975)]);
    Ok(EigenResult {
        lambda1,
        method: Method::Stochastic,
        h: domain.h(),
        components: vec![lambda1],
        ci,
        eigenfunction: None,
    })
}

fn survivors(steps: &[Vec<usize>], thresholds: &[usize]) -> Vec<usize> {
    thresholds.iter().map(|&k| steps.iter().flatten().filter(|&&s| s >= k).count()).collect()
}

fn decay_rate(times: &[f64], counts: &[usize]) -> Option<f64> {
    let (t, y): (Vec<f64>, Vec<f64>) =
        times.iter().zip(counts).filter(|(_, &c)| c > 0).map(|(&t, &c)| (t, (c as f64).ln())).unzip();
    (t.len() >= 2).then(|| -stats::linear_fit(&t, &y).0)
}
