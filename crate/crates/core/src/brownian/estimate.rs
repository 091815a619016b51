use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{gaussian_step, DIFFUSIVITY};
use crate::error::{invalid, Result};
use crate::geometry::{Point2, RasterSet};
use crate::rng::RngSpec;
use crate::stats::Z95;

/// Outcome of one walk: how many steps of size `dt` it stayed inside, and
/// whether it left before the step budget ran out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Walk {
    pub steps_inside: usize,
    pub exited: bool,
}

/// Runs a Brownian skeleton with step `dt` from `x0` until its first sample
/// outside `set` or until `max_steps` steps have been taken.
///
/// Consumes the generator exactly like [`super::sample_path`], so for the
/// same spec `steps_inside · dt` equals the sojourn time of the sampled path.
pub fn walk_sojourn(spec: &RngSpec, x0: Point2, set: &RasterSet, dt: f64, max_steps: usize) -> Walk {
    if !set.contains(x0) {
        return Walk { steps_inside: 0, exited: true };
    }
    let mut rng = spec.rng();
    let sd = (DIFFUSIVITY * dt).sqrt();
    let mut x = x0;
    for k in 1..=max_steps {
        x = x + gaussian_step(&mut rng, sd);
        if !set.contains(x) {
            return Walk { steps_inside: k - 1, exited: true };
        }
    }
    Walk { steps_inside: max_steps, exited: false }
}

pub(crate) fn steps_for(t: f64, dt: f64) -> usize {
    ((t / dt) - 1e-9).ceil().max(0.0) as usize
}

/// Runs `n` independent walks; replica `i` uses `spec.replica(i)`.
pub(crate) fn walks(spec: &RngSpec, x0: Point2, set: &RasterSet, dt: f64, max_steps: usize, n: usize) -> Vec<Walk> {
    (0..n as u64).into_par_iter().map(|i| walk_sojourn(&spec.replica(i), x0, set, dt, max_steps)).collect()
}

/// Monte Carlo summary of sojourn times from one starting point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SojournStats {
    pub n: usize,
    pub threshold_t: f64,
    /// Walks with sojourn time at least `threshold_t`.
    pub survive: usize,
    pub p_hat: f64,
    /// 95% normal-approximation half width for `p_hat`.
    pub ci_half_width: f64,
    pub exp_moment_hat: Option<f64>,
    pub exp_moment_ci: Option<f64>,
    /// Walks still inside at the time cap.
    pub truncated: usize,
    /// More than 1% of walks hit the time cap, so the exponential moment is
    /// probably infinite.
    pub divergence_suspect: bool,
}

impl SojournStats {
    pub(crate) fn from_survivors(n: usize, threshold_t: f64, survive: usize) -> Self {
        let p = survive as f64 / n as f64;
        Self {
            n,
            threshold_t,
            survive,
            p_hat: p,
            ci_half_width: Z95 * (p * (1.0 - p) / n as f64).sqrt(),
            exp_moment_hat: None,
            exp_moment_ci: None,
            truncated: 0,
            divergence_suspect: false,
        }
    }

    /// Standard error of `p_hat`.
    pub fn sigma(&self) -> f64 {
        self.ci_half_width / Z95
    }

    pub const CSV_HEADER: &'static str = "eps,t,x0x,x0y,n,p_hat,ci,flag";

    pub fn csv_row(&self, eps: f64, x0: Point2, flag: &str) -> String {
        format!("{eps},{},{},{},{},{},{},{flag}", self.threshold_t, x0.x, x0.y, self.n, self.p_hat, self.ci_half_width)
    }
}

/// Estimates `P^{x0}(T_set ≥ t)` from `n ≥ 100` walks.
pub fn survival_probability(
    rng: &RngSpec,
    x0: Point2,
    set: &RasterSet,
    t: f64,
    n: usize,
    dt: f64,
) -> Result<SojournStats> {
    if n < 100 {
        return invalid(format!("need at least 100 walks, got {n}"));
    }
    if !(t >= 0.0 && dt > 0.0) {
        return invalid(format!("invalid time {t} or step {dt}"));
    }
    let m = steps_for(t, dt);
    let survive = walks(rng, x0, set, dt, m, n).iter().filter(|w| !w.exited).count();
    Ok(SojournStats::from_survivors(n, t, survive))
}

/// Estimates `E^{x0}[exp(λ·min(T_set, t_cap))]`.
///
/// The expectation is infinite once `λ ≥ λ₁(set)`; walks reaching the cap
/// are counted in `truncated` and flag the estimate as divergence-suspect
/// when they exceed 1%.
pub fn exp_moment(
    rng: &RngSpec,
    x0: Point2,
    set: &RasterSet,
    lambda: f64,
    n: usize,
    dt: f64,
    t_cap: f64,
) -> Result<SojournStats> {
    if !(lambda >= 0.0) {
        return invalid(format!("lambda must be non-negative, got {lambda}"));
    }
    if !(t_cap.is_finite() && t_cap > 0.0 && dt > 0.0) {
        return invalid(format!("invalid cap {t_cap} or step {dt}"));
    }
    if n < 2 {
        return invalid("need at least two walks");
    }
    let m = steps_for(t_cap, dt);
    let ws = walks(rng, x0, set, dt, m, n);
    let values: Vec<f64> = ws.iter().map(|w| (lambda * (w.steps_inside as f64 * dt).min(t_cap)).exp()).collect();
    let truncated = ws.iter().filter(|w| !w.exited).count();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    let mut stats = SojournStats::from_survivors(n, t_cap, truncated);
    stats.exp_moment_hat = Some(mean);
    stats.exp_moment_ci = Some(Z95 * (var / n as f64).sqrt());
    stats.truncated = truncated;
    stats.divergence_suspect = truncated as f64 > 0.01 * n as f64;
    Ok(stats)
}
