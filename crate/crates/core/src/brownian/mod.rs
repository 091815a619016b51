//! Brownian paths and bridges, sojourn times and survival statistics.
//!
//! Normalization: each coordinate increment over `dt` is `N(0, 2·dt)`, i.e.
//! the generator is `Δ`. Survival in a domain `D` then decays at rate
//! `λ₁(D)` of the plain Dirichlet Laplacian.

mod estimate;
mod thinness;

pub use estimate::{exp_moment, survival_probability, walk_sojourn, SojournStats, Walk};
pub(crate) use estimate::{steps_for, walks};
pub use thinness::{thinness_test, MarkovCheck, ThinnessReport, ThinnessRow, MAX_START_POINTS};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::geometry::{PathSample, Point2, RasterSet};
use crate::rng::RngSpec;

/// Per-coordinate variance of an increment over unit time.
pub const DIFFUSIVITY: f64 = 2.0;

#[inline]
pub(crate) fn gaussian_step<R: Rng + ?Sized>(rng: &mut R, sd: f64) -> Point2 {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    Point2::new(sd * x, sd * y)
}

/// Sample times `0, dt, 2dt, …, t_end`; the last step is shortened when
/// `dt` does not divide `t_end`.
pub fn time_grid(t_end: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return invalid(format!("time horizon must be positive, got {t_end}"));
    }
    if !(dt > 0.0 && dt <= t_end) {
        return invalid(format!("time step must lie in (0, {t_end}], got {dt}"));
    }
    let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    let mut times: Vec<f64> = (0..steps).map(|k| k as f64 * dt).collect();
    times.push(t_end);
    Ok(times)
}

/// Brownian path from `x0` on `[0, t_end]`.
pub fn sample_path(rng: &RngSpec, x0: Point2, t_end: f64, dt: f64) -> Result<PathSample> {
    let times = time_grid(t_end, dt)?;
    let mut g = rng.rng();
    let mut points = Vec::with_capacity(times.len());
    points.push(x0);
    let mut x = x0;
    for w in times.windows(2) {
        x = x + gaussian_step(&mut g, (DIFFUSIVITY * (w[1] - w[0])).sqrt());
        points.push(x);
    }
    PathSample::new(times, points)
}

/// Brownian bridge from `x0` at time 0 to `b` at time `t_end`.
pub fn sample_bridge(rng: &RngSpec, x0: Point2, b: Point2, t_end: f64, dt: f64) -> Result<PathSample> {
    let times = time_grid(t_end, dt)?;
    sample_bridge_on_grid(rng, x0, b, &times)
}

/// Brownian bridge pinned to `x0` at `times[0]` and to `b` at the last time,
/// sampled on an arbitrary increasing grid by sequential conditioning:
/// given `X(t_k)`, the next value is Gaussian with mean
/// `X(t_k) + (t_{k+1}−t_k)/(T−t_k)·(b − X(t_k))` and per-coordinate variance
/// `2(t_{k+1}−t_k)(T−t_{k+1})/(T−t_k)`. Both endpoints are exact.
pub fn sample_bridge_on_grid(rng: &RngSpec, x0: Point2, b: Point2, times: &[f64]) -> Result<PathSample> {
    if times.len() < 2 {
        return invalid("bridge grid needs at least two times");
    }
    let t_end = times[times.len() - 1];
    let mut g = rng.rng();
    let mut points = Vec::with_capacity(times.len());
    points.push(x0);
    let mut x = x0;
    for k in 0..times.len() - 1 {
        let (t, s) = (times[k], times[k + 1]);
        if k + 2 == times.len() {
            points.push(b);
            break;
        }
        let rest = t_end - t;
        let w = (s - t) / rest;
        let var = DIFFUSIVITY * (s - t) * (t_end - s) / rest;
        x = x.lerp(b, w) + gaussian_step(&mut g, var.sqrt());
        points.push(x);
    }
    PathSample::new(times.to_vec(), points)
}

/// Discrete sojourn time: `t_k − t_0` for the last index `k` such that all
/// samples `0..=k` lie in occupied cells; `0` when the first sample is
/// already outside.
pub fn sojourn_time(path: &PathSample, set: &RasterSet) -> f64 {
    let pts = path.points();
    let inside = pts.iter().take_while(|&&p| set.contains(p)).count();
    if inside == 0 {
        return 0.0;
    }
    path.times()[inside - 1] - path.start_time()
}
