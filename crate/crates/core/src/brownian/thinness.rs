use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estimate::{steps_for, walks};
use super::SojournStats;
use crate::error::{invalid, Error, Result};
use crate::geometry::{dilate, Point2, RasterSet};
use crate::rng::RngSpec;

/// Starting points are all occupied cells of `Λ` up to this many, otherwise
/// this many cells drawn uniformly without replacement.
pub const MAX_START_POINTS: usize = 1000;

/// Survival statistics in `Λ^ε` for one `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThinnessRow {
    pub eps: f64,
    /// Largest `p_hat` over the starting points.
    pub sup_p_hat: f64,
    /// CI half width at the maximizing point.
    pub sup_ci: f64,
    pub argmax: Point2,
    pub pass: bool,
    pub per_start: Vec<(Point2, SojournStats)>,
}

/// Check of `P^x(T > kt) ≤ δ̂^k` within `3σ` at the passing `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovCheck {
    pub k: usize,
    pub eps: f64,
    pub delta_hat: f64,
    /// Largest `p_hat(kt)` over the starting points.
    pub sup_p_hat: f64,
    /// `max_x (p_hat_k(x) − δ̂^k − 3σ)`; non-positive when the check holds.
    pub worst_excess: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThinnessReport {
    pub t: f64,
    pub delta: f64,
    pub starts: usize,
    pub rows: Vec<ThinnessRow>,
    /// First `ε` of the schedule that passed.
    pub pass_eps: Option<f64>,
    pub markov: Vec<MarkovCheck>,
}

impl ThinnessReport {
    pub fn passed(&self) -> bool {
        self.pass_eps.is_some()
    }

    /// One CSV line per `(ε, start)`, flag `pass`/`fail` for the row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SojournStats::CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let flag = if row.pass { "pass" } else { "fail" };
            for (x0, s) in &row.per_start {
                out.push_str(&s.csv_row(row.eps, *x0, flag));
                out.push('\n');
            }
        }
        out
    }
}

fn start_points(rng: &RngSpec, set: &RasterSet) -> Vec<Point2> {
    let centers = set.occupied_centers();
    if centers.len() <= MAX_START_POINTS {
        return centers;
    }
    let mut g = rng.rng();
    let mut picks = index::sample(&mut g, centers.len(), MAX_START_POINTS).into_vec();
    picks.sort_unstable();
    picks.into_iter().map(|i| centers[i]).collect()
}

fn survival_at_starts(
    spec: &RngSpec,
    starts: &[Point2],
    set: &RasterSet,
    t: f64,
    n: usize,
    dt: f64,
) -> Vec<(Point2, SojournStats)> {
    let m = steps_for(t, dt);
    starts
        .par_iter()
        .enumerate()
        .map(|(s, &x0)| {
            let ws = walks(&spec.replica(s as u64), x0, set, dt, m, n);
            let survive = ws.iter().filter(|w| !w.exited).count();
            (x0, SojournStats::from_survivors(n, t, survive))
        })
        .collect()
}

/// Quantitative thinness test: for each `ε` of a decreasing schedule,
/// estimates `sup_x P^x(T_{Λ^ε} > t)` over starting points in `Λ` and passes
/// at the first `ε` where the supremum plus its CI is at most `delta`.
///
/// At the passing `ε` the Markov iterate `P^x(T > kt) ≤ δ̂^k` is checked for
/// `k = 2, 3`, reusing the walks' random streams so that survival to `kt`
/// implies survival to `t` path by path.
pub fn thinness_test(
    rng: &RngSpec,
    lambda_set: &RasterSet,
    t: f64,
    delta: f64,
    eps_schedule: &[f64],
    n: usize,
    dt: f64,
) -> Result<ThinnessReport> {
    if lambda_set.is_empty() {
        return Err(Error::EmptySet);
    }
    if eps_schedule.is_empty() || eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
        return invalid("eps schedule must be non-empty and strictly decreasing");
    }
    if !(t > 0.0 && dt > 0.0 && dt <= t) {
        return invalid(format!("invalid time {t} or step {dt}"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return invalid(format!("delta must lie in (0, 1), got {delta}"));
    }
    if n < 100 {
        return invalid(format!("need at least 100 walks per start, got {n}"));
    }
    let starts = start_points(&rng.fork(0), lambda_set);
    let mut rows = Vec::with_capacity(eps_schedule.len());
    let mut pass_eps = None;
    let mut markov = Vec::new();
    for (e, &eps) in eps_schedule.iter().enumerate() {
        let dilated = dilate(lambda_set, eps)?;
        let spec = rng.fork(1 + e as u64);
        let per_start = survival_at_starts(&spec, &starts, &dilated, t, n, dt);
        let (argmax, best) = per_start
            .iter()
            .max_by(|a, b| a.1.p_hat.total_cmp(&b.1.p_hat))
            .map(|(x, s)| (*x, s.clone()))
            .expect("at least one start point");
        let pass = pass_eps.is_none() && best.p_hat + best.ci_half_width <= delta;
        if pass {
            pass_eps = Some(eps);
            for k in [2usize, 3] {
                let iterated = survival_at_starts(&spec, &starts, &dilated, k as f64 * t, n, dt);
                markov.push(markov_check(k, eps, &best, &iterated));
            }
        }
        rows.push(ThinnessRow { eps, sup_p_hat: best.p_hat, sup_ci: best.ci_half_width, argmax, pass, per_start });
        if pass {
            break;
        }
    }
    Ok(ThinnessReport { t, delta, starts: starts.len(), rows, pass_eps, markov })
}

fn markov_check(k: usize, eps: f64, base: &SojournStats, iterated: &[(Point2, SojournStats)]) -> MarkovCheck {
    let d = base.p_hat;
    let kf = k as f64;
    let bound = d.powi(k as i32);
    // uncertainty of δ̂^k by the delta method, combined with that of p_hat_k
    let sd_bound = kf * d.powi(k as i32 - 1) * base.sigma();
    let mut worst = f64::NEG_INFINITY;
    let mut sup = 0.0f64;
    for (_, s) in iterated {
        let sigma = (s.sigma().powi(2) + sd_bound * sd_bound).sqrt();
        worst = worst.max(s.p_hat - bound - 3.0 * sigma);
        sup = sup.max(s.p_hat);
    }
    MarkovCheck { k, eps, delta_hat: d, sup_p_hat: sup, worst_excess: worst, holds: worst <= 0.0 }
}
