use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::p0::tube_survival_pde;
use super::segment::{choose_tprime, renormalized_segment, window_grid};
use crate::brownian::{gaussian_step, sample_bridge_on_grid, DIFFUSIVITY};
use crate::error::{invalid, Error, Result};
use crate::geometry::{gamma0, gamma0_at, sup_distance, PathSample, Point2, RasterSet};
use crate::rng::RngSpec;

/// Parameters of one run of the cascade `T₀ = δ`, `T_n = F(γ(T_{n−1}), T_{n−1})`.
#[derive(Debug, Clone)]
pub struct RenormConfig {
    pub delta: f64,
    pub n_levels: usize,
    /// Radius of the closeness event `A_n`.
    pub tube_radius_close: f64,
    /// Radius of the tube event defining `p₀`.
    pub tube_radius_p0: f64,
    /// Window step relative to `T_n`; each window `[T_n, 2T_n]` gets
    /// `ceil(1/dt_rel)` steps.
    pub dt_rel: f64,
    pub k: RasterSet,
    pub x0: Point2,
    /// `p₀`; computed from `tube_radius_p0` by the PDE solver when absent.
    pub p0: Option<f64>,
    /// Replace `γ` on each window by `√T_n·γ₀(t/T_n)`.
    pub forced_success: bool,
}

impl RenormConfig {
    pub fn new(k: RasterSet, x0: Point2, delta: f64, n_levels: usize) -> Self {
        Self {
            delta,
            n_levels,
            tube_radius_close: 0.5,
            tube_radius_p0: 1.0 / 3.0,
            dt_rel: 1.0 / 256.0,
            k,
            x0,
            p0: None,
            forced_success: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return invalid(format!("delta must be positive, got {}", self.delta));
        }
        if self.n_levels == 0 {
            return invalid("need at least one level");
        }
        if !(self.tube_radius_p0 > 0.0 && self.tube_radius_p0 < self.tube_radius_close) {
            return invalid("need 0 < tube_radius_p0 < tube_radius_close");
        }
        if !(self.dt_rel > 0.0 && self.dt_rel <= 0.25) {
            return invalid(format!("dt_rel must lie in (0, 1/4], got {}", self.dt_rel));
        }
        if let Some(p) = self.p0 {
            if !(p > 0.0 && p < 1.0) {
                return invalid(format!("p0 must lie in (0, 1), got {p}"));
            }
        }
        if !self.k.contains(self.x0) && !near_occupied(&self.k, self.x0) {
            return invalid("x0 is not within one cell of K");
        }
        Ok(())
    }

    fn steps(&self) -> usize {
        // a multiple of 4 keeps the vertices of γ₀ on the window grid
        let m = (1.0 / self.dt_rel - 1e-9).ceil() as usize;
        m.div_ceil(4) * 4
    }

    /// `p₀` as given, or by the PDE at `h = radius/64`, `dt = h²/4`.
    pub fn resolve_p0(&self) -> Result<f64> {
        if let Some(p) = self.p0 {
            return Ok(p);
        }
        let h = self.tube_radius_p0 / 64.0;
        let p = tube_survival_pde(self.tube_radius_p0, h, h * h / 4.0)?.p();
        if !(p > 0.0) {
            return Err(Error::Unstable(format!("p0 underflows at radius {}", self.tube_radius_p0)));
        }
        Ok(p.min(1.0 - 1e-12))
    }
}

fn near_occupied(k: &RasterSet, p: Point2) -> bool {
    let h = k.h();
    [(-1.0, 0.0), (1.0, 0.0), (0.0, -1.0), (0.0, 1.0), (-1.0, -1.0), (1.0, 1.0), (-1.0, 1.0), (1.0, -1.0)]
        .iter()
        .any(|&(dx, dy)| k.contains(p + Point2::new(dx * h, dy * h)))
}

/// Raster test of whether `x0 + γ([T_n, 2T_n])` is contained in `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExitCheck {
    /// Some sample of the window lies outside `K`.
    Left,
    /// Every sample lies in `K` although the window spans several cells.
    Contained,
    /// The window stays within two cells of `x0`, below what the raster
    /// can decide.
    Unresolved,
}

/// One realization of the cascade.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenormTrace {
    /// `T₀, T₁, …, T_N`.
    pub times: Vec<f64>,
    /// `A_n` for `n = 1..=N`.
    pub a_outcomes: Vec<bool>,
    /// `B_N`: no `A_n` holds for `n ≤ N`.
    pub b_indicator: bool,
    /// `2·T_n` at the first `n` with `A_n`.
    pub exit_time_bound: Option<f64>,
    /// `sup |γ_n − γ₀|` over `[1, 2]` per level.
    pub sup_distances: Vec<f64>,
    /// Exit test of `x0 + γ([T_n, 2T_n])`, run at levels with `A_n`.
    pub exit_checks: Vec<Option<ExitCheck>>,
}

impl RenormTrace {
    pub const CSV_HEADER: &'static str = "level,T_n,sup_distance,a_n";

    /// `T_{n+1} < T_n/2` for every consecutive pair.
    pub fn halving_holds(&self) -> bool {
        self.times.windows(2).all(|w| w[1] < w[0] / 2.0)
    }

    /// `B_n` for `n = 1..=N`.
    pub fn b_prefix(&self) -> Vec<bool> {
        let mut all_failed = true;
        self.a_outcomes
            .iter()
            .map(|&a| {
                all_failed &= !a;
                all_failed
            })
            .collect()
    }

    /// No level with `A_n` has a window contained in `K`.
    pub fn exits_confirmed(&self) -> bool {
        !self.exit_checks.contains(&Some(ExitCheck::Contained))
    }

    /// Levels with `A_n` whose window was too small for the raster.
    pub fn unresolved(&self) -> usize {
        self.exit_checks.iter().filter(|c| **c == Some(ExitCheck::Unresolved)).count()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for n in 0..self.a_outcomes.len() {
            s.push_str(&format!(
                "{},{:e},{},{}\n",
                n + 1,
                self.times[n + 1],
                self.sup_distances[n],
                u8::from(self.a_outcomes[n])
            ));
        }
        s
    }
}

/// Runs the cascade coarse to fine.
///
/// `γ(T₀)` is drawn from the free law. At level `n`, with `b = γ(T_{n−1})`
/// already fixed, `T_n = F(b, T_{n−1})` and `γ` is sampled on
/// `[T_n, 2T_n] ∪ {0, T_{n−1}}` from the bridge pinned at `γ(0) = 0` and
/// `γ(T_{n−1}) = b`. By the Markov property this is the exact conditional
/// law given everything sampled so far, since all later windows lie in
/// `[0, T_n]`.
pub fn run_cascade(rng: &RngSpec, cfg: &RenormConfig) -> Result<RenormTrace> {
    cfg.validate()?;
    let p0 = cfg.resolve_p0()?;
    run_with_p0(rng, cfg, p0)
}

/// `n` independent cascades on `rng.replica(i)`, sharing one `p₀`.
pub fn run_cascades(rng: &RngSpec, cfg: &RenormConfig, n: usize) -> Result<Vec<RenormTrace>> {
    cfg.validate()?;
    let p0 = cfg.resolve_p0()?;
    (0..n as u64).into_par_iter().map(|i| run_with_p0(&rng.replica(i), cfg, p0)).collect()
}

fn run_with_p0(rng: &RngSpec, cfg: &RenormConfig, p0: f64) -> Result<RenormTrace> {
    let m = cfg.steps();
    let reference = gamma0(m / 4)?;
    let mut g = rng.rng();
    let mut t_prev = cfg.delta;
    let mut b = gaussian_step(&mut g, (DIFFUSIVITY * t_prev).sqrt());
    let mut trace = RenormTrace {
        times: vec![t_prev],
        a_outcomes: Vec::with_capacity(cfg.n_levels),
        b_indicator: true,
        exit_time_bound: None,
        sup_distances: Vec::with_capacity(cfg.n_levels),
        exit_checks: Vec::with_capacity(cfg.n_levels),
    };
    for level in 1..=cfg.n_levels {
        let t = choose_tprime(b, t_prev, p0);
        let grid = window_grid(t, t_prev, m);
        let path = if cfg.forced_success {
            let mut pts: Vec<Point2> = grid.iter().map(|&s| t.sqrt() * gamma0_at(s / t)).collect();
            pts[0] = Point2::ORIGIN;
            *pts.last_mut().expect("non-empty grid") = b;
            PathSample::new(grid, pts)?
        } else {
            let spec = rng.fork(level as u64);
            let path = sample_bridge_on_grid(&spec, Point2::ORIGIN, b, &grid)?;
            let pin = path.at(0.0).norm().max(path.at(t_prev).dist(b));
            if pin > 1e-9 * b.norm().max(1.0) {
                return Err(Error::Refinement(pin));
            }
            path
        };
        let segment = renormalized_segment(&path, t)?;
        let dist = sup_distance(&segment, &reference)?;
        let a = dist < cfg.tube_radius_close;
        let check = a.then(|| exit_check(&cfg.k, cfg.x0, &path, t));
        if a && trace.exit_time_bound.is_none() {
            trace.exit_time_bound = Some(2.0 * t);
        }
        trace.b_indicator &= !a;
        trace.a_outcomes.push(a);
        trace.sup_distances.push(dist);
        trace.exit_checks.push(check);
        trace.times.push(t);
        b = path.at(t);
        t_prev = t;
    }
    Ok(trace)
}

fn exit_check(k: &RasterSet, x0: Point2, path: &PathSample, t: f64) -> ExitCheck {
    let window: Vec<Point2> =
        path.times().iter().zip(path.points()).filter(|(&s, _)| s >= t && s <= 2.0 * t).map(|(_, &p)| x0 + p).collect();
    if window.iter().any(|&p| !k.contains(p)) {
        ExitCheck::Left
    } else if window.iter().all(|p| p.dist(x0) < 2.0 * k.h()) {
        ExitCheck::Unresolved
    } else {
        ExitCheck::Contained
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::julia::{julia_set, square_grid, PolynomialMap};
    use num_complex::Complex64;

    fn unit_circle() -> RasterSet {
        let map = PolynomialMap::quadratic(Complex64::new(0.0, 0.0), 256).unwrap();
        julia_set(&map, &square_grid(2.5, 128).unwrap()).unwrap()
    }

    #[test]
    fn forced_success_leaves_k() {
        let mut cfg = RenormConfig::new(unit_circle(), Point2::new(1.0, 0.0), 1e4, 3);
        cfg.forced_success = true;
        let tr = run_cascade(&RngSpec::new(1, 0), &cfg).unwrap();
        assert!(tr.a_outcomes.iter().all(|&a| a), "{tr:?}");
        assert!(tr.exits_confirmed(), "{tr:?}");
        assert_eq!(tr.exit_checks[0], Some(ExitCheck::Left));
        assert_eq!(tr.unresolved(), 2);
        assert!(tr.halving_holds());
        assert_eq!(tr.exit_time_bound, Some(2.0 * tr.times[1]));
        assert!(!tr.b_indicator);
    }

    #[test]
    fn halving_and_determinism() {
        let mut cfg = RenormConfig::new(unit_circle(), Point2::new(1.0, 0.0), 1e12, 4);
        cfg.tube_radius_close = 10.0;
        cfg.tube_radius_p0 = 20.0 / 3.0;
        cfg.p0 = Some(0.9);
        let a = run_cascades(&RngSpec::new(5, 0), &cfg, 50).unwrap();
        let b = run_cascades(&RngSpec::new(5, 0), &cfg, 50).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|t| t.halving_holds() && t.exits_confirmed()));
        assert!(a.iter().any(|t| t.exit_time_bound.is_some()));
        assert!(a.iter().all(|t| t.unresolved() == 0));
    }

    #[test]
    fn rejects_x0_off_k() {
        let cfg = RenormConfig::new(unit_circle(), Point2::ORIGIN, 1.0, 2);
        assert!(run_cascade(&RngSpec::new(1, 0), &cfg).is_err());
    }
}
