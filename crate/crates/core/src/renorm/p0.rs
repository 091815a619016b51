use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brownian::DIFFUSIVITY;
use crate::error::{invalid, Error, Result};
use crate::geometry::{gamma0_at, Point2, GAMMA0_VERTICES};
use crate::rng::RngSpec;

/// Tube radius of the event defining `p₀`.
pub const P0_RADIUS: f64 = 1.0 / 3.0;

const RENORM_EVERY: usize = 64;

/// `P(sup_{t∈[1,2]} |γ(t) − γ₀(t)| < radius)` for a Brownian path from 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeSurvival {
    pub radius: f64,
    pub h: f64,
    pub dt: f64,
    pub log10_p: f64,
    pub steps: usize,
}

impl TubeSurvival {
    /// The probability itself; underflows to 0 below about 1e-308.
    pub fn p(&self) -> f64 {
        10f64.powf(self.log10_p)
    }
}

/// Velocity of `γ₀` on each of its four affine pieces.
fn gamma0_velocities() -> [Point2; 4] {
    let mut v = [Point2::ORIGIN; 4];
    for k in 0..4 {
        let (t0, a) = GAMMA0_VERTICES[k];
        let (t1, b) = GAMMA0_VERTICES[k + 1];
        v[k] = (1.0 / (t1 - t0)) * (b - a);
    }
    v
}

/// Nodes of the square lattice `hℤ²` inside the disc, stored on a padded
/// square array whose outside entries stay 0.
struct Lattice {
    side: usize,
    /// Per row: first and one-past-last column of inside nodes.
    rows: Vec<(usize, usize, usize)>,
    /// Inside nodes with at least one neighbor outside.
    near: Vec<NearNode>,
    centers: Vec<(usize, Point2)>,
}

struct NearNode {
    k: usize,
    // east, west, north, south, in lattice units
    arms: [f64; 4],
}

fn build_lattice(radius: f64, h: f64) -> Lattice {
    let m = (radius / h).ceil() as i64 + 1;
    let side = (2 * m + 1) as usize;
    let r2 = radius * radius * (1.0 - 1e-12);
    let pos = |i: i64, j: i64| Point2::new(i as f64 * h, j as f64 * h);
    let key = |i: i64, j: i64| ((j + m) as usize) * side + (i + m) as usize;
    let inside = |i: i64, j: i64| pos(i, j).norm_sq() < r2;
    let mut rows = Vec::new();
    let mut near = Vec::new();
    let mut centers = Vec::new();
    for j in -m..=m {
        let cols: Vec<i64> = (-m..=m).filter(|&i| inside(i, j)).collect();
        let (Some(&lo), Some(&hi)) = (cols.first(), cols.last()) else { continue };
        rows.push(((j + m) as usize, (lo + m) as usize, (hi + m + 1) as usize));
        for i in lo..=hi {
            let p = pos(i, j);
            centers.push((key(i, j), p));
            let half_x = (radius * radius - p.y * p.y).max(0.0).sqrt();
            let half_y = (radius * radius - p.x * p.x).max(0.0).sqrt();
            let steps = [(1, 0), (-1, 0), (0, 1), (0, -1)];
            let mut arms = [1.0; 4];
            let mut is_near = false;
            for (d, &(di, dj)) in steps.iter().enumerate() {
                if !inside(i + di, j + dj) {
                    is_near = true;
                    let dist = match d {
                        0 => half_x - p.x,
                        1 => half_x + p.x,
                        2 => half_y - p.y,
                        _ => half_y + p.y,
                    };
                    arms[d] = (dist / h).clamp(1e-12, 1.0);
                }
            }
            if is_near {
                near.push(NearNode { k: key(i, j), arms });
            }
        }
    }
    Lattice { side, rows, near, centers }
}

/// Tube survival by integrating the Fokker–Planck equation of
/// `y = γ − γ₀` on the disc `|y| < radius` with absorbing boundary.
///
/// The density of `γ(1)` is Gaussian with covariance `2I`. On each affine
/// piece of `γ₀`, `y` is Brownian motion with constant drift `−γ₀'`, so the
/// density solves `∂p/∂t = Δp + γ₀'·∇p`. Interior nodes use explicit central
/// differences (`dt ≤ h²/4`, cell Péclet number at most 1); nodes next to the
/// circle use Shortley–Weller arms, upwind drift and an implicit diagonal.
/// The mass is rescaled regularly and its logarithm accumulated, so values far
/// below the `f64` range are representable.
pub fn tube_survival_pde(radius: f64, h: f64, dt: f64) -> Result<TubeSurvival> {
    if !(radius > 0.0 && radius.is_finite()) {
        return invalid(format!("radius must be positive, got {radius}"));
    }
    if !(h > 0.0 && h <= radius / 64.0 * (1.0 + 1e-12)) {
        return invalid(format!("grid spacing {h} exceeds radius/64"));
    }
    if !(dt > 0.0 && dt <= h * h / 4.0 * (1.0 + 1e-12)) {
        return invalid(format!("time step {dt} exceeds h²/4 = {}", h * h / 4.0));
    }
    let velocities = gamma0_velocities();
    let vmax = velocities.iter().map(|v| v.x.abs().max(v.y.abs())).fold(0.0, f64::max);
    if vmax * h / 2.0 > 1.0 {
        return invalid(format!("grid spacing {h} too coarse for drift {vmax}"));
    }
    let lat = build_lattice(radius, h);
    if lat.centers.is_empty() {
        return invalid("no grid nodes inside the tube");
    }
    let start = gamma0_at(1.0);
    let var = DIFFUSIVITY;
    let mut p = vec![0.0; lat.side * lat.side];
    for &(k, y) in &lat.centers {
        let x = y + start;
        p[k] = (-x.norm_sq() / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var);
    }
    let mut next = p.clone();
    let mut log_scale = 0.0f64;
    let cell = h * h;
    let mut mass = p.iter().sum::<f64>() * cell;
    let inv_h2 = 1.0 / (h * h);
    let side = lat.side;
    let mut total_steps = 0;
    for (k, &gv) in velocities.iter().enumerate() {
        let (t0, t1) = (GAMMA0_VERTICES[k].0, GAMMA0_VERTICES[k + 1].0);
        let n_steps = ((t1 - t0) / dt - 1e-9).ceil() as usize;
        let tau = (t1 - t0) / n_steps as f64;
        // drift of y
        let v = Point2::new(-gv.x, -gv.y);
        // explicit central stencil: weights of self, east, west, north, south
        let c0 = 1.0 - 4.0 * tau * inv_h2;
        let ce = tau * (inv_h2 - v.x / (2.0 * h));
        let cw = tau * (inv_h2 + v.x / (2.0 * h));
        let cn = tau * (inv_h2 - v.y / (2.0 * h));
        let cs = tau * (inv_h2 + v.y / (2.0 * h));
        for s in 0..n_steps {
            for &(j, lo, hi) in &lat.rows {
                let row = j * side;
                let (a, b) = (row + lo, row + hi);
                let cur = &p[a..b];
                let east = &p[a + 1..b + 1];
                let west = &p[a - 1..b - 1];
                let north = &p[a + side..b + side];
                let south = &p[a - side..b - side];
                let out = &mut next[a..b];
                for q in 0..out.len() {
                    out[q] = c0 * cur[q] + ce * east[q] + cw * west[q] + cn * north[q] + cs * south[q];
                }
            }
            for node in &lat.near {
                let kk = node.k;
                // outside entries of `p` are 0, which is the boundary value
                let vals = [p[kk + 1], p[kk - 1], p[kk + side], p[kk - side]];
                let [ae, aw, an, as_] = node.arms;
                let mut off = 2.0 * inv_h2 * (vals[0] / (ae * (ae + aw)) + vals[1] / (aw * (ae + aw)));
                off += 2.0 * inv_h2 * (vals[2] / (an * (an + as_)) + vals[3] / (as_ * (an + as_)));
                let mut diag = 2.0 * inv_h2 * (1.0 / (ae * aw) + 1.0 / (an * as_));
                if v.x > 0.0 {
                    off += v.x * vals[1] / (aw * h);
                    diag += v.x / (aw * h);
                } else {
                    off -= v.x * vals[0] / (ae * h);
                    diag -= v.x / (ae * h);
                }
                if v.y > 0.0 {
                    off += v.y * vals[3] / (as_ * h);
                    diag += v.y / (as_ * h);
                } else {
                    off -= v.y * vals[2] / (an * h);
                    diag -= v.y / (an * h);
                }
                next[kk] = (p[kk] + tau * off) / (1.0 + tau * diag);
            }
            std::mem::swap(&mut p, &mut next);
            total_steps += 1;
            if (s + 1) % RENORM_EVERY == 0 || s + 1 == n_steps {
                if p.iter().any(|&x| x < 0.0 || !x.is_finite()) {
                    return Err(Error::Unstable("negative or non-finite density".into()));
                }
                let new_mass = p.iter().sum::<f64>() * cell;
                if new_mass > mass * (1.0 + 1e-9) {
                    return Err(Error::Unstable(format!("mass grew from {mass:e} to {new_mass:e}")));
                }
                if new_mass == 0.0 {
                    return Err(Error::Unstable("all mass absorbed".into()));
                }
                let scale = new_mass;
                p.iter_mut().for_each(|x| *x /= scale);
                log_scale += scale.ln();
                mass = 1.0;
            }
        }
    }
    let log_p = log_scale + mass.ln();
    Ok(TubeSurvival { radius, h, dt, log10_p: log_p / std::f64::consts::LN_10, steps: total_steps })
}

/// [`tube_survival_pde`] at the radius `1/3` defining `p₀`.
pub fn estimate_p0_pde(h: f64, dt: f64) -> Result<TubeSurvival> {
    tube_survival_pde(P0_RADIUS, h, dt)
}

/// Monte Carlo estimate of the tube survival probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeMonteCarlo {
    pub radius: f64,
    pub n: usize,
    pub dt: f64,
    pub p_hat: f64,
    /// Standard error of `p_hat`.
    pub se: f64,
}

/// Direct simulation of the tube event: `γ(1)` exactly, then steps of `dt`
/// on `[1, 2]`, each weighted by the probability that the Brownian bridge
/// between consecutive samples stays inside, approximated by the half-plane
/// formula `1 − exp(−d₀d₁/dt)` with `d₀, d₁` the distances to the circle.
pub fn tube_survival_mc(rng: &RngSpec, radius: f64, n: usize, dt: f64) -> Result<TubeMonteCarlo> {
    if !(radius > 0.0) || n < 2 {
        return invalid("need a positive radius and at least two paths");
    }
    let per_piece = (0.25 / dt).round();
    if !(per_piece >= 1.0 && (per_piece * dt - 0.25).abs() < 1e-9) {
        return invalid(format!("time step {dt} must divide 1/4"));
    }
    let per_piece = per_piece as usize;
    let velocities = gamma0_velocities();
    let start = gamma0_at(1.0);
    let sd = (DIFFUSIVITY * dt).sqrt();
    let weights: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut g = rng.replica(i).rng();
            let mut draw = || -> f64 { StandardNormal.sample(&mut g) };
            let s1 = DIFFUSIVITY.sqrt();
            let mut y = Point2::new(s1 * draw(), s1 * draw()) - start;
            if y.norm() >= radius {
                return 0.0;
            }
            let mut w = 1.0;
            for gv in &velocities {
                for _ in 0..per_piece {
                    let next = y - dt * *gv + Point2::new(sd * draw(), sd * draw());
                    let d1 = radius - next.norm();
                    if d1 <= 0.0 {
                        return 0.0;
                    }
                    let d0 = radius - y.norm();
                    w *= 1.0 - (-d0 * d1 / dt).exp();
                    y = next;
                }
            }
            w
        })
        .collect();
    let mean = weights.iter().sum::<f64>() / n as f64;
    let var = weights.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    Ok(TubeMonteCarlo { radius, n, dt, p_hat: mean, se: (var / n as f64).sqrt() })
}
