use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brownian::{sample_bridge_on_grid, DIFFUSIVITY};
use crate::error::{invalid, Error, Result};
use crate::geometry::{PathSample, Point2};
use crate::rng::RngSpec;
use crate::stats::{self, TwoSampleTest};

const SHRINK: f64 = 1.0 - 1e-9;

/// Radius `s` with `P(|B_T| < s) = 1 − tail` for planar Brownian motion at
/// time `T` (Rayleigh law with per-coordinate variance `2T`), divided by
/// `√(2T)`.
pub fn radial_quantile(tail: f64) -> f64 {
    (-2.0 * tail.ln()).sqrt()
}

/// The time `T′ = F(b, T)`.
///
/// `C = (|b| + q√(2T))/T` with `q` the radial quantile at `1 − p₀/2`, so that
/// `|b − B_T| < C·T` with probability at least `1 − p₀/2`; then
/// `T′ = min(T/2, (1/(12C))²)`, both shrunk by a factor `1 − 1e−9` so that
/// `T′ < T/2` and `√T′·2C < 1/6` hold strictly.
pub fn choose_tprime(b: Point2, t: f64, p0: f64) -> f64 {
    let c = tprime_constant(b, t, p0);
    let cap = 1.0 / (12.0 * c);
    (t / 2.0).min(cap * cap) * SHRINK
}

/// The constant `C` of [`choose_tprime`].
pub fn tprime_constant(b: Point2, t: f64, p0: f64) -> f64 {
    let q = radial_quantile(p0 / 2.0);
    (b.norm() + q * (DIFFUSIVITY * t).sqrt()) / t
}

/// `t ↦ γ(Tp·t)/√Tp` on `[1, 2]`.
pub fn renormalized_segment(path: &PathSample, tp: f64) -> Result<PathSample> {
    if !(tp > 0.0) {
        return invalid(format!("Tp must be positive, got {tp}"));
    }
    if path.start_time() > tp || path.end_time() < 2.0 * tp {
        return Err(Error::PathTooShort { needed: 2.0 * tp, end: path.end_time() });
    }
    let scale = tp.sqrt();
    let mut times = vec![1.0];
    let mut points = vec![path.at(tp) / scale];
    for (&s, &p) in path.times().iter().zip(path.points()) {
        let t = s / tp;
        if t > 1.0 + 1e-12 && t < 2.0 - 1e-12 {
            times.push(t);
            points.push(p / scale);
        }
    }
    times.push(2.0);
    points.push(path.at(2.0 * tp) / scale);
    PathSample::new(times, points)
}

/// Times `0, Tp·(1 + k/m) for k = 0..=m, T`.
pub(crate) fn window_grid(tp: f64, t: f64, m: usize) -> Vec<f64> {
    let mut times = Vec::with_capacity(m + 3);
    times.push(0.0);
    times.extend((0..=m).map(|k| tp * (1.0 + k as f64 / m as f64)));
    times.push(t);
    times
}

/// Two-sample comparison of the two constructions of `γ′`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub n: usize,
    pub b: Point2,
    pub t: f64,
    pub tp: f64,
    pub tests: Vec<TwoSampleTest>,
}

impl LawReport {
    pub fn min_p_value(&self) -> f64 {
        self.tests.iter().map(|t| t.p_value).fold(1.0, f64::min)
    }
}

/// Samples per window used by [`conditioned_law_check`].
pub const LAW_WINDOW_STEPS: usize = 64;

/// Compares `γ′` built (a) from a bridge pinned at `γ(T) = b`, sampled on
/// `[Tp, 2Tp]` and renormalized, against (b) the explicit representation
/// `B_{Tp·t}/√Tp + (√Tp·t/T)(b − B_T)` with a free Brownian motion `B`.
///
/// Welch, F and Kolmogorov–Smirnov tests on `γ′(1.5)` (each coordinate) and
/// on `sup |γ′|` over `[1, 2]`.
pub fn conditioned_law_check(rng: &RngSpec, b: Point2, t: f64, tp: f64, n: usize) -> Result<LawReport> {
    if !(tp > 0.0 && tp < t / 2.0) {
        return invalid(format!("need 0 < Tp < T/2, got Tp = {tp}, T = {t}"));
    }
    if n < 2 {
        return invalid("need at least two samples");
    }
    let m = LAW_WINDOW_STEPS;
    let grid = window_grid(tp, t, m);
    let bridge_spec = rng.fork(0);
    let bridge: Vec<(f64, f64, f64)> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let path = sample_bridge_on_grid(&bridge_spec.replica(i), Point2::ORIGIN, b, &grid)?;
            Ok(features(&renormalized_segment(&path, tp)?))
        })
        .collect::<Result<_>>()?;
    let explicit_spec = rng.fork(1);
    let explicit: Vec<(f64, f64, f64)> = (0..n as u64)
        .into_par_iter()
        .map(|i| features(&explicit_segment(&explicit_spec.replica(i), b, t, tp, m)))
        .collect();

    let mut tests = Vec::new();
    let names = ["x(1.5)", "y(1.5)", "sup"];
    for (k, name) in names.iter().enumerate() {
        let pick = |v: &[(f64, f64, f64)]| -> Vec<f64> { v.iter().map(|f| [f.0, f.1, f.2][k]).collect() };
        let (a, c) = (pick(&bridge), pick(&explicit));
        let (ts, tp_) = stats::welch_t(&a, &c);
        tests.push(TwoSampleTest { name: format!("welch {name}"), statistic: ts, p_value: tp_ });
        let (fs, fp) = stats::f_test(&a, &c);
        tests.push(TwoSampleTest { name: format!("f {name}"), statistic: fs, p_value: fp });
        let (d, kp) = stats::ks_two_sample(&a, &c);
        tests.push(TwoSampleTest { name: format!("ks {name}"), statistic: d, p_value: kp });
    }
    Ok(LawReport { n, b, t, tp, tests })
}

fn features(path: &PathSample) -> (f64, f64, f64) {
    let mid = path.at(1.5);
    (mid.x, mid.y, path.sup_norm())
}

/// One draw of the explicit representation on the window grid.
pub(crate) fn explicit_segment(spec: &RngSpec, b: Point2, t: f64, tp: f64, m: usize) -> PathSample {
    let mut g = spec.rng();
    let mut gauss = |var: f64| {
        let s = var.sqrt();
        let x: f64 = StandardNormal.sample(&mut g);
        let y: f64 = StandardNormal.sample(&mut g);
        Point2::new(s * x, s * y)
    };
    let mut bm = gauss(DIFFUSIVITY * tp);
    let step = tp / m as f64;
    let mut window = Vec::with_capacity(m + 1);
    window.push(bm);
    for _ in 0..m {
        bm = bm + gauss(DIFFUSIVITY * step);
        window.push(bm);
    }
    let b_t = bm + gauss(DIFFUSIVITY * (t - 2.0 * tp));
    let scale = tp.sqrt();
    let times: Vec<f64> = (0..=m).map(|k| 1.0 + k as f64 / m as f64).collect();
    let points = times.iter().zip(&window).map(|(&s, &w)| w / scale + (scale * s / t) * (b - b_t)).collect();
    PathSample::new(times, points).expect("valid window grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brownian::sample_path;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn tprime_rules() {
        let mut g = RngSpec::new(8, 0).rng();
        use rand::Rng;
        for _ in 0..1000 {
            let b = Point2::new(g.random_range(-50.0..50.0), g.random_range(-50.0..50.0));
            let t: f64 = 10f64.powf(g.random_range(-6.0..6.0));
            let p0: f64 = 10f64.powf(g.random_range(-40.0..-0.1));
            let tp = choose_tprime(b, t, p0);
            assert!(tp < t / 2.0);
            assert!(tp.sqrt() * 2.0 * tprime_constant(b, t, p0) < 1.0 / 6.0);
        }
    }

    #[test]
    fn tprime_against_chi_squared() {
        // |B_1|²/2 is χ² with two degrees of freedom
        let chi = ChiSquared::new(2.0).unwrap();
        let q = chi.inverse_cdf(1.0 - 0.25).sqrt();
        let c = q * 2f64.sqrt();
        let expect = 0.5f64.min((1.0 / (12.0 * c)).powi(2));
        let got = choose_tprime(Point2::ORIGIN, 1.0, 0.5);
        assert!((got - expect).abs() < 1e-8 * expect, "{got} vs {expect}");
    }

    #[test]
    fn segment_domain_and_start() {
        let p = sample_path(&RngSpec::new(2, 0), Point2::ORIGIN, 1.0, 0.01).unwrap();
        let tp = p.times()[25];
        let s = renormalized_segment(&p, tp).unwrap();
        assert_eq!(s.start_time(), 1.0);
        assert_eq!(s.end_time(), 2.0);
        assert_eq!(s.first(), p.points()[25] / tp.sqrt());
        assert!(matches!(renormalized_segment(&p, 0.6), Err(Error::PathTooShort { .. })));
    }

    #[test]
    fn explicit_has_right_endpoints_variance() {
        // γ′(2) − γ′(1) has per-coordinate variance 2 up to the O(Tp/T) drift
        let n = 20_000;
        let xs: Vec<f64> = (0..n)
            .map(|i| {
                let s = explicit_segment(&RngSpec::new(4, 0).replica(i), Point2::ORIGIN, 1e3, 1.0, 16);
                (s.last() - s.first()).x
            })
            .collect();
        let v = stats::variance(&xs);
        assert!((v - 2.0).abs() < 0.07, "{v}");
    }
}
