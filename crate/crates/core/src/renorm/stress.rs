use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brownian::sample_bridge_on_grid;
use crate::error::{invalid, Result};
use crate::geometry::{gamma0, separates_origin, PathSample, Point2};
use crate::rng::RngSpec;

const STEPS_PER_PIECE: usize = 64;
const MAX_TRIES: usize = 1000;

/// Outcome of [`separation_stress`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressReport {
    pub n: usize,
    pub radius: f64,
    pub resolution: usize,
    /// Largest `sup |γ − γ₀|` among the tested paths.
    pub max_sup: f64,
    /// Perturbed paths that failed to separate the origin.
    pub counterexamples: Vec<PathSample>,
}

impl StressReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Tests `n` random paths `γ₀ + β` with `sup |β| < radius` for separation of
/// the origin from infinity.
///
/// `β` is a Brownian bridge on `[1, 2]` pinned at 0 at both ends, scaled by a
/// random amplitude in `(0, radius)` and redrawn while its sup-norm reaches
/// `radius`. With `radius = 0` every path is `γ₀` itself.
pub fn separation_stress(rng: &RngSpec, n: usize, radius: f64, resolution: usize) -> Result<StressReport> {
    if !(0.0..0.5).contains(&radius) {
        return invalid(format!("radius must lie in [0, 1/2), got {radius}"));
    }
    let base = gamma0(STEPS_PER_PIECE)?;
    let results: Vec<(f64, Option<PathSample>)> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let spec = rng.replica(i);
            let path = if radius == 0.0 { base.clone() } else { perturb(&spec, &base, radius)? };
            let sup = path.points().iter().zip(base.points()).map(|(p, q)| p.dist(*q)).fold(0.0, f64::max);
            let ok = separates_origin(&path, resolution)?;
            Ok((sup, (!ok).then_some(path)))
        })
        .collect::<Result<_>>()?;
    let max_sup = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let counterexamples = results.into_iter().filter_map(|r| r.1).collect();
    Ok(StressReport { n, radius, resolution, max_sup, counterexamples })
}

fn perturb(spec: &RngSpec, base: &PathSample, radius: f64) -> Result<PathSample> {
    let mut g = spec.fork(0).rng();
    for attempt in 0..MAX_TRIES as u64 {
        let amplitude = radius * g.random::<f64>();
        let bridge = sample_bridge_on_grid(&spec.replica(attempt), Point2::ORIGIN, Point2::ORIGIN, base.times())?;
        // bridge sup-norm is of order one; the amplitude sets the scale
        let points: Vec<Point2> = base.points().iter().zip(bridge.points()).map(|(&p, &q)| p + amplitude * q).collect();
        let sup = bridge.sup_norm() * amplitude;
        if sup < radius {
            return PathSample::new(base.times().to_vec(), points);
        }
    }
    invalid("no perturbation below the radius after many draws")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GAMMA0_VERTICES;

    #[test]
    fn gamma0_separates() {
        let r = separation_stress(&RngSpec::new(1, 0), 3, 0.0, 256).unwrap();
        assert!(r.passed());
        assert_eq!(r.max_sup, 0.0);
    }

    #[test]
    fn small_perturbations_separate() {
        let r = separation_stress(&RngSpec::new(2, 0), 200, 0.45, 256).unwrap();
        assert!(r.passed());
        assert!(r.max_sup < 0.45 && r.max_sup > 0.2);
    }

    #[test]
    fn harness_detects_failure() {
        // moving the last vertex by (−3, 0) keeps the final piece from
        // crossing the first one
        let mut pts: Vec<Point2> = GAMMA0_VERTICES.iter().map(|v| v.1).collect();
        pts[4] = pts[4] + Point2::new(-3.0, 0.0);
        let times = GAMMA0_VERTICES.iter().map(|v| v.0).collect();
        let broken = PathSample::new(times, pts).unwrap();
        assert!(!separates_origin(&broken, 256).unwrap());
    }
}
