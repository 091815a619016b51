use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Point2;
use crate::error::{Error, Result};

/// A continuous path sampled at strictly increasing times and interpolated
/// affinely between samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPath")]
pub struct PathSample {
    times: Vec<f64>,
    points: Vec<Point2>,
}

#[derive(Deserialize)]
struct RawPath {
    times: Vec<f64>,
    points: Vec<Point2>,
}

impl TryFrom<RawPath> for PathSample {
    type Error = Error;
    fn try_from(raw: RawPath) -> Result<Self> {
        Self::new(raw.times, raw.points)
    }
}

impl PathSample {
    pub fn new(times: Vec<f64>, points: Vec<Point2>) -> Result<Self> {
        if times.len() != points.len() {
            return Err(Error::InvalidPath(format!("{} times for {} points", times.len(), points.len())));
        }
        if times.len() < 2 {
            return Err(Error::InvalidPath("a path needs at least two samples".into()));
        }
        if times.iter().any(|t| !t.is_finite()) || points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidPath("non-finite sample".into()));
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPath(format!("times not increasing at {} -> {}", w[0], w[1])));
        }
        Ok(Self { times, points })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn points(&self) -> &[Point2] {
        &self.points
    }
    pub fn len(&self) -> usize {
        self.times.len()
    }
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
    pub fn start_time(&self) -> f64 {
        self.times[0]
    }
    pub fn end_time(&self) -> f64 {
        self.times[self.times.len() - 1]
    }
    pub fn first(&self) -> Point2 {
        self.points[0]
    }
    pub fn last(&self) -> Point2 {
        self.points[self.points.len() - 1]
    }

    /// Position at time `t`, clamped to the sampled interval. Exact at sample
    /// times.
    pub fn at(&self, t: f64) -> Point2 {
        if t <= self.times[0] {
            return self.points[0];
        }
        let n = self.times.len();
        if t >= self.times[n - 1] {
            return self.points[n - 1];
        }
        let k = self.times.partition_point(|&s| s <= t);
        // times[k-1] <= t < times[k]
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        if t == t0 {
            return self.points[k - 1];
        }
        self.points[k - 1].lerp(self.points[k], (t - t0) / (t1 - t0))
    }

    pub fn translate(&self, by: Point2) -> PathSample {
        PathSample { times: self.times.clone(), points: self.points.iter().map(|&p| p + by).collect() }
    }

    /// Largest distance of the path from the origin over its samples.
    pub fn sup_norm(&self) -> f64 {
        self.points.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// CSV with header `t,x,y`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,x,y\n");
        for (t, p) in self.times.iter().zip(&self.points) {
            let _ = writeln!(s, "{t},{},{}", p.x, p.y);
        }
        s
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "t,x,y" => {}
            _ => return Err(Error::Format("path CSV must start with header t,x,y".into())),
        }
        let mut times = Vec::new();
        let mut points = Vec::new();
        for (n, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Format(format!("line {}: {e}", n + 1)));
            if f.len() != 3 {
                return Err(Error::Format(format!("line {}: expected 3 fields", n + 1)));
            }
            times.push(parse(f[0])?);
            points.push(Point2::new(parse(f[1])?, parse(f[2])?));
        }
        PathSample::new(times, points)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv(&fs::read_to_string(path)?)
    }
}

/// Vertices `(t, γ₀(t))` of the reference loop on `[1, 2]`.
pub const GAMMA0_VERTICES: [(f64, Point2); 5] = [
    (1.0, Point2::new(-2.0, 1.0)),
    (1.25, Point2::new(1.0, 1.0)),
    (1.5, Point2::new(1.0, -1.0)),
    (1.75, Point2::new(-1.0, -1.0)),
    (2.0, Point2::new(-1.0, 2.0)),
];

/// The piecewise-affine reference path `γ₀` sampled with
/// `samples_per_segment` pieces per affine segment, vertices included.
pub fn gamma0(samples_per_segment: usize) -> Result<PathSample> {
    if samples_per_segment == 0 {
        return Err(Error::InvalidArgument("samples_per_segment must be at least 1".into()));
    }
    let k = samples_per_segment;
    let mut times = Vec::with_capacity(4 * k + 1);
    let mut points = Vec::with_capacity(4 * k + 1);
    for seg in GAMMA0_VERTICES.windows(2) {
        let ((t0, p0), (t1, p1)) = (seg[0], seg[1]);
        for m in 0..k {
            let s = m as f64 / k as f64;
            times.push(if m == 0 { t0 } else { t0 + s * (t1 - t0) });
            points.push(if m == 0 { p0 } else { p0.lerp(p1, s) });
        }
    }
    let (t_end, p_end) = GAMMA0_VERTICES[4];
    times.push(t_end);
    points.push(p_end);
    PathSample::new(times, points)
}

/// `γ₀(t)` for `t ∈ [1, 2]` (clamped outside).
pub fn gamma0_at(t: f64) -> Point2 {
    let v = &GAMMA0_VERTICES;
    if t <= v[0].0 {
        return v[0].1;
    }
    for w in v.windows(2) {
        let ((t0, p0), (t1, p1)) = (w[0], w[1]);
        if t <= t1 {
            return if t == t1 { p1 } else { p0.lerp(p1, (t - t0) / (t1 - t0)) };
        }
    }
    v[4].1
}

/// Sup-norm distance between two paths on a common time interval, evaluated
/// on the union of both sample grids.
pub fn sup_distance(a: &PathSample, b: &PathSample) -> Result<f64> {
    let scale = a.end_time().abs().max(a.start_time().abs()).max(1.0);
    let tol = 1e-12 * scale;
    if (a.start_time() - b.start_time()).abs() > tol || (a.end_time() - b.end_time()).abs() > tol {
        return Err(Error::DomainMismatch {
            a0: a.start_time(),
            a1: a.end_time(),
            b0: b.start_time(),
            b1: b.end_time(),
        });
    }
    let mut best: f64 = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let t = match (a.times.get(i), b.times.get(j)) {
            (Some(&ta), Some(&tb)) if ta <= tb => {
                i += 1;
                if ta == tb {
                    j += 1;
                }
                ta
            }
            (_, Some(&tb)) => {
                j += 1;
                tb
            }
            (Some(&ta), None) => {
                i += 1;
                ta
            }
            (None, None) => unreachable!(),
        };
        best = best.max(a.at(t).dist(b.at(t)));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma0_vertices() {
        let g = gamma0(1).unwrap();
        assert_eq!(g.len(), 5);
        for (k, (t, p)) in GAMMA0_VERTICES.iter().enumerate() {
            assert_eq!(g.times()[k], *t);
            assert_eq!(g.points()[k], *p);
        }
        assert_eq!(g.at(1.5), Point2::new(1.0, -1.0));
        assert_eq!(g.at(1.125), Point2::new(-0.5, 1.0));
        assert_eq!(gamma0_at(1.125), Point2::new(-0.5, 1.0));
        let fine = gamma0(8).unwrap();
        assert_eq!(fine.len(), 33);
        assert_eq!(fine.at(1.5), Point2::new(1.0, -1.0));
        assert!(sup_distance(&g, &fine).unwrap() < 1e-12);
    }

    #[test]
    fn invalid_paths() {
        assert!(PathSample::new(vec![0.0], vec![Point2::ORIGIN]).is_err());
        assert!(PathSample::new(vec![0.0, 0.0], vec![Point2::ORIGIN; 2]).is_err());
        assert!(PathSample::new(vec![0.0, 1.0], vec![Point2::ORIGIN]).is_err());
        assert!(gamma0(0).is_err());
    }

    #[test]
    fn sup_distance_examples() {
        let g = gamma0(4).unwrap();
        assert_eq!(sup_distance(&g, &g).unwrap(), 0.0);
        let shifted = g.translate(Point2::new(0.3, 0.4));
        assert!((sup_distance(&g, &shifted).unwrap() - 0.5).abs() < 1e-12);

        let mut pts = gamma0(1).unwrap().points().to_vec();
        pts[2].y += 0.2;
        let moved = PathSample::new(gamma0(1).unwrap().times().to_vec(), pts).unwrap();
        assert!((sup_distance(&g, &moved).unwrap() - 0.2).abs() < 1e-12);

        let short = PathSample::new(vec![1.0, 1.5], vec![Point2::ORIGIN; 2]).unwrap();
        assert!(matches!(sup_distance(&g, &short), Err(Error::DomainMismatch { .. })));
    }

    #[test]
    fn csv_roundtrip() {
        let g = gamma0(3).unwrap();
        let back = PathSample::from_csv(&g.to_csv()).unwrap();
        assert_eq!(back, g);
        assert!(PathSample::from_csv("a,b\n1,2").is_err());
    }
}
