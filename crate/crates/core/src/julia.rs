//! Filled Julia sets and Julia sets of complex polynomials as rasters.
//!
//! The unbounded component of the complement of the Julia set is the basin of
//! attraction of infinity, so the raster Julia set is taken as the boundary
//! of the unbounded complementary component of the raster filled Julia set.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{boundary_of_unbounded_component, Grid, Point2, RasterSet};

pub const DEFAULT_MAX_ITER: usize = 256;

/// Escape radius `R = max(2, (2 + Σ_{i<d} |a_i|) / |a_d|)`.
///
/// For `|z| > R ≥ 2`, `|P(z)| ≥ |z|^{d-1}(|a_d||z| − Σ_{i<d}|a_i|) > 2|z|`, so
/// orbits leaving the disc of radius `R` diverge.
pub fn escape_radius(coefficients: &[Complex64]) -> Result<f64> {
    let d = degree(coefficients)?;
    let lead = coefficients[d].norm();
    let rest: f64 = coefficients[..d].iter().map(|a| a.norm()).sum();
    Ok(f64::max(2.0, (2.0 + rest) / lead))
}

fn degree(coefficients: &[Complex64]) -> Result<usize> {
    let d = coefficients.iter().rposition(|a| *a != Complex64::new(0.0, 0.0)).ok_or(Error::DegreeTooLow)?;
    if d < 2 {
        return Err(Error::DegreeTooLow);
    }
    Ok(d)
}

/// A complex polynomial `a_0 + a_1 z + … + a_d z^d` with its escape radius.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialMap {
    coefficients: Vec<Complex64>,
    escape_radius: f64,
    max_iter: usize,
}

impl PolynomialMap {
    pub fn new(mut coefficients: Vec<Complex64>, max_iter: usize) -> Result<Self> {
        let d = degree(&coefficients)?;
        coefficients.truncate(d + 1);
        if max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be positive".into()));
        }
        let escape_radius = escape_radius(&coefficients)?;
        Ok(Self { coefficients, escape_radius, max_iter })
    }

    /// `z² + c`.
    pub fn quadratic(c: Complex64, max_iter: usize) -> Result<Self> {
        Self::new(vec![c, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)], max_iter)
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }
    pub fn escape_radius(&self) -> f64 {
        self.escape_radius
    }
    pub fn max_iter(&self) -> usize {
        self.max_iter
    }
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn with_max_iter(&self, max_iter: usize) -> Self {
        Self { max_iter: max_iter.max(1), ..self.clone() }
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let d = self.degree();
        (1..=d).rev().fold(Complex64::new(0.0, 0.0), |acc, k| acc * z + self.coefficients[k] * k as f64)
    }

    /// Number of iterations before the orbit leaves the escape disc, or
    /// `None` if it stays for `max_iter` iterations.
    pub fn escape_time(&self, z0: Complex64) -> Option<usize> {
        let r2 = self.escape_radius * self.escape_radius;
        let mut z = z0;
        for n in 0..=self.max_iter {
            if z.norm_sqr() > r2 {
                return Some(n);
            }
            if n < self.max_iter {
                z = self.eval(z);
            }
        }
        None
    }

    /// Largest `|P'|` over the grid's bounding box, sampled at cell centers.
    pub fn lipschitz_on(&self, grid: &Grid) -> f64 {
        let mut best: f64 = 0.0;
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let c = grid.center(i, j);
                best = best.max(self.derivative(Complex64::new(c.x, c.y)).norm());
            }
        }
        best
    }
}

fn check_bbox(map: &PolynomialMap, grid: &Grid) -> Result<()> {
    let r = map.escape_radius + grid.h();
    if grid.xmin() > -r || grid.xmax() < r || grid.ymin() > -r || grid.ymax() < r {
        return Err(Error::BboxTooSmall { radius: map.escape_radius });
    }
    Ok(())
}

/// Cells whose centers do not escape within `max_iter` iterations.
pub fn filled_julia(map: &PolynomialMap, grid: &Grid) -> Result<RasterSet> {
    check_bbox(map, grid)?;
    let nx = grid.nx();
    let cells: Vec<bool> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let c = grid.center(k % nx, k / nx);
            map.escape_time(Complex64::new(c.x, c.y)).is_none()
        })
        .collect();
    RasterSet::new(*grid, cells)
}

/// The raster Julia set: boundary of the unbounded component of the
/// complement of the filled Julia set.
pub fn julia_set(map: &PolynomialMap, grid: &Grid) -> Result<RasterSet> {
    boundary_of_unbounded_component(&filled_julia(map, grid)?)
}

/// Square lattice-aligned grid `[-half_width, half_width]²` with `resolution`
/// cells per unit length.
pub fn square_grid(half_width: f64, resolution: usize) -> Result<Grid> {
    let h = 1.0 / resolution as f64;
    Grid::aligned(-half_width, half_width, -half_width, half_width, h)
}

pub fn to_complex(p: Point2) -> Complex64 {
    Complex64::new(p.x, p.y)
}

pub fn to_point(z: Complex64) -> Point2 {
    Point2::new(z.re, z.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn escape_radius_examples() {
        let z2 = [c(0.0), c(0.0), c(1.0)];
        assert_eq!(escape_radius(&z2).unwrap(), 2.0);
        assert_eq!(escape_radius(&[c(-2.0), c(0.0), c(1.0)]).unwrap(), 4.0);
        assert_eq!(escape_radius(&[c(0.25), c(0.0), c(1.0)]).unwrap(), 2.25);
        assert!(matches!(escape_radius(&[c(1.0), c(1.0)]), Err(Error::DegreeTooLow)));
        assert!(matches!(escape_radius(&[c(1.0), c(1.0), c(0.0)]), Err(Error::DegreeTooLow)));
    }

    #[test]
    fn escape_bound_holds_outside_radius() {
        // |z| > R ⇒ |P(z)| > 2|z|, checked on circles just outside R
        for coeffs in [vec![c(0.0), c(0.0), c(1.0)], vec![c(-2.0), c(0.0), c(1.0)], vec![c(0.25), c(0.0), c(1.0)]] {
            let map = PolynomialMap::new(coeffs, 10).unwrap();
            let r = map.escape_radius() * (1.0 + 1e-9);
            for k in 0..2000 {
                let a = std::f64::consts::TAU * k as f64 / 2000.0;
                let z = Complex64::from_polar(r, a);
                assert!(map.eval(z).norm() > 2.0 * z.norm());
            }
        }
    }

    #[test]
    fn escaping_center_is_empty_immediately() {
        let map = PolynomialMap::quadratic(c(0.0), 100).unwrap();
        assert_eq!(map.escape_time(Complex64::new(2.5, 0.0)), Some(0));
        assert_eq!(map.escape_time(Complex64::new(0.5, 0.0)), None);
    }

    #[test]
    fn bbox_must_contain_escape_disc() {
        let map = PolynomialMap::quadratic(c(-2.0), 100).unwrap();
        let g = square_grid(3.0, 32).unwrap();
        assert!(matches!(filled_julia(&map, &g), Err(Error::BboxTooSmall { .. })));
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let map = PolynomialMap::new(vec![c(0.3), Complex64::new(0.0, 1.0), c(-2.0), c(0.5)], 10).unwrap();
        let z = Complex64::new(0.4, -0.7);
        let e = 1e-6;
        let fd = (map.eval(z + e) - map.eval(z - e)) / (2.0 * e);
        assert!((fd - map.derivative(z)).norm() < 1e-6);
    }
}
