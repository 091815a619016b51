//! Test sets named in configuration files.

use std::f64::consts::PI;

use num_complex::Complex64;
use thinlab::geometry::{shapes, Grid, Point2, RasterSet};
use thinlab::julia::{julia_set, square_grid, PolynomialMap};

use crate::config::{parse_real, Config};
use crate::error::CliError;

pub const SHAPES: [&str; 8] =
    ["unit-square", "unit-disc", "rectangle", "disjoint-squares", "segment", "filled-square", "point", "pgm"];

/// Keys read by [`build`], with their defaults.
pub const SET_KEYS: [(&str, &str); 5] =
    [("shape", "unit-disc"), ("h", "1/64"), ("width", "1"), ("height", "2"), ("path", "")];

/// `j₀,₁`, the first zero of the Bessel function `J₀`.
pub const J01: f64 = 2.404_825_557_695_773;

pub struct NamedSet {
    pub set: RasterSet,
    /// A natural starting point inside the set.
    pub center: Point2,
    /// Closed-form first Dirichlet eigenvalue, when known.
    pub lambda1: Option<f64>,
}

pub fn build(cfg: &Config) -> Result<NamedSet, CliError> {
    let h = cfg.f64("h")?;
    let shape = cfg.choice("shape", &SHAPES)?;
    let margin = 2;
    let named = match shape {
        "unit-square" => NamedSet {
            set: shapes::rectangle(0.0, 1.0, 0.0, 1.0, h, margin)?,
            center: Point2::new(0.5, 0.5),
            lambda1: Some(2.0 * PI * PI),
        },
        "unit-disc" => NamedSet {
            set: shapes::disc(Point2::ORIGIN, 1.0, h, margin)?,
            center: Point2::ORIGIN,
            lambda1: Some(J01 * J01),
        },
        "rectangle" => {
            let (w, ht) = (cfg.f64("width")?, cfg.f64("height")?);
            NamedSet {
                set: shapes::rectangle(0.0, w, 0.0, ht, h, margin)?,
                center: Point2::new(w / 2.0, ht / 2.0),
                lambda1: Some(PI * PI * (1.0 / (w * w) + 1.0 / (ht * ht))),
            }
        }
        "disjoint-squares" => {
            let g = Grid::aligned(-2.0 * h, 3.5 + 2.0 * h, -2.0 * h, 2.0 + 2.0 * h, h)?;
            let tol = 1e-9 * h;
            let set = RasterSet::from_fn(g, |p| {
                let inside = |x0: f64, x1: f64, y0: f64, y1: f64| {
                    p.x > x0 + tol && p.x < x1 - tol && p.y > y0 + tol && p.y < y1 - tol
                };
                inside(0.0, 1.0, 0.0, 1.0) || inside(1.5, 3.5, 0.0, 2.0)
            });
            NamedSet { set, center: Point2::new(2.5, 1.0), lambda1: Some(PI * PI / 2.0) }
        }
        "segment" => NamedSet {
            set: shapes::segment(Point2::new(-0.5, 0.0), Point2::new(0.5, 0.0), h, margin)?,
            center: Point2::ORIGIN,
            lambda1: None,
        },
        "filled-square" => NamedSet {
            set: shapes::rectangle(-0.5, 0.5, -0.5, 0.5, h, margin)?,
            center: Point2::ORIGIN,
            lambda1: Some(2.0 * PI * PI),
        },
        "point" => NamedSet { set: shapes::point(Point2::ORIGIN, h, margin)?, center: Point2::ORIGIN, lambda1: None },
        _ => {
            let set = RasterSet::read_pgm(cfg.str("path")?)?;
            let centers = set.occupied_centers();
            let center = centers.get(centers.len() / 2).copied().ok_or(thinlab::Error::EmptySet)?;
            NamedSet { set, center, lambda1: None }
        }
    };
    Ok(named)
}

/// `z² + c` from strings such as `z^2`, `z^2-1` or `z^2+0.25`, with an
/// optional imaginary part of `c`.
pub fn parse_quadratic(text: &str, c_im: f64, max_iter: usize) -> Option<PolynomialMap> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let rest = t.strip_prefix("z^2")?;
    let c_re = if rest.is_empty() { 0.0 } else { parse_real(rest.strip_prefix('+').unwrap_or(rest))? };
    PolynomialMap::quadratic(Complex64::new(c_re, c_im), max_iter).ok()
}

/// The raster Julia set of `map` on a square box holding its escape disc.
pub fn julia_raster(map: &PolynomialMap, resolution: usize) -> Result<RasterSet, CliError> {
    let half = (map.escape_radius() + 0.5).ceil();
    Ok(julia_set(map, &square_grid(half, resolution)?)?)
}
