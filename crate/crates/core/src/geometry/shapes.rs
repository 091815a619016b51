//! Standard test sets on lattice-aligned grids.
//!
//! Every constructor takes the cell size `h` and a `margin` of empty frame
//! cells. Open sets (discs, rectangles) keep the cells whose centers lie
//! strictly inside; closed thin sets (points, segments) keep every cell their
//! geometry touches.

use super::separation::segment_hits_cell;
use super::{Grid, Point2, RasterSet};
use crate::error::Result;

fn framed(xmin: f64, xmax: f64, ymin: f64, ymax: f64, h: f64, margin: usize) -> Result<Grid> {
    let m = margin as f64 * h;
    Grid::aligned(xmin - m, xmax + m, ymin - m, ymax + m, h)
}

/// Open disc `|p − center| < radius`.
pub fn disc(center: Point2, radius: f64, h: f64, margin: usize) -> Result<RasterSet> {
    let g = framed(center.x - radius, center.x + radius, center.y - radius, center.y + radius, h, margin)?;
    Ok(RasterSet::from_fn(g, |p| (p - center).norm() < radius))
}

/// Open rectangle `(x0, x1) × (y0, y1)`.
pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64, h: f64, margin: usize) -> Result<RasterSet> {
    let g = framed(x0, x1, y0, y1, h, margin)?;
    let tol = 1e-9 * h;
    Ok(RasterSet::from_fn(g, |p| p.x > x0 + tol && p.x < x1 - tol && p.y > y0 + tol && p.y < y1 - tol))
}

/// The closed segment `[a, b]`.
pub fn segment(a: Point2, b: Point2, h: f64, margin: usize) -> Result<RasterSet> {
    let g = framed(a.x.min(b.x), a.x.max(b.x), a.y.min(b.y), a.y.max(b.y), h, margin)?;
    let mut set = RasterSet::empty(g);
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            if segment_hits_cell(&g, a, b, i, j) {
                set.set(i, j, true);
            }
        }
    }
    Ok(set)
}

/// The single cell containing `p`.
pub fn point(p: Point2, h: f64, margin: usize) -> Result<RasterSet> {
    let g = framed(p.x, p.x, p.y, p.y, h, margin.max(1))?;
    let mut set = RasterSet::empty(g);
    if let Some((i, j)) = g.cell_of(p) {
        set.set(i, j, true);
    }
    Ok(set)
}
