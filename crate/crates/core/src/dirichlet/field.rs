use std::fmt::Write as _;
use std::path::Path;

use crate::error::{invalid, Result};
use crate::geometry::{Point2, RasterSet};

/// Real values on the occupied cells of a domain, with a constant exterior
/// value standing in for the boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    domain: RasterSet,
    // one entry per grid cell; cells outside the domain hold `exterior`
    values: Vec<f64>,
    exterior: f64,
}

impl ScalarField {
    /// `values` has one entry per grid cell; entries outside the domain are
    /// replaced by `exterior`.
    pub fn new(domain: RasterSet, mut values: Vec<f64>, exterior: f64) -> Result<Self> {
        if values.len() != domain.grid().len() {
            return invalid(format!("{} values for {} cells", values.len(), domain.grid().len()));
        }
        for (v, &inside) in values.iter_mut().zip(domain.cells()) {
            if !inside {
                *v = exterior;
            } else if !v.is_finite() {
                return invalid("field values must be finite");
            }
        }
        Ok(Self { domain, values, exterior })
    }

    pub fn from_fn(domain: RasterSet, exterior: f64, f: impl Fn(Point2) -> f64) -> Result<Self> {
        let grid = *domain.grid();
        let values = (0..grid.len())
            .map(|k| {
                let (i, j) = grid.coords(k);
                f(grid.center(i, j))
            })
            .collect();
        Self::new(domain, values, exterior)
    }

    pub(crate) fn from_unknowns(domain: RasterSet, cells: &[usize], x: &[f64], exterior: f64) -> Self {
        let mut values = vec![exterior; domain.grid().len()];
        for (&k, &v) in cells.iter().zip(x) {
            values[k] = v;
        }
        Self { domain, values, exterior }
    }

    pub fn domain(&self) -> &RasterSet {
        &self.domain
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn exterior(&self) -> f64 {
        self.exterior
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.domain.grid().index(i, j)]
    }

    /// Value of the cell containing `p`; the exterior value off the domain.
    pub fn at(&self, p: Point2) -> f64 {
        match self.domain.grid().cell_of(p) {
            Some((i, j)) => self.get(i, j),
            None => self.exterior,
        }
    }

    /// Value of cell `(i+di, j+dj)`, the exterior value off the grid.
    #[inline]
    fn offset(&self, i: usize, j: usize, di: isize, dj: isize) -> f64 {
        let g = self.domain.grid();
        let (a, b) = (i as isize + di, j as isize + dj);
        if a < 0 || b < 0 || a as usize >= g.nx() || b as usize >= g.ny() {
            return self.exterior;
        }
        self.get(a as usize, b as usize)
    }

    /// 5-point Laplacian at cell `(i, j)`, neighbors off the domain taking the
    /// exterior value.
    pub fn laplacian(&self, i: usize, j: usize) -> f64 {
        let h = self.domain.h();
        let s = self.offset(i, j, 1, 0) + self.offset(i, j, -1, 0) + self.offset(i, j, 0, 1) + self.offset(i, j, 0, -1);
        (s - 4.0 * self.get(i, j)) / (h * h)
    }

    /// Squared central-difference gradient at cell `(i, j)`.
    pub fn grad_sq(&self, i: usize, j: usize) -> f64 {
        let h = self.domain.h();
        let gx = (self.offset(i, j, 1, 0) - self.offset(i, j, -1, 0)) / (2.0 * h);
        let gy = (self.offset(i, j, 0, 1) - self.offset(i, j, 0, -1)) / (2.0 * h);
        gx * gx + gy * gy
    }

    /// Occupied cells whose four neighbors are occupied.
    pub fn interior_cells(&self) -> Vec<(usize, usize)> {
        let g = self.domain.grid();
        self.domain
            .occupied()
            .filter(|&(i, j)| g.neighbors4(i, j).iter().all(|n| n.is_some_and(|k| self.domain.cells()[k])))
            .collect()
    }

    /// Values on occupied cells, in grid order.
    pub fn occupied_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().zip(self.domain.cells()).filter(|(_, &c)| c).map(|(v, _)| *v)
    }

    pub fn max(&self) -> f64 {
        self.occupied_values().fold(f64::NEG_INFINITY, f64::max)
    }
    pub fn min(&self) -> f64 {
        self.occupied_values().fold(f64::INFINITY, f64::min)
    }
    pub fn max_abs(&self) -> f64 {
        self.occupied_values().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Applies `f` to every value, exterior included.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            domain: self.domain.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            exterior: f(self.exterior),
        }
    }

    /// CSV with header `i,j,x,y,value`, one row per occupied cell.
    pub fn to_csv(&self) -> String {
        let grid = self.domain.grid();
        let mut out = String::from("i,j,x,y,value\n");
        for (i, j) in self.domain.occupied() {
            let c = grid.center(i, j);
            let _ = writeln!(out, "{i},{j},{},{},{}", c.x, c.y, self.get(i, j));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}
