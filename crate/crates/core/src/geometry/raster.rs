use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::Point2;
use crate::error::{Error, Result};

/// A uniform grid of square cells over a physical bounding box.
///
/// Cell `(i, j)` has its center at `(x0 + i·h, y0 + j·h)`; `j` grows with `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x0: f64,
    y0: f64,
    h: f64,
    nx: usize,
    ny: usize,
}

impl Grid {
    /// Grid covering `[xmin, xmax] × [ymin, ymax]` with `nx × ny` square cells.
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(xmin.is_finite() && xmax.is_finite() && ymin.is_finite() && ymax.is_finite()) {
            return Err(Error::InvalidRaster("non-finite bounding box".into()));
        }
        if !(xmin < xmax && ymin < ymax) {
            return Err(Error::InvalidRaster(format!("empty bounding box [{xmin}, {xmax}] x [{ymin}, {ymax}]")));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidRaster(format!("need at least 2x2 cells, got {nx}x{ny}")));
        }
        let hx = (xmax - xmin) / nx as f64;
        let hy = (ymax - ymin) / ny as f64;
        if ((hx - hy) / hx).abs() > 1e-6 {
            return Err(Error::InvalidRaster(format!("cells are not square: {hx} vs {hy}")));
        }
        Ok(Self { x0: xmin + 0.5 * hx, y0: ymin + 0.5 * hx, h: hx, nx, ny })
    }

    /// Smallest grid of spacing `h` whose cell centers sit on integer
    /// multiples of `h` and cover `[xmin, xmax] × [ymin, ymax]`.
    ///
    /// Aligned grids put the boundary of axis-parallel boxes with corners on
    /// the lattice exactly on exterior cell centers, which is where the
    /// Dirichlet-by-deletion scheme places the boundary.
    pub fn aligned(xmin: f64, xmax: f64, ymin: f64, ymax: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidRaster(format!("invalid cell size {h}")));
        }
        let snap = |v: f64| (v / h).round();
        let near = |v: f64| ((v / h) - snap(v)).abs() < 1e-9;
        let klo = |v: f64| if near(v) { snap(v) } else { (v / h).floor() };
        let khi = |v: f64| if near(v) { snap(v) } else { (v / h).ceil() };
        let (ix0, ix1) = (klo(xmin), khi(xmax));
        let (iy0, iy1) = (klo(ymin), khi(ymax));
        let nx = (ix1 - ix0) as usize + 1;
        let ny = (iy1 - iy0) as usize + 1;
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidRaster(format!("need at least 2x2 cells, got {nx}x{ny}")));
        }
        Ok(Self { x0: ix0 * h, y0: iy0 * h, h, nx, ny })
    }

    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn xmin(&self) -> f64 {
        self.x0 - 0.5 * self.h
    }
    pub fn xmax(&self) -> f64 {
        self.x0 + (self.nx as f64 - 0.5) * self.h
    }
    pub fn ymin(&self) -> f64 {
        self.y0 - 0.5 * self.h
    }
    pub fn ymax(&self) -> f64 {
        self.y0 + (self.ny as f64 - 0.5) * self.h
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    #[inline]
    pub fn center(&self, i: usize, j: usize) -> Point2 {
        Point2::new(self.x0 + i as f64 * self.h, self.y0 + j as f64 * self.h)
    }

    /// The cell containing `p`, if `p` lies in the bounding box.
    #[inline]
    pub fn cell_of(&self, p: Point2) -> Option<(usize, usize)> {
        let fx = (p.x - self.x0) / self.h + 0.5;
        let fy = (p.y - self.y0) / self.h + 0.5;
        if !(fx >= 0.0 && fy >= 0.0) {
            return None;
        }
        let (i, j) = (fx as usize, fy as usize);
        (i < self.nx && j < self.ny).then_some((i, j))
    }

    /// Same grid grown by `cells` on every side.
    pub fn pad(&self, cells: usize) -> Grid {
        let c = cells as f64;
        Grid {
            x0: self.x0 - c * self.h,
            y0: self.y0 - c * self.h,
            h: self.h,
            nx: self.nx + 2 * cells,
            ny: self.ny + 2 * cells,
        }
    }

    /// True when both grids have the same spacing and cell layout.
    pub fn same_as(&self, other: &Grid) -> bool {
        let tol = 1e-6 * self.h;
        self.nx == other.nx
            && self.ny == other.ny
            && (self.h - other.h).abs() < 1e-9 * self.h
            && (self.x0 - other.x0).abs() < tol
            && (self.y0 - other.y0).abs() < tol
    }

    /// True when the cell lattices coincide (possibly with different extents).
    pub fn compatible_with(&self, other: &Grid) -> bool {
        if (self.h - other.h).abs() > 1e-9 * self.h {
            return false;
        }
        let off = |a: f64, b: f64| {
            let k = (a - b) / self.h;
            (k - k.round()).abs() < 1e-6
        };
        off(self.x0, other.x0) && off(self.y0, other.y0)
    }

    pub fn is_frame(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    /// Indices of the 4-neighbours of a cell; `None` outside the grid.
    #[inline]
    pub fn neighbors4(&self, i: usize, j: usize) -> [Option<usize>; 4] {
        [
            (i + 1 < self.nx).then(|| self.index(i + 1, j)),
            (i > 0).then(|| self.index(i - 1, j)),
            (j + 1 < self.ny).then(|| self.index(i, j + 1)),
            (j > 0).then(|| self.index(i, j - 1)),
        ]
    }
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

/// A planar set stored as an occupancy grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterSet {
    grid: Grid,
    cells: Vec<bool>,
}

impl RasterSet {
    pub fn new(grid: Grid, cells: Vec<bool>) -> Result<Self> {
        if cells.len() != grid.len() {
            return Err(Error::InvalidRaster(format!("{} cells for a {}x{} grid", cells.len(), grid.nx, grid.ny)));
        }
        Ok(Self { grid, cells })
    }

    pub fn empty(grid: Grid) -> Self {
        Self { cells: vec![false; grid.len()], grid }
    }

    pub fn full(grid: Grid) -> Self {
        Self { cells: vec![true; grid.len()], grid }
    }

    /// Marks every cell whose center satisfies `inside`.
    pub fn from_fn(grid: Grid, inside: impl Fn(Point2) -> bool) -> Self {
        let mut cells = vec![false; grid.len()];
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                cells[grid.index(i, j)] = inside(grid.center(i, j));
            }
        }
        Self { grid, cells }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn h(&self) -> f64 {
        self.grid.h
    }
    pub fn nx(&self) -> usize {
        self.grid.nx
    }
    pub fn ny(&self) -> usize {
        self.grid.ny
    }
    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[self.grid.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let k = self.grid.index(i, j);
        self.cells[k] = value;
    }

    /// Whether `p` falls in an occupied cell. Points outside the bounding box
    /// are never contained.
    #[inline]
    pub fn contains(&self, p: Point2) -> bool {
        match self.grid.cell_of(p) {
            Some((i, j)) => self.get(i, j),
            None => false,
        }
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn area(&self) -> f64 {
        self.count() as f64 * self.grid.h * self.grid.h
    }

    pub fn is_empty(&self) -> bool {
        !self.cells.iter().any(|&c| c)
    }

    /// Occupied cells as `(i, j)` pairs, row by row.
    pub fn occupied(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cells.iter().enumerate().filter(|(_, &c)| c).map(|(k, _)| self.grid.coords(k))
    }

    pub fn occupied_centers(&self) -> Vec<Point2> {
        self.occupied().map(|(i, j)| self.grid.center(i, j)).collect()
    }

    pub fn touches_frame(&self) -> bool {
        self.occupied().any(|(i, j)| self.grid.is_frame(i, j))
    }

    /// The same set on a larger grid.
    pub fn pad(&self, cells: usize) -> RasterSet {
        let grid = self.grid.pad(cells);
        let mut out = RasterSet::empty(grid);
        for (i, j) in self.occupied() {
            out.set(i + cells, j + cells, true);
        }
        out
    }

    /// Re-rasterizes onto `grid` by sampling this set at the target cell centers.
    pub fn resample(&self, grid: &Grid) -> RasterSet {
        RasterSet::from_fn(*grid, |p| self.contains(p))
    }

    /// Cell-by-cell inclusion; occupied cells are compared by their centers,
    /// so the grids only need to share a lattice.
    pub fn is_subset_of(&self, other: &RasterSet) -> bool {
        self.occupied().all(|(i, j)| other.contains(self.grid.center(i, j)))
    }

    pub fn union(&self, other: &RasterSet) -> Result<RasterSet> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::InvalidRaster("union of rasters on different grids".into()));
        }
        let cells = self.cells.iter().zip(&other.cells).map(|(a, b)| *a || *b).collect();
        Ok(RasterSet { grid: self.grid, cells })
    }

    /// Writes a binary PGM (`P5`, 255 = occupied, top row first) and a JSON
    /// sidecar with the bounding box next to it (same stem, `.json`).
    pub fn write_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut bytes = format!("P5\n{} {}\n255\n", self.grid.nx, self.grid.ny).into_bytes();
        for j in (0..self.grid.ny).rev() {
            for i in 0..self.grid.nx {
                bytes.push(if self.get(i, j) { 255 } else { 0 });
            }
        }
        fs::File::create(path)?.write_all(&bytes)?;
        let side =
            Sidecar { xmin: self.grid.xmin(), xmax: self.grid.xmax(), ymin: self.grid.ymin(), ymax: self.grid.ymax() };
        fs::write(sidecar_path(path), serde_json::to_string_pretty(&side)?)?;
        Ok(())
    }

    pub fn read_pgm(path: impl AsRef<Path>) -> Result<RasterSet> {
        let path = path.as_ref();
        let bytes = fs::read(path)?;
        let (nx, ny, maxval, body) = parse_pgm_header(&bytes)?;
        if body.len() < nx * ny {
            return Err(Error::Format(format!("{}: truncated pixel data", path.display())));
        }
        let side: Sidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?;
        let grid = Grid::new(side.xmin, side.xmax, side.ymin, side.ymax, nx, ny)?;
        let threshold = maxval.div_ceil(2);
        let mut cells = vec![false; nx * ny];
        for row in 0..ny {
            let j = ny - 1 - row;
            for i in 0..nx {
                cells[grid.index(i, j)] = u32::from(body[row * nx + i]) >= threshold;
            }
        }
        RasterSet::new(grid, cells)
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn parse_pgm_header(bytes: &[u8]) -> Result<(usize, usize, u32, &[u8])> {
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format("truncated PGM header".into()));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|e| Error::Format(e.to_string()))?);
    }
    if fields[0] != "P5" {
        return Err(Error::Format(format!("expected P5 magic, found {}", fields[0])));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|e| Error::Format(format!("bad PGM field {s}: {e}")));
    let (nx, ny, maxval) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
    if maxval == 0 || maxval > 255 {
        return Err(Error::Format(format!("unsupported maxval {maxval}")));
    }
    // exactly one whitespace byte separates the header from the raster
    Ok((nx, ny, maxval as u32, &bytes[pos + 1..]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_square_cells() {
        assert!(Grid::new(0.0, 1.0, 0.0, 2.0, 10, 10).is_err());
        assert!(Grid::new(0.0, 1.0, 0.0, 2.0, 10, 20).is_ok());
        assert!(Grid::new(0.0, 1.0, 0.0, 1.0, 1, 1).is_err());
    }

    #[test]
    fn aligned_centers_on_lattice() {
        let g = Grid::aligned(-0.5, 0.5, -0.1, 0.1, 0.25).unwrap();
        assert_eq!(g.nx(), 5);
        assert_eq!(g.center(0, 0), Point2::new(-0.5, -0.25));
        assert_eq!(g.center(2, 1), Point2::new(0.0, 0.0));
        assert_eq!(g.cell_of(Point2::new(0.1, 0.1)), Some((2, 1)));
        assert_eq!(g.cell_of(Point2::new(9.0, 0.0)), None);
    }

    #[test]
    fn pgm_roundtrip() {
        let g = Grid::aligned(-1.0, 1.0, -0.5, 0.5, 0.125).unwrap();
        let set = RasterSet::from_fn(g, |p| p.x > p.y);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.pgm");
        set.write_pgm(&path).unwrap();
        let back = RasterSet::read_pgm(&path).unwrap();
        assert!(back.grid().same_as(set.grid()));
        assert_eq!(back.cells(), set.cells());
        let bytes = std::fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P5\n17 9\n255\n"));
        let side = std::fs::read_to_string(dir.path().join("s.json")).unwrap();
        assert!(side.contains("\"xmin\""));
    }
}
