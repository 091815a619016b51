use super::flood::unbounded_complement;
use super::{Grid, PathSample, Point2, RasterSet};
use crate::error::{invalid, Error, Result};

/// Whether the closed segment `[a, b]` meets the closed square of cell `(i, j)`.
pub(crate) fn segment_hits_cell(grid: &Grid, a: Point2, b: Point2, i: usize, j: usize) -> bool {
    let c = grid.center(i, j);
    let half = 0.5 * grid.h() * (1.0 + 1e-9);
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, d, lo, hi) in [(a.x, b.x - a.x, c.x - half, c.x + half), (a.y, b.y - a.y, c.y - half, c.y + half)] {
        if d == 0.0 {
            if p < lo || p > hi {
                return false;
            }
        } else {
            let (u, v) = ((lo - p) / d, (hi - p) / d);
            t0 = t0.max(u.min(v));
            t1 = t1.min(u.max(v));
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

/// Conservative rasterization: every cell touched by some segment of the
/// polyline is occupied.
pub fn rasterize_polyline(grid: &Grid, points: &[Point2]) -> RasterSet {
    let mut set = RasterSet::empty(*grid);
    let h = grid.h();
    let xi = |x: f64| ((x - grid.xmin()) / h).floor();
    let yj = |y: f64| ((y - grid.ymin()) / h).floor();
    let lim = |v: f64, n: usize| v.clamp(0.0, (n - 1) as f64) as usize;
    if points.len() == 1 {
        if let Some((i, j)) = grid.cell_of(points[0]) {
            set.set(i, j, true);
        }
        return set;
    }
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let i0 = lim(xi(a.x.min(b.x)) - 1.0, grid.nx());
        let i1 = lim(xi(a.x.max(b.x)) + 1.0, grid.nx());
        let j0 = lim(yj(a.y.min(b.y)) - 1.0, grid.ny());
        let j1 = lim(yj(a.y.max(b.y)) + 1.0, grid.ny());
        for j in j0..=j1 {
            for i in i0..=i1 {
                if !set.get(i, j) && segment_hits_cell(grid, a, b, i, j) {
                    set.set(i, j, true);
                }
            }
        }
    }
    set
}

/// Whether the path separates the origin from infinity, i.e. the origin lies
/// in a bounded component of the complement of its trace.
///
/// `resolution` is the number of cells across the larger side of the box
/// spanned by the path and the origin. The trace is drawn conservatively and
/// the complement is flooded from the frame with 8-connectivity.
pub fn separates_origin(path: &PathSample, resolution: usize) -> Result<bool> {
    if resolution < 2 {
        return invalid(format!("resolution must be at least 2, got {resolution}"));
    }
    let pts = path.points();
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for p in pts {
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
        ymin = ymin.min(p.y);
        ymax = ymax.max(p.y);
    }
    let extent = (xmax - xmin).max(ymax - ymin).max(f64::MIN_POSITIVE);
    let h = extent / resolution as f64;
    let m = 3.0 * h;
    let grid = Grid::aligned(xmin - m, xmax + m, ymin - m, ymax + m, h)?;
    let trace = rasterize_polyline(&grid, pts);
    let (oi, oj) = grid.cell_of(Point2::ORIGIN).expect("origin inside the padded box");
    if trace.get(oi, oj) {
        return Err(Error::OriginOnPath);
    }
    let outside = unbounded_complement(&trace);
    Ok(!outside[grid.index(oi, oj)])
}

/// Winding number of the closed polygon `vertices` (last vertex joined to the
/// first) around `p`, by angle summation.
pub fn winding_number(vertices: &[Point2], p: Point2) -> i64 {
    let n = vertices.len();
    let mut total = 0.0;
    for k in 0..n {
        let a = vertices[k] - p;
        let b = vertices[(k + 1) % n] - p;
        total += (a.x * b.y - a.y * b.x).atan2(a.x * b.x + a.y * b.y);
    }
    (total / std::f64::consts::TAU).round() as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gamma0;

    fn polyline(pts: Vec<Point2>) -> PathSample {
        let times = (0..pts.len()).map(|k| k as f64).collect();
        PathSample::new(times, pts).unwrap()
    }

    #[test]
    fn unit_circle_separates() {
        let pts = (0..=64)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 64.0;
                Point2::new(a.cos(), a.sin())
            })
            .collect();
        assert!(separates_origin(&polyline(pts), 256).unwrap());
    }

    #[test]
    fn arc_does_not_separate() {
        let seg = polyline(vec![Point2::new(-2.0, 1.0), Point2::new(-1.0, 2.0)]);
        assert!(!separates_origin(&seg, 256).unwrap());
    }

    #[test]
    fn gamma0_separates() {
        assert!(separates_origin(&gamma0(1).unwrap(), 256).unwrap());
        assert!(separates_origin(&gamma0(1).unwrap(), 16).unwrap());
    }

    #[test]
    fn origin_on_path() {
        let seg = polyline(vec![Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0)]);
        assert!(matches!(separates_origin(&seg, 64), Err(Error::OriginOnPath)));
    }

    #[test]
    fn winding_examples() {
        let sq = [Point2::new(-1.0, -1.0), Point2::new(1.0, -1.0), Point2::new(1.0, 1.0), Point2::new(-1.0, 1.0)];
        assert_eq!(winding_number(&sq, Point2::ORIGIN), 1);
        let rev: Vec<Point2> = sq.iter().rev().copied().collect();
        assert_eq!(winding_number(&rev, Point2::ORIGIN), -1);
        assert_eq!(winding_number(&sq, Point2::new(3.0, 0.0)), 0);
    }

    #[test]
    fn conservative_drawing_has_no_diagonal_gaps() {
        // a diagonal line must block 8-connected flow, so it has to be 4-connected
        let g = Grid::aligned(-1.0, 1.0, -1.0, 1.0, 0.1).unwrap();
        let line = rasterize_polyline(&g, &[Point2::new(-0.93, -0.97), Point2::new(0.91, 0.95)]);
        let comps = crate::geometry::components4(&line);
        assert_eq!(comps.count(), 1);
    }
}
