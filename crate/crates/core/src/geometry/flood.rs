use std::collections::VecDeque;

use super::{Grid, RasterSet};
use crate::error::{Error, Result};

const OFFSETS8: [(isize, isize); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

fn flood(grid: &Grid, passable: &[bool], seeds: impl Iterator<Item = usize>, conn8: bool) -> Vec<bool> {
    let mut reached = vec![false; grid.len()];
    let mut queue = VecDeque::new();
    for s in seeds {
        if passable[s] && !reached[s] {
            reached[s] = true;
            queue.push_back(s);
        }
    }
    let offsets = if conn8 { &OFFSETS8[..] } else { &OFFSETS8[..4] };
    let (nx, ny) = (grid.nx() as isize, grid.ny() as isize);
    while let Some(k) = queue.pop_front() {
        let (i, j) = grid.coords(k);
        for &(di, dj) in offsets {
            let (a, b) = (i as isize + di, j as isize + dj);
            if a < 0 || b < 0 || a >= nx || b >= ny {
                continue;
            }
            let n = grid.index(a as usize, b as usize);
            if passable[n] && !reached[n] {
                reached[n] = true;
                queue.push_back(n);
            }
        }
    }
    reached
}

/// Empty cells reachable from the bounding-box frame through empty cells,
/// with 8-connectivity: the raster picture of `(C ∖ S)_∞`.
pub fn unbounded_complement(set: &RasterSet) -> Vec<bool> {
    let grid = set.grid();
    let passable: Vec<bool> = set.cells().iter().map(|&c| !c).collect();
    let frame = (0..grid.len()).filter(|&k| {
        let (i, j) = grid.coords(k);
        grid.is_frame(i, j)
    });
    flood(grid, &passable, frame, true)
}

/// `∂((C ∖ S)_∞)`: occupied cells 8-adjacent to the unbounded component of
/// the complement.
pub fn boundary_of_unbounded_component(set: &RasterSet) -> Result<RasterSet> {
    if set.touches_frame() {
        return Err(Error::TouchesFrame);
    }
    let outside = unbounded_complement(set);
    let grid = *set.grid();
    let (nx, ny) = (grid.nx() as isize, grid.ny() as isize);
    let mut out = RasterSet::empty(grid);
    for (i, j) in set.occupied() {
        let touches = OFFSETS8.iter().any(|&(di, dj)| {
            let (a, b) = (i as isize + di, j as isize + dj);
            a >= 0 && b >= 0 && a < nx && b < ny && outside[grid.index(a as usize, b as usize)]
        });
        if touches {
            out.set(i, j, true);
        }
    }
    Ok(out)
}

/// 4-connected components of the occupied cells.
#[derive(Debug, Clone)]
pub struct Components {
    /// Component label per cell, `usize::MAX` for empty cells.
    pub labels: Vec<usize>,
    /// Cell indices of each component, in ascending order.
    pub members: Vec<Vec<usize>>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.members.len()
    }
}

pub fn components4(set: &RasterSet) -> Components {
    let grid = set.grid();
    let mut labels = vec![usize::MAX; grid.len()];
    let mut members = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..grid.len() {
        if !set.cells()[start] || labels[start] != usize::MAX {
            continue;
        }
        let label = members.len();
        let mut comp = vec![start];
        labels[start] = label;
        queue.push_back(start);
        while let Some(k) = queue.pop_front() {
            let (i, j) = grid.coords(k);
            for n in grid.neighbors4(i, j).into_iter().flatten() {
                if set.cells()[n] && labels[n] == usize::MAX {
                    labels[n] = label;
                    comp.push(n);
                    queue.push_back(n);
                }
            }
        }
        comp.sort_unstable();
        members.push(comp);
    }
    Components { labels, members }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{shapes, Point2};

    #[test]
    fn disc_boundary_is_a_ring() {
        let h = 1.0 / 64.0;
        let disc = shapes::disc(Point2::ORIGIN, 1.0, h, 3).unwrap();
        let ring = boundary_of_unbounded_component(&disc).unwrap();
        assert!(ring.is_subset_of(&disc));
        for c in ring.occupied_centers() {
            assert!((c.norm() - 1.0).abs() <= 2.0 * h, "{c:?}");
        }
        // every angle is represented
        for k in 0..360 {
            let a = (k as f64).to_radians();
            let p = Point2::new(a.cos(), a.sin());
            assert!(ring.occupied_centers().iter().any(|c| c.dist(p) < 2.0 * h));
        }
    }

    #[test]
    fn annulus_keeps_outer_circle_only() {
        let h = 1.0 / 64.0;
        let g = shapes::disc(Point2::ORIGIN, 1.0, h, 3).unwrap().grid().to_owned();
        let ann = RasterSet::from_fn(g, |p| (0.5..1.0).contains(&p.norm()));
        let b = boundary_of_unbounded_component(&ann).unwrap();
        assert!(b.count() > 0);
        assert!(b.occupied_centers().iter().all(|c| c.norm() > 1.0 - 2.0 * h));
    }

    #[test]
    fn square_boundary_is_its_edges() {
        let h = 0.1;
        let sq = shapes::rectangle(0.0, 1.0, 0.0, 1.0, h, 2).unwrap();
        let b = boundary_of_unbounded_component(&sq).unwrap();
        // cell centers at 0.1..0.9 form a 9x9 block; its edge cells number 32
        assert_eq!(sq.count(), 81);
        assert_eq!(b.count(), 32);
        for c in b.occupied_centers() {
            let edge = |v: f64| (v - 0.1).abs() < 1e-9 || (v - 0.9).abs() < 1e-9;
            assert!(edge(c.x) || edge(c.y));
        }
    }

    #[test]
    fn frame_contact_rejected() {
        let g = Grid::aligned(0.0, 1.0, 0.0, 1.0, 0.1).unwrap();
        let full = RasterSet::full(g);
        assert!(matches!(boundary_of_unbounded_component(&full), Err(Error::TouchesFrame)));
    }

    #[test]
    fn diagonal_cells_are_separate_components() {
        let g = Grid::aligned(0.0, 0.4, 0.0, 0.4, 0.1).unwrap();
        let mut s = RasterSet::empty(g);
        s.set(1, 1, true);
        s.set(2, 2, true);
        s.set(3, 2, true);
        let c = components4(&s);
        assert_eq!(c.count(), 2);
        assert_eq!(c.members[1].len(), 2);
    }
}
