use crate::error::{Error, Result};
use crate::geometry::RasterSet;

const NONE: u32 = u32::MAX;

/// `−Δ_h` on a set of occupied cells: 5-point stencil, cells outside the set
/// deleted (value 0).
#[derive(Debug, Clone)]
pub(crate) struct Laplacian {
    /// Grid index of each unknown.
    pub cells: Vec<usize>,
    nbrs: Vec<[u32; 4]>,
    inv_h2: f64,
}

impl Laplacian {
    /// Operator on `members`, which must be a union of 4-components of `set`
    /// (so every occupied neighbor of a member is a member).
    pub fn new(set: &RasterSet, members: &[usize]) -> Self {
        let grid = set.grid();
        let mut local = vec![NONE; grid.len()];
        for (n, &k) in members.iter().enumerate() {
            local[k] = n as u32;
        }
        let nbrs = members
            .iter()
            .map(|&k| {
                let (i, j) = grid.coords(k);
                grid.neighbors4(i, j).map(|nb| nb.map_or(NONE, |m| local[m]))
            })
            .collect();
        let h = grid.h();
        Self { cells: members.to_vec(), nbrs, inv_h2: 1.0 / (h * h) }
    }

    pub fn whole(set: &RasterSet) -> Self {
        let members: Vec<usize> = (0..set.grid().len()).filter(|&k| set.cells()[k]).collect();
        Self::new(set, &members)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    /// `y = (A − shift)·x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64], shift: f64) {
        let diag = 4.0 * self.inv_h2 - shift;
        for (n, nb) in self.nbrs.iter().enumerate() {
            let mut s = 0.0;
            for &m in nb {
                if m != NONE {
                    s += x[m as usize];
                }
            }
            y[n] = diag * x[n] - self.inv_h2 * s;
        }
    }

    /// Solves `(A − shift)·x = b` by conjugate gradients, starting from the
    /// given `x`, until `‖r‖ ≤ rel_tol·‖b‖`. Requires `shift < λ_min(A)`.
    pub fn solve(&self, b: &[f64], x: &mut [f64], shift: f64, rel_tol: f64, max_iter: usize) -> Result<usize> {
        let n = self.len();
        let bnorm = norm(b);
        if bnorm == 0.0 {
            x.iter_mut().for_each(|v| *v = 0.0);
            return Ok(0);
        }
        let mut r = vec![0.0; n];
        self.apply(x, &mut r, shift);
        for k in 0..n {
            r[k] = b[k] - r[k];
        }
        let mut p = r.clone();
        let mut ap = vec![0.0; n];
        let mut rr = dot(&r, &r);
        let target = rel_tol * bnorm;
        for it in 0..max_iter {
            if rr.sqrt() <= target {
                return Ok(it);
            }
            self.apply(&p, &mut ap, shift);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                return Err(Error::NoConvergence { iterations: it, residual: rr.sqrt() / bnorm });
            }
            let alpha = rr / pap;
            for k in 0..n {
                x[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            let rr_new = dot(&r, &r);
            let beta = rr_new / rr;
            rr = rr_new;
            for k in 0..n {
                p[k] = r[k] + beta * p[k];
            }
        }
        if rr.sqrt() <= target {
            return Ok(max_iter);
        }
        Err(Error::NoConvergence { iterations: max_iter, residual: rr.sqrt() / bnorm })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
