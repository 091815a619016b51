use super::{Point2, RasterSet};
use crate::error::{invalid, Error, Result};

/// Exact squared euclidean distance, in cell units, from every cell center to
/// the nearest occupied cell center (`f64::INFINITY` when the set is empty).
///
/// Separable lower-envelope algorithm of Felzenszwalb and Huttenlocher.
pub fn squared_distance_transform(set: &RasterSet) -> Vec<f64> {
    let (nx, ny) = (set.nx(), set.ny());
    let mut d: Vec<f64> = set.cells().iter().map(|&c| if c { 0.0 } else { f64::INFINITY }).collect();

    let mut f = vec![0.0; nx.max(ny)];
    let mut out = vec![0.0; nx.max(ny)];
    let mut v = vec![0usize; nx.max(ny)];
    let mut z = vec![0.0; nx.max(ny) + 1];

    for i in 0..nx {
        for j in 0..ny {
            f[j] = d[j * nx + i];
        }
        lower_envelope(&f[..ny], &mut out[..ny], &mut v, &mut z);
        for j in 0..ny {
            d[j * nx + i] = out[j];
        }
    }
    for j in 0..ny {
        let row = &mut d[j * nx..(j + 1) * nx];
        f[..nx].copy_from_slice(row);
        lower_envelope(&f[..nx], &mut out[..nx], &mut v, &mut z);
        row.copy_from_slice(&out[..nx]);
    }
    d
}

fn lower_envelope(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    let mut started = false;
    for q in 0..n {
        if f[q].is_infinite() {
            continue;
        }
        if !started {
            v[0] = q;
            z[0] = f64::NEG_INFINITY;
            z[1] = f64::INFINITY;
            started = true;
            continue;
        }
        let qf = q as f64;
        let meet = |k: usize| {
            let p = v[k] as f64;
            ((f[q] + qf * qf) - (f[v[k]] + p * p)) / (2.0 * qf - 2.0 * p)
        };
        let mut s = meet(k);
        // z[0] = -inf, so this stops at k = 0
        while s <= z[k] {
            k -= 1;
            s = meet(k);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    if !started {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        let qf = q as f64;
        while z[k + 1] < qf {
            k += 1;
        }
        let dq = qf - v[k] as f64;
        *o = dq * dq + f[v[k]];
    }
}

/// `Λ^ε`: every cell whose center is at euclidean distance `< eps` from the
/// center of an occupied cell of `set`.
///
/// The bounding box grows by `eps` plus one frame cell, so the result never
/// touches its frame when the input does not.
pub fn dilate(set: &RasterSet, eps: f64) -> Result<RasterSet> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return invalid(format!("dilation radius must be finite and non-negative, got {eps}"));
    }
    if eps == 0.0 {
        return Ok(set.clone());
    }
    let h = set.h();
    if eps < h * (1.0 - 1e-9) {
        return invalid(format!("dilation radius {eps} is below the cell size {h}"));
    }
    let pad = (eps / h).ceil() as usize + 1;
    let padded = set.pad(pad);
    let d2 = squared_distance_transform(&padded);
    let r = eps / h;
    let r2 = r * r;
    let cells = d2.iter().map(|&d| d < r2).collect();
    RasterSet::new(*padded.grid(), cells)
}

/// Euclidean distance from `p` to the nearest occupied cell center.
pub fn distance_to_set(set: &RasterSet, p: Point2) -> f64 {
    set.occupied_centers().into_iter().map(|c| c.dist(p)).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{shapes, Grid};

    fn brute_force(set: &RasterSet) -> Vec<f64> {
        let occ: Vec<(usize, usize)> = set.occupied().collect();
        let mut out = vec![f64::INFINITY; set.grid().len()];
        for j in 0..set.ny() {
            for i in 0..set.nx() {
                for &(a, b) in &occ {
                    let d = (i as f64 - a as f64).powi(2) + (j as f64 - b as f64).powi(2);
                    let k = set.grid().index(i, j);
                    out[k] = out[k].min(d);
                }
            }
        }
        out
    }

    #[test]
    fn matches_brute_force() {
        let g = Grid::aligned(0.0, 3.0, 0.0, 2.0, 0.1).unwrap();
        let set = RasterSet::from_fn(g, |p| ((p.x * 7.3).sin() + (p.y * 5.1).cos() > 1.6) || (p.x - 1.1).abs() < 0.01);
        assert_eq!(squared_distance_transform(&set), brute_force(&set));
    }

    #[test]
    fn zero_dilation_is_identity() {
        let s = shapes::segment(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), 0.05, 3).unwrap();
        assert_eq!(dilate(&s, 0.0).unwrap(), s);
    }

    #[test]
    fn empty_set_rejected() {
        let g = Grid::aligned(0.0, 1.0, 0.0, 1.0, 0.1).unwrap();
        assert!(matches!(dilate(&RasterSet::empty(g), 0.2), Err(Error::EmptySet)));
    }

    #[test]
    fn disc_from_single_cell() {
        // lattice points of Z² strictly inside the radius-50 circle, counted directly
        let h = 0.01;
        let r: i64 = 50;
        let lattice =
            (-r..=r).flat_map(|a| (-r..=r).map(move |b| (a, b))).filter(|&(a, b)| a * a + b * b < r * r).count();
        let point = shapes::point(Point2::ORIGIN, h, 2).unwrap();
        let disc = dilate(&point, 0.5).unwrap();
        assert_eq!(disc.count(), lattice);
        let expect = std::f64::consts::PI * 0.25 / (h * h);
        assert!((disc.count() as f64 - expect).abs() / expect < 0.02);
    }

    #[test]
    fn stadium_area() {
        // the raster strip loses half a row on each side: an O(h) error
        let h = 0.002;
        let seg = shapes::segment(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), h, 2).unwrap();
        let st = dilate(&seg, 0.1).unwrap();
        // brute-force rasterization of the stadium on the same lattice
        let brute = RasterSet::from_fn(*st.grid(), |p| {
            let cx = p.x.clamp(0.0, 1.0);
            (p - Point2::new(cx, 0.0)).norm() < 0.1 - 1e-12
        });
        let stadium = 2.0 * 0.1 + std::f64::consts::PI * 0.01;
        assert!((st.area() - stadium).abs() / stadium < 0.02, "{}", st.area());
        assert!((st.area() - brute.area()).abs() / stadium < 0.01);
    }
}
