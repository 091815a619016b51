use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thinlab::dirichlet::{
    build_fn, certify_lower_bound, lambda1_grid, lambda1_stochastic, phi_and_residual, solve_psi, ScalarField,
    DEFAULT_TOL,
};
use thinlab::geometry::{components4, dilate, shapes, Grid, Point2, RasterSet};
use thinlab::{Error, RngSpec};

/// `J₀(x) = (1/π)∫₀^π cos(x sin θ) dθ` by the midpoint rule.
fn bessel_j0(x: f64) -> f64 {
    let n = 4000;
    let step = PI / n as f64;
    (0..n).map(|k| (x * ((k as f64 + 0.5) * step).sin()).cos()).sum::<f64>() * step / PI
}

fn j01() -> f64 {
    let (mut a, mut b) = (2.0, 3.0);
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if bessel_j0(a) * bessel_j0(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

#[test]
fn disc_eigenvalue_against_bessel_root() {
    let j = j01();
    assert!((j - 2.404_825_557_695_773).abs() < 1e-9);
    let disc = shapes::disc(Point2::ORIGIN, 1.0, 1.0 / 128.0, 2).unwrap();
    let l = lambda1_grid(&disc, DEFAULT_TOL).unwrap().lambda1;
    assert!((l - j * j).abs() < 0.02 * j * j, "{l}");
}

#[test]
fn square_converges_at_second_order() {
    let exact = 2.0 * PI * PI;
    let err = |h: f64| {
        let sq = shapes::rectangle(0.0, 1.0, 0.0, 1.0, h, 2).unwrap();
        (lambda1_grid(&sq, DEFAULT_TOL).unwrap().lambda1 - exact).abs()
    };
    let (e1, e2) = (err(1.0 / 32.0), err(1.0 / 64.0));
    assert!(e1 / e2 >= 3.5, "{e1} -> {e2}");
}

#[test]
fn disjoint_squares_take_the_larger() {
    let g = Grid::aligned(-0.25, 3.75, -0.25, 2.25, 1.0 / 32.0).unwrap();
    let set = RasterSet::from_fn(g, |p| {
        let small = p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0;
        let large = p.x > 1.5 && p.x < 3.5 && p.y > 0.0 && p.y < 2.0;
        small || large
    });
    let r = lambda1_grid(&set, DEFAULT_TOL).unwrap();
    assert_eq!(r.components.len(), 2);
    assert!((r.lambda1 - PI * PI / 2.0).abs() < 0.01 * PI * PI / 2.0);
    let chi = r.eigenfunction.unwrap();
    assert!(chi.occupied_values().all(|v| v > 0.0));
}

fn random_blob(g: &mut ChaCha8Rng, grid: Grid) -> RasterSet {
    let discs: Vec<(Point2, f64)> = (0..g.random_range(1..5))
        .map(|_| (Point2::new(g.random_range(0.3..0.7), g.random_range(0.3..0.7)), g.random_range(0.1..0.25)))
        .collect();
    RasterSet::from_fn(grid, |p| discs.iter().any(|&(c, r)| p.dist(c) < r))
}

#[test]
fn inclusion_decreases_eigenvalue() {
    let mut g = ChaCha8Rng::seed_from_u64(11);
    let grid = Grid::aligned(0.0, 1.0, 0.0, 1.0, 1.0 / 48.0).unwrap();
    for _ in 0..20 {
        let outer = random_blob(&mut g, grid);
        let inner =
            RasterSet::new(grid, outer.cells().iter().map(|&c| c && g.random::<f64>() > 0.1).collect()).unwrap();
        if inner.is_empty() {
            continue;
        }
        let lo = lambda1_grid(&outer, DEFAULT_TOL).unwrap().lambda1;
        let hi = lambda1_grid(&inner, DEFAULT_TOL).unwrap().lambda1;
        assert!(lo <= hi * (1.0 + 1e-9), "{lo} > {hi}");
    }
}

#[test]
fn eigenfunction_has_one_sign_per_component() {
    let g = Grid::aligned(0.0, 2.0, 0.0, 1.0, 1.0 / 32.0).unwrap();
    let set = RasterSet::from_fn(g, |p| p.dist(Point2::new(0.5, 0.5)) < 0.4 || p.dist(Point2::new(1.5, 0.5)) < 0.3);
    let r = lambda1_grid(&set, DEFAULT_TOL).unwrap();
    let chi = r.eigenfunction.unwrap();
    let comps = components4(&set);
    for members in &comps.members {
        let signs: Vec<bool> = members.iter().map(|&k| chi.values()[k] > 0.0).collect();
        assert!(signs.iter().all(|&s| s == signs[0]));
    }
}

#[test]
fn stochastic_rectangle_eigenvalue() {
    let rect = shapes::rectangle(0.0, 1.0, 0.0, 2.0, 1.0 / 32.0, 2).unwrap();
    let starts = [Point2::new(0.5, 1.0), Point2::new(0.4, 0.8)];
    let r = lambda1_stochastic(&RngSpec::new(1, 0), &rect, &starts, &[0.1, 0.2, 0.3, 0.4, 0.5], 5000, 1e-4).unwrap();
    let exact = PI * PI * 1.25;
    assert!((r.lambda1 - exact).abs() < 0.1 * exact, "{}", r.lambda1);
}

#[test]
fn psi_is_at_least_one() {
    let disc = shapes::disc(Point2::ORIGIN, 1.0, 1.0 / 32.0, 2).unwrap();
    for lambda in [0.5, 2.0, 4.0] {
        let psi = solve_psi(&disc, lambda).unwrap();
        assert!(psi.min() >= 1.0);
        let phi = phi_and_residual(&psi, lambda).unwrap();
        assert!(phi.phi.max() <= 0.0);
        assert!(phi.inequalities_hold());
    }
}

#[test]
fn certificates_are_sound() {
    let mut g = ChaCha8Rng::seed_from_u64(12);
    let grid = Grid::aligned(0.0, 1.0, 0.0, 1.0, 1.0 / 32.0).unwrap();
    let mut certified = 0;
    for _ in 0..30 {
        let domain = random_blob(&mut g, grid);
        let l1 = lambda1_grid(&domain, DEFAULT_TOL).unwrap().lambda1;
        // a smooth positive trial function with a random center and width
        let c = Point2::new(g.random_range(0.3..0.7), g.random_range(0.3..0.7));
        let w = g.random_range(0.5..3.0);
        let psi = ScalarField::from_fn(domain.clone(), 0.0, |p| (-(p.dist(c) / w).powi(2)).exp()).unwrap();
        let lambda = l1 * g.random_range(0.01..1.5);
        let cert = certify_lower_bound(&domain, &psi, lambda);
        if cert.certified {
            certified += 1;
            assert!(lambda <= l1 * 1.02, "certified {lambda} above {l1}");
        }
    }
    assert!(certified > 0);
}

#[test]
fn segment_neighbourhoods_blow_up_and_square_ones_do_not() {
    let h = 1.0 / 128.0;
    let seg = shapes::segment(Point2::new(-0.5, 0.0), Point2::new(0.5, 0.0), h, 2).unwrap();
    let sq = shapes::rectangle(-0.5, 0.5, -0.5, 0.5, h, 2).unwrap();
    let l_sq = lambda1_grid(&sq, DEFAULT_TOL).unwrap().lambda1;
    let mut last = 0.0;
    for eps in [0.2, 0.1, 0.05] {
        let l = lambda1_grid(&dilate(&seg, eps).unwrap(), DEFAULT_TOL).unwrap().lambda1;
        assert!(l >= 1.5 * last, "{last} -> {l}");
        last = l;
        let s = lambda1_grid(&dilate(&sq, eps).unwrap(), DEFAULT_TOL).unwrap().lambda1;
        // the dilations contain the square, so they sit below it
        assert!(s <= l_sq && s >= 0.5 * l_sq, "{s} vs {l_sq}");
    }
}

#[test]
fn f_n_on_the_segment() {
    let h = 1.0 / 128.0;
    let seg = shapes::segment(Point2::new(-0.5, 0.0), Point2::new(0.5, 0.0), h, 2).unwrap();
    let eps: Vec<f64> = (0..30).map(|k| 1.2 * 0.9f64.powi(k)).filter(|&e| e >= h).collect();
    let r = build_fn(&seg, 3, &eps).unwrap();
    assert!(r.lambda1 * 0.95 > 9.0);
    for (i, j) in seg.occupied() {
        let p = seg.grid().center(i, j);
        let (fi, fj) = r.f.domain().grid().cell_of(p).unwrap();
        assert!(r.f.laplacian(fi, fj) >= 3.0 - 1e-6);
    }
    let sq = shapes::rectangle(-0.5, 0.5, -0.5, 0.5, 1.0 / 64.0, 2).unwrap();
    assert!(matches!(build_fn(&sq, 4, &[0.2, 0.1, 0.05]), Err(Error::NotThin)));
}
