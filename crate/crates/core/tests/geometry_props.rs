use num_complex::Complex64;
use proptest::prelude::*;
use thinlab::geometry::{
    boundary_of_unbounded_component, dilate, gamma0, separates_origin, shapes, sup_distance, winding_number,
    PathSample, Point2,
};
use thinlab::julia::{filled_julia, julia_set, square_grid, to_complex, to_point, PolynomialMap};
use thinlab::{Grid, RasterSet};

fn random_set(seed: &[bool], n: usize) -> RasterSet {
    let g = Grid::aligned(0.0, 1.0, 0.0, 1.0, 1.0 / n as f64).unwrap();
    let mut s = RasterSet::empty(g);
    for j in 2..n - 2 {
        for i in 2..n - 2 {
            if seed[(j * n + i) % seed.len()] {
                s.set(i, j, true);
            }
        }
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dilation_is_monotone_and_extensive(
        seed in prop::collection::vec(prop::bool::weighted(0.05), 97),
        e1 in prop_oneof![Just(0.0), 0.03125f64..0.15],
        e2 in prop_oneof![Just(0.0), 0.03125f64..0.15],
    ) {
        let s = random_set(&seed, 32);
        prop_assume!(!s.is_empty());
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let a = dilate(&s, lo).unwrap();
        let b = dilate(&s, hi).unwrap();
        // the same padding puts both on the largest grid
        let a = a.resample(b.grid());
        prop_assert!(a.is_subset_of(&b));
        prop_assert!(s.resample(a.grid()).is_subset_of(&a));
    }

    #[test]
    fn outer_boundary_is_a_subset_touching_the_outside(
        seed in prop::collection::vec(prop::bool::weighted(0.4), 61),
    ) {
        let s = random_set(&seed, 24);
        prop_assume!(!s.is_empty());
        let b = boundary_of_unbounded_component(&s).unwrap();
        prop_assert!(b.is_subset_of(&s));
        prop_assert!(!b.is_empty());
    }

    #[test]
    fn sup_distance_is_a_metric(
        a in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 9),
        b in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 5),
        c in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 7),
    ) {
        let path = |v: &[(f64, f64)]| {
            let n = v.len();
            let times = (0..n).map(|k| 1.0 + k as f64 / (n - 1) as f64).collect();
            PathSample::new(times, v.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap()
        };
        let (a, b, c) = (path(&a), path(&b), path(&c));
        let ab = sup_distance(&a, &b).unwrap();
        let ba = sup_distance(&b, &a).unwrap();
        let ac = sup_distance(&a, &c).unwrap();
        let cb = sup_distance(&c, &b).unwrap();
        prop_assert_eq!(sup_distance(&a, &a).unwrap(), 0.0);
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ab <= ac + cb + 1e-12);
    }
}

#[test]
fn separation_agrees_with_winding_on_random_polygons() {
    use rand::{Rng, SeedableRng};
    let mut g = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let resolution = 256;
    let (mut tested, mut inside) = (0, 0);
    while tested < 100 {
        // star-shaped, hence simple, polygon around a random center
        let c = Point2::new(g.random_range(-1.0..1.0), g.random_range(-1.0..1.0));
        let k = g.random_range(3..12);
        let mut angles: Vec<f64> = (0..k).map(|_| g.random_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let verts: Vec<Point2> =
            angles.iter().map(|&a| c + g.random_range(0.3..2.0) * Point2::new(a.cos(), a.sin())).collect();
        let mut closed = verts.clone();
        closed.push(verts[0]);
        let times = (0..closed.len()).map(|t| t as f64).collect();
        let path = PathSample::new(times, closed.clone()).unwrap();
        // keep the origin clear of the drawn trace
        let extent = closed.iter().fold(0.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs())) * 2.0;
        let clearance = closed.windows(2).map(|w| seg_dist(Point2::ORIGIN, w[0], w[1])).fold(f64::INFINITY, f64::min);
        if clearance < 4.0 * extent / resolution as f64 {
            continue;
        }
        let sep = separates_origin(&path, resolution).unwrap();
        let wn = winding_number(&verts, Point2::ORIGIN);
        assert_eq!(sep, wn != 0, "polygon {verts:?}");
        tested += 1;
        inside += usize::from(sep);
    }
    assert!(inside > 10 && inside < 90, "{inside} of 100 enclose the origin");
}

fn seg_dist(p: Point2, a: Point2, b: Point2) -> f64 {
    let d = b - a;
    let s = ((p - a).x * d.x + (p - a).y * d.y) / d.norm_sq();
    p.dist(a.lerp(b, s.clamp(0.0, 1.0)))
}

#[test]
fn gamma0_with_moved_vertex() {
    let g = gamma0(1).unwrap();
    let mut pts = g.points().to_vec();
    pts[2] = pts[2] + Point2::new(0.2, 0.0);
    let moved = PathSample::new(g.times().to_vec(), pts).unwrap();
    assert!((sup_distance(&g, &moved).unwrap() - 0.2).abs() < 1e-12);
    let shifted = g.translate(Point2::new(0.3, 0.4));
    assert!((sup_distance(&g, &shifted).unwrap() - 0.5).abs() < 1e-12);
}

fn circle_deviation(set: &RasterSet) -> f64 {
    set.occupied_centers().iter().map(|p| (p.norm() - 1.0).abs()).fold(0.0, f64::max)
}

#[test]
fn julia_sets_of_classical_maps() {
    let grid = square_grid(2.5, 128).unwrap();
    let h = grid.h();
    let z2 = PolynomialMap::quadratic(Complex64::new(0.0, 0.0), 100).unwrap();
    let filled = filled_julia(&z2, &grid).unwrap();
    for (i, j) in (0..grid.ny()).flat_map(|j| (0..grid.nx()).map(move |i| (i, j))) {
        let r = grid.center(i, j).norm();
        if (r - 1.0).abs() > 2.0 * h {
            assert_eq!(filled.get(i, j), r < 1.0, "cell at radius {r}");
        }
    }
    let j = julia_set(&PolynomialMap::quadratic(Complex64::new(0.0, 0.0), 256).unwrap(), &grid).unwrap();
    assert!(circle_deviation(&j) <= 2.0 * h);

    let grid = square_grid(4.5, 64).unwrap();
    let cheb = PolynomialMap::quadratic(Complex64::new(-2.0, 0.0), 200).unwrap();
    let k = julia_set(&cheb, &grid).unwrap();
    let h = grid.h();
    for p in k.occupied_centers() {
        assert!(p.y.abs() <= 2.0 * h && p.x.abs() <= 2.0 + 2.0 * h, "{p:?}");
    }
}

#[test]
fn julia_invariants() {
    let grid = square_grid(3.5, 64).unwrap();
    let base = PolynomialMap::quadratic(Complex64::new(-1.0, 0.0), 64).unwrap();
    let mut last = filled_julia(&base, &grid).unwrap();
    for it in [128, 256, 512] {
        let next = filled_julia(&base.with_max_iter(it), &grid).unwrap();
        assert!(next.is_subset_of(&last));
        last = next;
    }
    let map = base.with_max_iter(256);
    let filled = filled_julia(&map, &grid).unwrap();
    let j = julia_set(&map, &grid).unwrap();
    assert!(j.is_subset_of(&filled));

    // forward invariance of the boundary up to the raster error
    let lip = map.lipschitz_on(&grid);
    let tol = 2.0 * grid.h() * lip;
    let pts = j.occupied_centers();
    let step = (pts.len() / 1000).max(1);
    for p in pts.iter().step_by(step) {
        let image = to_point(map.eval(to_complex(*p)));
        let near = thinlab::geometry::distance_to_set(&j, image);
        assert!(near <= tol, "{p:?} maps {near} away");
    }
}

#[test]
fn basilica_area_shrinks() {
    let map = PolynomialMap::quadratic(Complex64::new(-1.0, 0.0), 256).unwrap();
    let a = julia_set(&map, &square_grid(3.5, 64).unwrap()).unwrap().area();
    let b = julia_set(&map, &square_grid(3.5, 128).unwrap()).unwrap().area();
    assert!(b / a < 0.7, "{a} -> {b}");
}

#[test]
fn segment_and_disc_shapes() {
    let s = shapes::segment(Point2::new(-0.5, 0.0), Point2::new(0.5, 0.0), 0.01, 2).unwrap();
    assert!(s.contains(Point2::new(0.2, 0.0)) && !s.contains(Point2::new(0.2, 0.03)));
    let d = shapes::disc(Point2::ORIGIN, 1.0, 0.01, 2).unwrap();
    assert!((d.area() - std::f64::consts::PI).abs() < 0.01);
}
