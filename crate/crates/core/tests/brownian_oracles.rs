use thinlab::brownian::{exp_moment, sample_path, survival_probability, thinness_test, walk_sojourn};
use thinlab::dirichlet::{lambda1_grid, solve_psi, DEFAULT_TOL};
use thinlab::geometry::{shapes, Point2};
use thinlab::stats;
use thinlab::RngSpec;

fn unit_disc(h: f64) -> thinlab::RasterSet {
    shapes::disc(Point2::ORIGIN, 1.0, h, 2).unwrap()
}

#[test]
fn scaling_law() {
    // (1/√c)·γ(c·t) has the law of γ
    let c: f64 = 4.0;
    let n = 10_000;
    let feats = |scale: f64, t_end: f64, spec: RngSpec| -> (Vec<f64>, Vec<f64>) {
        (0..n as u64)
            .map(|i| {
                let p = sample_path(&spec.replica(i), Point2::ORIGIN, t_end, t_end / 64.0).unwrap();
                ((p.last().x) / scale, p.sup_norm() / scale)
            })
            .unzip()
    };
    let (e1, s1) = feats(1.0, 1.0, RngSpec::new(1, 0));
    let (e2, s2) = feats(c.sqrt(), c, RngSpec::new(2, 0));
    assert!(stats::f_test(&e1, &e2).1 > 0.01);
    assert!(stats::ks_two_sample(&e1, &e2).1 > 0.01);
    assert!(stats::ks_two_sample(&s1, &s2).1 > 0.01);
}

#[test]
fn finer_steps_do_not_lengthen_sojourns() {
    let disc = unit_disc(1.0 / 64.0);
    let n = 4000;
    let mean_sojourn = |dt: f64| {
        let spec = RngSpec::new(3, 0);
        let xs: Vec<f64> = (0..n as u64)
            .map(|i| walk_sojourn(&spec.replica(i), Point2::ORIGIN, &disc, dt, 1 << 30).steps_inside as f64 * dt)
            .collect();
        (stats::mean(&xs), stats::Z95 * (stats::variance(&xs) / n as f64).sqrt())
    };
    let (coarse, ci) = mean_sojourn(4e-3);
    let (fine, _) = mean_sojourn(2e-3);
    assert!(fine <= coarse + 2.0 * ci, "{coarse} -> {fine}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let disc = unit_disc(1.0 / 32.0);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            survival_probability(&RngSpec::new(5, 2), Point2::new(0.2, 0.1), &disc, 0.2, 2000, 1e-3).unwrap()
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn disc_survival_follows_the_leading_eigenmode() {
    let h = 1.0 / 64.0;
    let disc = unit_disc(h);
    let eig = lambda1_grid(&disc, DEFAULT_TOL).unwrap();
    let chi = eig.eigenfunction.as_ref().unwrap();
    let vals: Vec<f64> = chi.occupied_values().collect();
    // P(T > t) ≈ c₁·exp(−λ₁t) with c₁ = χ(x0)·∫χ / ∫χ²
    let c1 = chi.at(Point2::ORIGIN) * vals.iter().sum::<f64>() / vals.iter().map(|v| v * v).sum::<f64>();
    let expect = c1 * (-eig.lambda1).exp();
    let s = survival_probability(&RngSpec::new(6, 0), Point2::ORIGIN, &disc, 1.0, 20_000, 1e-4).unwrap();
    assert!((s.p_hat - expect).abs() < 3.0 * s.ci_half_width, "{} vs {expect}", s.p_hat);
}

#[test]
fn exp_moment_matches_psi_below_eigenvalue() {
    let h = 1.0 / 64.0;
    let disc = unit_disc(h);
    let psi = solve_psi(&disc, 2.0).unwrap();
    let m = exp_moment(&RngSpec::new(7, 0), Point2::ORIGIN, &disc, 2.0, 20_000, 1e-4, 20.0).unwrap();
    let hat = m.exp_moment_hat.unwrap();
    let ci = m.exp_moment_ci.unwrap();
    assert!(!m.divergence_suspect);
    assert!((hat - psi.at(Point2::ORIGIN)).abs() < 3.0 * ci, "{hat} ± {ci} vs {}", psi.at(Point2::ORIGIN));
}

#[test]
fn exp_moment_flags_supercritical_lambda() {
    let disc = unit_disc(1.0 / 32.0);
    let m = exp_moment(&RngSpec::new(8, 0), Point2::ORIGIN, &disc, 8.0, 2000, 1e-3, 0.5).unwrap();
    assert!(m.divergence_suspect);
}

#[test]
fn point_is_left_immediately() {
    let p = shapes::point(Point2::ORIGIN, 0.01, 2).unwrap();
    let s = survival_probability(&RngSpec::new(9, 0), Point2::ORIGIN, &p, 0.01, 1000, 1e-4).unwrap();
    assert!(s.p_hat < 0.01);
}

#[test]
fn filled_square_is_not_thin() {
    let sq = shapes::rectangle(-0.5, 0.5, -0.5, 0.5, 1.0 / 32.0, 2).unwrap();
    let r = thinness_test(&RngSpec::new(10, 0), &sq, 0.1, 0.1, &[0.2, 0.1, 0.05], 400, 1e-3).unwrap();
    assert!(!r.passed());
    assert!(r.rows.iter().all(|row| !row.pass && row.sup_p_hat > 0.1));
}
