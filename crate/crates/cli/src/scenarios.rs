//! The experiments runnable from the command line.

use serde::Serialize;
use thinlab::brownian::{exp_moment, survival_probability, thinness_test};
use thinlab::dirichlet::{build_fn, lambda1_grid, lambda1_stochastic, solve_psi, EigenResult, DEFAULT_TOL};
use thinlab::geometry::{
    dilate, distance_to_set, gamma0, rasterize_polyline, separates_origin, Grid, PathSample, Point2, GAMMA0_VERTICES,
};
use thinlab::julia::{filled_julia, julia_set, square_grid};
use thinlab::renorm::{
    conditioned_law_check, run_cascades, separation_stress, tube_survival_mc, tube_survival_pde, ExitCheck,
    RenormConfig, RenormTrace,
};
use thinlab::{Error, RngSpec};

use crate::config::Config;
use crate::error::CliError;
use crate::sets::{self, julia_raster, parse_quadratic, SET_KEYS};
use crate::summary::Recorder;

pub const SCENARIOS: [&str; 9] =
    ["julia-set", "eigen", "sojourn", "thinness", "fn-build", "p0", "cascade", "separation", "law-check"];

/// Accepted keys of `scenario` with their defaults; an empty default means
/// optional.
pub fn keys(scenario: &str) -> Option<Vec<(&'static str, &'static str)>> {
    let own: &[(&str, &str)] = match scenario {
        "julia-set" => &[
            ("map", "z^2-1"),
            ("c_im", "0"),
            ("resolution", "128"),
            ("max_iter", "256"),
            ("area_halving", "true"),
            ("eig_eps", ""),
        ],
        "eigen" => &[
            ("method", "both"),
            ("tol", ""),
            ("closed_tol", ""),
            ("stochastic_tol", "0.1"),
            ("n", "100000"),
            ("dt", "1e-4"),
            ("t_grid", ""),
            ("write_field", "true"),
        ],
        "sojourn" => &[
            ("x0", ""),
            ("t", "1"),
            ("n", "20000"),
            ("dt", "1e-4"),
            ("lambda", ""),
            ("t_cap", "20"),
            ("oracle", "auto"),
        ],
        "thinness" => {
            &[("t", "0.1"), ("delta", "0.1"), ("eps", "0.2,0.1,0.05"), ("n", "400"), ("dt", "1e-3"), ("expect", "any")]
        }
        "fn-build" => &[("ns", "2,3,4"), ("eps", ""), ("expect", "any")],
        "p0" => &[
            ("radius", "1/3"),
            ("h_rel", "64"),
            ("dt_rel", "1/4"),
            ("halving", "true"),
            ("halving_tol", "0.1"),
            ("mc_n", "0"),
            ("mc_dt", "1e-3"),
        ],
        "cascade" => &[
            ("delta", "1"),
            ("levels", "4"),
            ("replicas", "1000"),
            ("radius_close", "1/2"),
            ("radius_p0", "1/3"),
            ("p0", ""),
            ("dt_rel", "1/256"),
            ("map", "z^2"),
            ("c_im", "0"),
            ("resolution", "128"),
            ("x0", "1,0"),
            ("forced", "false"),
            ("oracle", "true"),
        ],
        "separation" => &[("n", "10000"), ("radius", "0.45"), ("resolution", "256"), ("control", "true")],
        "law-check" => &[("b", "0.5,-0.3"), ("T", "1"), ("Tp", "1/4"), ("n", "100000"), ("alpha", "0.01")],
        _ => return None,
    };
    let mut all = own.to_vec();
    if matches!(scenario, "eigen" | "sojourn" | "thinness" | "fn-build") {
        for (k, d) in SET_KEYS {
            let d = match (scenario, k) {
                ("thinness" | "fn-build", "shape") => "segment",
                ("fn-build", "h") => "1/128",
                _ => d,
            };
            all.push((k, d));
        }
    }
    Some(all)
}

pub fn run(scenario: &str, cfg: &Config, rng: &RngSpec, rec: &mut Recorder) -> Result<(), CliError> {
    match scenario {
        "julia-set" => julia(cfg, rec),
        "eigen" => eigen(cfg, rng, rec),
        "sojourn" => sojourn(cfg, rng, rec),
        "thinness" => thinness(cfg, rng, rec),
        "fn-build" => fn_build(cfg, rec),
        "p0" => p0(cfg, rng, rec),
        "cascade" => cascade(cfg, rng, rec),
        "separation" => separation(cfg, rng, rec),
        "law-check" => law(cfg, rng, rec),
        other => Err(CliError::Usage(format!("unknown scenario {other:?}"))),
    }
}

fn point(cfg: &Config, key: &str) -> Result<Option<Point2>, CliError> {
    let Some(v) = cfg.raw(key).filter(|v| !v.is_empty()) else {
        return Ok(None);
    };
    let xy: Vec<f64> = cfg.f64_list(key)?;
    match xy[..] {
        [x, y] => Ok(Some(Point2::new(x, y))),
        _ => Err(CliError::Usage(format!("{key}: expected x,y, got {v:?}"))),
    }
}

fn quadratic(cfg: &Config, max_iter: usize) -> Result<thinlab::julia::PolynomialMap, CliError> {
    let text = cfg.str("map")?;
    parse_quadratic(text, cfg.f64("c_im")?, max_iter)
        .ok_or_else(|| CliError::Usage(format!("map: expected z^2+c, got {text:?}")))
}

fn julia(cfg: &Config, rec: &mut Recorder) -> Result<(), CliError> {
    let resolution = cfg.usize("resolution")?;
    let map = quadratic(cfg, cfg.usize("max_iter")?)?;
    let half = (map.escape_radius() + 0.5).ceil();
    let grid = square_grid(half, resolution)?;
    let j = julia_set(&map, &grid)?;
    let filled = filled_julia(&map, &grid)?;
    let h = grid.h();
    rec.raster("julia.pgm", &j)?;
    rec.raster("filled.pgm", &filled)?;
    rec.metric("h", h);
    rec.metric("julia_cells", j.count() as f64);
    rec.metric("filled_area", filled.area());

    let c = map.coefficients()[0];
    if c.im == 0.0 && (c.re == 0.0 || c.re == -2.0) {
        let (name, off, target): (&str, fn(Point2) -> f64, Vec<Point2>) = if c.re == 0.0 {
            let circle = (0..720).map(|k| {
                let a = k as f64 * std::f64::consts::PI / 360.0;
                Point2::new(a.cos(), a.sin())
            });
            ("circle", |p| (p.norm() - 1.0).abs(), circle.collect())
        } else {
            let seg = (0..=800).map(|k| Point2::new(-2.0 + k as f64 / 200.0, 0.0));
            ("segment", |p| Point2::new(p.x.clamp(-2.0, 2.0), 0.0).dist(p), seg.collect())
        };
        let deviation = j.occupied_centers().into_iter().map(off).fold(0.0, f64::max);
        let gap = target.iter().map(|&p| distance_to_set(&j, p)).fold(0.0, f64::max);
        rec.metric(&format!("{name}_deviation"), deviation);
        rec.metric(&format!("{name}_gap"), gap);
        rec.check(
            &format!("{name}_within_two_cells"),
            deviation <= 2.0 * h && gap <= 2.0 * h,
            format!("deviation {deviation:.3e}, gap {gap:.3e}, 2h = {:.3e}", 2.0 * h),
        );
    }

    if cfg.bool("area_halving")? {
        let coarse = julia_raster(&map, resolution / 2)?;
        let ratio = j.area() / coarse.area();
        rec.metric("area_ratio", ratio);
        rec.check("area_shrinks_under_refinement", ratio < 0.7, format!("area ratio {ratio:.4}"));
    }

    if cfg.raw("eig_eps").is_some_and(|v| !v.is_empty()) {
        let mut eps = cfg.f64_list("eig_eps")?;
        eps.sort_by(|a, b| b.total_cmp(a));
        let mut lambdas = Vec::with_capacity(eps.len());
        for &e in &eps {
            let l = lambda1_grid(&dilate(&j, e)?, DEFAULT_TOL)?.lambda1;
            rec.metric(&format!("lambda1_eps_{e}"), l);
            lambdas.push(l);
        }
        let increasing = lambdas.windows(2).all(|w| w[1] > w[0]);
        rec.check("lambda1_increases_as_eps_shrinks", increasing, format!("{lambdas:?}"));
    }
    Ok(())
}

#[derive(Serialize)]
struct EigenOut<'a> {
    shape: &'a str,
    closed_form: Option<f64>,
    grid: Option<&'a EigenResult>,
    stochastic: Option<&'a EigenResult>,
}

fn eigen(cfg: &Config, rng: &RngSpec, rec: &mut Recorder) -> Result<(), CliError> {
    let named = sets::build(cfg)?;
    let shape = cfg.str("shape")?;
    let method = cfg.choice("method", &["grid", "stochastic", "both"])?;
    let tol = cfg.opt_f64("tol")?.unwrap_or(DEFAULT_TOL);
    let closed_tol = match cfg.opt_f64("closed_tol")? {
        Some(t) => t,
        None if shape == "unit-disc" => 0.02,
        None => 0.01,
    };

    let grid =
        if method != "stochastic" || named.lambda1.is_none() { Some(lambda1_grid(&named.set, tol)?) } else { None };
    if let Some(g) = &grid {
        rec.metric("lambda1_grid", g.lambda1);
        if let Some(exact) = named.lambda1 {
            let rel = (g.lambda1 - exact).abs() / exact;
            rec.metric("grid_rel_error", rel);
            rec.check(
                "grid_matches_closed_form",
                rel <= closed_tol,
                format!("{} vs {exact}, rel {rel:.2e}", g.lambda1),
            );
        }
        if cfg.bool("write_field")? {
            if let Some(f) = &g.eigenfunction {
                rec.text("eigenfunction.csv", &f.to_csv())?;
            }
        }
    }

    let stochastic = if method != "grid" {
        let reference = named.lambda1.or(grid.as_ref().map(|g| g.lambda1)).ok_or(Error::EmptySet)?;
        let t_grid = match cfg.raw("t_grid").filter(|v| !v.is_empty()) {
            Some(_) => cfg.f64_list("t_grid")?,
            None => (1..=6).map(|k| k as f64 / reference).collect(),
        };
        let s = lambda1_stochastic(rng, &named.set, &[named.center], &t_grid, cfg.usize("n")?, cfg.f64("dt")?)?;
        rec.metric("lambda1_stochastic", s.lambda1);
        let (against, what) = match &grid {
            Some(g) => (g.lambda1, "grid"),
            None => (reference, "closed form"),
        };
        let rel = (s.lambda1 - against).abs() / against;
        rec.metric("stochastic_rel_error", rel);
        let stol = cfg.f64("stochastic_tol")?;
        rec.check("stochastic_matches", rel <= stol, format!("{} vs {what} {against}, rel {rel:.3}", s.lambda1));
        Some(s)
    } else {
        None
    };

    let out = EigenOut { shape, closed_form: named.lambda1, grid: grid.as_ref(), stochastic: stochastic.as_ref() };
    rec.json("eigen.json", &out)
}

fn sojourn(cfg: &Config, rng: &RngSpec, rec: &mut Recorder) -> Result<(), CliError> {
    let named = sets::build(cfg)?;
    let x0 = point(cfg, "x0")?.unwrap_or(named.center);
    let (t, n, dt) = (cfg.f64("t")?, cfg.usize("n")?, cfg.f64("dt")?);
    let oracle = cfg.choice("oracle", &["auto", "eigenmode", "none"])?;
    let s = survival_probability(&rng.fork(0), x0, &named.set, t, n, dt)?;
    rec.metric("p_hat", s.p_hat);
    rec.metric("ci", s.ci_half_width);
    let mut csv = format!("{},kind\n", thinlab::brownian::SojournStats::CSV_HEADER);
    csv.push_str(&format!("{},survival\n", s.csv_row(0.0, x0, "-")));

    let lambda = cfg.opt_f64("lambda")?;
    let eig = if oracle != "none" || lambda.is_some() { Some(lambda1_grid(&named.set, DEFAULT_TOL)?) } else { None };
    if let Some(e) = &eig {
        rec.metric("lambda1_grid", e.lambda1);
        let use_mode = oracle == "eigenmode" || (oracle == "auto" && t * e.lambda1 >= 4.0);
        if let (true, Some(chi)) = (use_mode, &e.eigenfunction) {
            let vals: Vec<f64> = chi.occupied_values().collect();
            let c1 = chi.at(x0) * vals.iter().sum::<f64>() / vals.iter().map(|v| v * v).sum::<f64>();
            let expect = c1 * (-e.lambda1 * t).exp();
            rec.metric("p_eigenmode", expect);
            let ok = (s.p_hat - expect).abs() < 3.0 * s.ci_half_width.max(1.0 / n as f64);
            rec.check("survival_follows_eigenmode", ok, format!("{} ± {} vs {expect}", s.p_hat, s.ci_half_width));
        }
    }

    if let (Some(lambda), Some(e)) = (lambda, &eig) {
        let m = exp_moment(&rng.fork(1), x0, &named.set, lambda, n, dt, cfg.f64("t_cap")?)?;
        let hat = m.exp_moment_hat.unwrap_or(f64::NAN);
        let ci = m.exp_moment_ci.unwrap_or(f64::NAN);
        csv.push_str(&format!(
            "{},exp_moment\n",
            m.csv_row(0.0, x0, if m.divergence_suspect { "divergent" } else { "-" })
        ));
        rec.metric("exp_moment_hat", hat);
        rec.metric("exp_moment_ci", ci);
        if m.divergence_suspect {
            rec.flag(format!("exp_moment diverges: {} of {n} walks reached the cap", m.truncated));
        }
        if lambda < e.lambda1 {
            let psi = solve_psi(&named.set, lambda)?.at(x0);
            rec.metric("psi", psi);
            let ok = !m.divergence_suspect && (hat - psi).abs() < 3.0 * ci;
            rec.check("exp_moment_matches_psi", ok, format!("{hat} ± {ci} vs {psi}"));
        } else {
            rec.check(
                "exp_moment_flagged_divergent",
                m.divergence_suspect,
                format!("lambda {lambda} >= lambda1 {}, truncated {}", e.lambda1, m.truncated),
            );
        }
    }
    rec.text("sojourn.csv", &csv)
}

fn thinness(cfg: &Config, rng: &RngSpec, rec: &mut Recorder) -> Result<(), CliError> {
    let named = sets::build(cfg)?;
    let expect = cfg.choice("expect", &["pass", "fail", "any"])?;
    let r = thinness_test(
        rng,
        &named.set,
        cfg.f64("t")?,
        cfg.f64("delta")?,
        &cfg.f64_list("eps")?,
        cfg.usize("n")?,
        cfg.f64("dt")?,
    )?;
    for row in &r.rows {
        rec.metric(&format!("sup_p_hat_eps_{}", row.eps), row.sup_p_hat);
    }
    if let Some(eps) = r.pass_eps {
        rec.metric("pass_eps", eps);
    }
    match expect {
        "pass" => rec.check("thin", r.passed(), format!("pass_eps {:?}", r.pass_eps)),
        "fail" => rec.check("not_thin", !r.passed(), format!("pass_eps {:?}", r.pass_eps)),
        _ => {}
    }
    for m in &r.markov {
        rec.metric(&format!("markov_k{}_sup_p_hat", m.k), m.sup_p_hat);
        rec.check(
            &format!("markov_k{}", m.k),
            m.holds,
            format!("sup p {:.4} vs delta_hat^{} = {:.4}", m.sup_p_hat, m.k, m.delta_hat.powi(m.k as i32)),
        );
    }
    rec.text("thinness.csv", &r.to_csv())?;
    rec.json("thinness.json", &r)
}

fn fn_build(cfg: &Config, rec: &mut Recorder) -> Result<(), CliError> {
    let named = sets::build(cfg)?;
    let set = &named.set;
    let expect = cfg.choice("expect", &["thin", "not-thin", "any"])?;
    let eps = match cfg.raw("eps").filter(|v| !v.is_empty()) {
        Some(_) => cfg.f64_list("eps")?,
        None => (0..60).map(|k| 1.2 * 0.9f64.powi(k)).filter(|&e| e >= set.h()).collect(),
    };
    let mut last_max = f64::INFINITY;
    let mut ns = cfg.usize_list("ns")?;
    ns.sort_unstable();
    let mut eps_max = f64::INFINITY;
    for n in ns {
        let n32 = u32::try_from(n).map_err(|_| CliError::Usage(format!("ns: {n} too large")))?;
        let schedule: Vec<f64> = eps.iter().copied().filter(|&e| e <= eps_max).collect();
        if schedule.is_empty() {
            rec.flag(format!("n = {n}: eps schedule exhausted"));
            rec.check(&format!("f{n}_expected"), expect != "thin", "not thin");
            continue;
        }
        match build_fn(set, n32, &schedule) {
            Ok(r) => {
                let nf = n as f64;
                let mut min_lap = f64::INFINITY;
                for (i, j) in set.occupied() {
                    let (fi, fj) =
                        r.f.domain()
                            .grid()
                            .cell_of(set.grid().center(i, j))
                            .ok_or_else(|| CliError::Usage("f_n domain misses a cell of the set".into()))?;
                    min_lap = min_lap.min(r.f.laplacian(fi, fj));
                }
                let max_abs = r.f.max_abs();
                rec.metric(&format!("f{n}_eps"), r.eps);
                rec.metric(&format!("f{n}_lambda1"), r.lambda1);
                rec.metric(&format!("f{n}_min_laplacian"), min_lap);
                rec.metric(&format!("f{n}_max_abs"), max_abs);
                rec.check(
                    &format!("f{n}_laplacian_at_least_n"),
                    min_lap >= nf - 1e-6 * nf,
                    format!("min {min_lap:.6}"),
                );
                rec.check(
                    &format!("f{n}_max_abs_decreasing"),
                    max_abs < last_max,
                    format!("{max_abs:.6} after {last_max:.6}"),
                );
                rec.check(&format!("f{n}_expected"), expect != "not-thin", "built although not-thin was expected");
                last_max = max_abs;
                eps_max = r.eps;
                rec.text(&format!("f_{n}.csv"), &r.f.to_csv())?;
            }
            Err(Error::NotThin) => {
                rec.flag(format!("n = {n}: no eps in the schedule has lambda1 large enough"));
                rec.check(&format!("f{n}_expected"), expect != "thin", "not thin");
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct P0Out {
    pde: thinlab::renorm::TubeSurvival,
    halved: Option<thinlab::renorm::TubeSurvival>,
    mc: Option<thinlab::renorm::TubeMonteCarlo>,
}

fn p0(cfg: &Config, rng: &RngSpec, rec: &mut Recorder) -> Result<(), CliError> {
    let radius = cfg.f64("radius")?;
    let h = radius / cfg.f64("h_rel")?;
    let dt_rel = cfg.f64("dt_rel")?;
    let pde = tube_survival_pde(radius, h, dt_rel * h * h)?;
    rec.metric("log10_p", pde.log10_p);
    rec.check("positive", pde.log10_p.is_finite(), format!("log10 p = {}", pde.log10_p));
    let halved = if cfg.bool("halving")? {
        let fine = tube_survival_pde(radius, h / 2.0, dt_rel * h * h / 4.0)?;
        let rel = (fine.log10_p - pde.log10_p).abs() / pde.log10_p.abs().max(1e-12);
        rec.metric("log10_p_half_h", fine.log10_p);
        rec.metric("halving_rel_change", rel);
        let tol = cfg.f64("halving_tol")?;
        rec.check("stable_under_halving", rel <= tol, format!("{} -> {}", pde.log10_p, fine.log10_p));
        Some(fine)
    } else {
        None
    };
    let mc_n = cfg.usize("mc_n")?;
    let mc = if mc_n > 0 {
        let mc = tube_survival_mc(rng, radius, mc_n, cfg.f64("mc_dt")?)?;
        let p = pde.p();
        rec.metric("mc_p_hat", mc.p_hat);
        rec.metric("mc_se", mc.se);
        rec.check("mc_agrees", (mc.p_hat - p).abs() < 3.0 * mc.se, format!("{} ± {} vs {p}", mc.p_hat, mc.se));
        Some(mc)
    } else {
        None
    };
    rec.json("p0.json", &P0Out { pde, halved, mc })
}

#[derive(Serialize)]
struct CascadeOut {
    replicas: usize,
    p0: f64,
    p_oracle: Option<f64>,
    a1_frequency: f64,
    b_frequency: Vec<f64>,
    unresolved: usize,
    max_exit_time_bound: Option<f64>,
}

fn cascade(cfg: &Config, rng: &RngSpec, rec: &mut Recorder) -> Result<(), CliError> {
    let map = quadratic(cfg, thinlab::julia::DEFAULT_MAX_ITER)?;
    let k = julia_raster(&map, cfg.usize("resolution")?)?;
    let x0 = point(cfg, "x0")?.ok_or_else(|| CliError::Usage("x0 is required".into()))?;
    let delta = cfg.f64("delta")?;
    let levels = cfg.usize("levels")?;
    let mut rc = RenormConfig::new(k, x0, delta, levels);
    rc.tube_radius_close = cfg.f64("radius_close")?;
    rc.tube_radius_p0 = cfg.f64("radius_p0")?;
    rc.dt_rel = cfg.f64("dt_rel")?;
    rc.p0 = cfg.opt_f64("p0")?;
    rc.forced_success = cfg.bool("forced")?;
    let p0 = rc.resolve_p0()?;
    rc.p0 = Some(p0);
    rec.metric("p0", p0);

    let replicas = cfg.usize("replicas")?;
    let traces = run_cascades(rng, &rc, replicas)?;
    let n = replicas as f64;

    let mut csv = format!("replica,{}\n", RenormTrace::CSV_HEADER);
    for (i, tr) in traces.iter().enumerate() {
        for line in tr.to_csv().lines().skip(1) {
            csv.push_str(&format!("{i},{line}\n"));
        }
    }
    rec.text("cascade.csv", &csv)?;

    let halving = traces.iter().all(RenormTrace::halving_holds);
    rec.check("times_halve", halving, "T_{n+1} < T_n / 2 on every replica");
    let contained = traces.iter().filter(|t| !t.exits_confirmed()).count();
    rec.check("exits_confirmed", contained == 0, format!("{contained} replicas stayed in K"));
    let unresolved: usize = traces.iter().map(RenormTrace::unresolved).sum();
    rec.metric("unresolved_exit_checks", unresolved as f64);
    if unresolved > 0 {
        rec.flag(format!("{unresolved} exit checks below raster resolution"));
    }
    let max_bound = traces.iter().filter_map(|t| t.exit_time_bound).reduce(f64::max);
    if let Some(b) = max_bound {
        rec.metric("max_exit_time_bound", b);
        rec.check("exit_within_two_delta", b <= 2.0 * delta, format!("{b} vs {}", 2.0 * delta));
    }

    let a1 = traces.iter().filter(|t| t.a_outcomes[0]).count() as f64 / n;
    rec.metric("a1_frequency", a1);
    let b_freq: Vec<f64> = (0..levels).map(|l| traces.iter().filter(|t| t.b_prefix()[l]).count() as f64 / n).collect();
    for (l, f) in b_freq.iter().enumerate() {
        rec.metric(&format!("b{}_frequency", l + 1), *f);
    }

    if rc.forced_success {
        let all = traces.iter().all(|t| t.a_outcomes.iter().all(|&a| a));
        rec.check("forced_success_holds", all, "A_n on every level");
        let left = traces.iter().all(|t| t.exit_checks[0] == Some(ExitCheck::Left));
        rec.check("forced_path_leaves_k", left, "first window leaves K");
    }

    let p_oracle = if cfg.bool("oracle")? && !rc.forced_success {
        let r = rc.tube_radius_close;
        let h = r / 64.0;
        let p = tube_survival_pde(r, h, h * h / 4.0)?.p();
        rec.metric("p_oracle", p);
        let sigma = (a1 * (1.0 - a1)).max(p * (1.0 - p)).sqrt() / n.sqrt();
        rec.check("a1_matches_oracle", a1 + 3.0 * sigma >= p, format!("{a1} ± {sigma} vs {p}"));
        rec.check("a1_at_least_half_p0", a1 + 3.0 * sigma >= p0 / 2.0, format!("{a1} ± {sigma} vs {}", p0 / 2.0));
        for (l, &f) in b_freq.iter().enumerate() {
            let bound = (1.0 - p / 2.0).powi(l as i32 + 1);
            let sigma = (f * (1.0 - f) / n).sqrt();
            rec.check(&format!("b{}_bound", l + 1), f - 3.0 * sigma <= bound, format!("{f} ± {sigma} vs {bound}"));
        }
        Some(p)
    } else {
        None
    };

    let out = CascadeOut {
        replicas,
        p0,
        p_oracle,
        a1_frequency: a1,
        b_frequency: b_freq,
        unresolved,
        max_exit_time_bound: max_bound,
    };
    rec.json("cascade.json", &out)
}

fn separation(cfg: &Config, rng: &RngSpec, rec: &mut Recorder) -> Result<(), CliError> {
    let resolution = cfg.usize("resolution")?;
    let r = separation_stress(rng, cfg.usize("n")?, cfg.f64("radius")?, resolution)?;
    rec.metric("max_sup", r.max_sup);
    rec.metric("counterexamples", r.counterexamples.len() as f64);
    rec.check("all_separate", r.passed(), format!("{} of {} failed", r.counterexamples.len(), r.n));
    for (k, p) in r.counterexamples.iter().enumerate() {
        rec.text(&format!("counterexample_{k}.csv"), &p.to_csv())?;
    }

    let g0 = gamma0(64)?;
    rec.text("gamma0.csv", &g0.to_csv())?;
    let grid = Grid::aligned(-3.0, 2.0, -2.0, 3.0, 1.0 / 64.0)?;
    let tube = dilate(&rasterize_polyline(&grid, g0.points()), 0.5)?;
    rec.raster("gamma0_tube.pgm", &tube)?;

    if cfg.bool("control")? {
        let mut pts: Vec<Point2> = GAMMA0_VERTICES.iter().map(|v| v.1).collect();
        pts[4] = pts[4] + Point2::new(-3.0, 0.0);
        let control = PathSample::new(GAMMA0_VERTICES.iter().map(|v| v.0).collect(), pts)?;
        let separates = separates_origin(&control, resolution)?;
        rec.check("control_does_not_separate", !separates, "γ₀ with its last vertex moved by (-3, 0)");
    }
    rec.json(
        "separation.json",
        &serde_json::json!({ "n": r.n, "radius": r.radius, "resolution": r.resolution,
            "max_sup": r.max_sup, "counterexamples": r.counterexamples.len() }),
    )
}

fn law(cfg: &Config, rng: &RngSpec, rec: &mut Recorder) -> Result<(), CliError> {
    let b = point(cfg, "b")?.ok_or_else(|| CliError::Usage("b is required".into()))?;
    let alpha = cfg.f64("alpha")?;
    let r = conditioned_law_check(rng, b, cfg.f64("T")?, cfg.f64("Tp")?, cfg.usize("n")?)?;
    let mut csv = String::from("test,statistic,p_value\n");
    for t in &r.tests {
        csv.push_str(&format!("{},{},{}\n", t.name, t.statistic, t.p_value));
        rec.check(&t.name, t.p_value > alpha, format!("p = {:.4}", t.p_value));
    }
    rec.metric("min_p_value", r.min_p_value());
    rec.text("law.csv", &csv)?;
    rec.json("law.json", &r)
}
