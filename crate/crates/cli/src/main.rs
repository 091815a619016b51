mod config;
mod error;
mod render;
mod replay;
mod scenarios;
mod sets;
mod summary;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use thinlab::RngSpec;

use config::Config;
use error::CliError;
use summary::{Recorder, RunSummary};

/// Numerical experiments on thin sets, Brownian sojourns and Julia sets.
#[derive(Parser)]
#[command(name = "thinlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario configuration (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, default `out/<scenario>`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Raster Julia set of z²+c with classical-map checks.
    JuliaSet(RunArgs),
    /// First Dirichlet eigenvalue, by grid and/or Brownian survival.
    Eigen(RunArgs),
    /// Survival probability and exponential moment of the exit time.
    Sojourn(RunArgs),
    /// Quantitative thinness test over an ε schedule.
    Thinness(RunArgs),
    /// The f_n functions with Δf_n ≥ n on a thin set.
    FnBuild(RunArgs),
    /// Tube survival probability p₀ by the Fokker–Planck solver.
    P0(RunArgs),
    /// Renormalized Brownian cascade near a point of K.
    Cascade(RunArgs),
    /// Separation of the origin by perturbations of γ₀.
    Separation(RunArgs),
    /// Two constructions of the renormalized segment compared in law.
    LawCheck(RunArgs),
    /// Rerun a recorded scenario and compare its artifacts byte for byte.
    Replay { summary: PathBuf },
    /// Render a PGM raster with .pgm and .csv overlays to PNG.
    Render {
        raster: PathBuf,
        overlays: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Resolves `cfg` for `scenario`, runs it into `out` and writes the summary.
pub(crate) fn run_scenario(
    scenario: &str,
    mut cfg: Config,
    seed: u64,
    out: &Path,
    config_path: Option<String>,
) -> Result<RunSummary, CliError> {
    let keys = scenarios::keys(scenario).ok_or_else(|| {
        CliError::Usage(format!("unknown scenario {scenario:?}, expected one of {}", scenarios::SCENARIOS.join(", ")))
    })?;
    cfg.resolve(&keys)?;
    if let Some(named) = cfg.raw("scenario") {
        if named != scenario {
            return Err(CliError::Usage(format!("config is for scenario {named:?}, not {scenario:?}")));
        }
    }
    cfg.set("scenario", scenario);
    cfg.set("seed", seed);
    std::fs::create_dir_all(out)?;
    let start = Instant::now();
    let mut rec = Recorder::new(out.to_path_buf(), scenario, seed, cfg.resolved());
    scenarios::run(scenario, &cfg, &RngSpec::new(seed, 0), &mut rec)?;
    let summary = rec.finish(start.elapsed().as_secs_f64(), config_path);
    summary.write(out)?;
    Ok(summary)
}

fn run_args(scenario: &str, args: RunArgs) -> Result<RunSummary, CliError> {
    let cfg = match &args.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let seed = match args.seed {
        Some(s) => s,
        None => match cfg.raw("seed") {
            Some(v) => v.parse().map_err(|_| CliError::Usage(format!("seed: not an integer: {v:?}")))?,
            None => 0,
        },
    };
    let out = args.out.or_else(|| cfg.raw("out").map(PathBuf::from)).unwrap_or_else(|| Path::new("out").join(scenario));
    let summary = run_scenario(scenario, cfg, seed, &out, args.config.map(|p| p.display().to_string()))?;
    println!("{}", out.join(summary::SUMMARY_FILE).display());
    Ok(summary)
}

fn report(summary: &RunSummary) -> ExitCode {
    for (k, v) in &summary.metrics {
        println!("{k} = {v}");
    }
    for f in &summary.flags {
        println!("flag: {f}");
    }
    if summary.passed {
        println!("{}: passed", summary.scenario);
        ExitCode::SUCCESS
    } else {
        for a in summary.failures() {
            eprintln!("FAILED {}: {}", a.name, a.detail);
        }
        ExitCode::from(1)
    }
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("THINLAB_THREADS") {
        let n: usize = v.parse().map_err(|_| CliError::Usage(format!("THINLAB_THREADS: not an integer: {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match cli.command {
        Command::JuliaSet(a) => run_args("julia-set", a).map(|s| report(&s)),
        Command::Eigen(a) => run_args("eigen", a).map(|s| report(&s)),
        Command::Sojourn(a) => run_args("sojourn", a).map(|s| report(&s)),
        Command::Thinness(a) => run_args("thinness", a).map(|s| report(&s)),
        Command::FnBuild(a) => run_args("fn-build", a).map(|s| report(&s)),
        Command::P0(a) => run_args("p0", a).map(|s| report(&s)),
        Command::Cascade(a) => run_args("cascade", a).map(|s| report(&s)),
        Command::Separation(a) => run_args("separation", a).map(|s| report(&s)),
        Command::LawCheck(a) => run_args("law-check", a).map(|s| report(&s)),
        Command::Replay { summary } => replay::replay(&summary).map(|s| {
            println!("replay of {} matches ({} artifacts)", s.scenario, s.artifacts.len());
            ExitCode::SUCCESS
        }),
        Command::Render { raster, overlays, out } => {
            let out = out.unwrap_or_else(|| raster.with_extension("png"));
            render::render(&raster, &overlays, &out).map(|()| {
                println!("{}", out.display());
                ExitCode::SUCCESS
            })
        }
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
