//! Command-line front end: `eval`, `sweep`, `verify` and `plot`.
//!
//! Flags override a TOML file given with `--config` (keys mirror the long
//! flag names), which overrides the built-in defaults. `HLMAX_THREADS` caps
//! the worker count.

mod config;
mod output;
mod svg;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::catalog::{make_function, make_weight_on};
use crate::error::{Error, Result};
use crate::operators::{integral_function, p_sweep, PExponent};
use crate::quadrature::QuadratureConfig;
use crate::spaces::{SpaceInstance, SpacePoint};
use crate::verify::{run_suite, to_json, Status, Suite};

pub use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "hlmax", version, about = "Averaging, maximal and integral-functions on metric measure spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate I_{p,w}f (or Mf for p = inf) at points; writes CSV.
    Eval(Shared),
    /// Sweep p at one point and compare with Mf; writes CSV and optionally SVG.
    Sweep(Shared),
    /// Run a verification suite; writes a JSON report.
    Verify(Shared),
    /// Render a CSV written by `eval` or `sweep` as SVG.
    Plot(Shared),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Shared {
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long)]
    pub weight: Option<String>,
    /// Exponents, comma separated or repeated; `inf` for the maximal function.
    #[arg(long = "p", value_delimiter = ',')]
    pub p: Vec<String>,
    /// Evaluation point, e.g. `0.5` or `0.5,2`; repeatable.
    #[arg(long = "point", allow_hyphen_values = true)]
    pub point: Vec<String>,
    /// `<center>:<radius>:<n>`: n points on a geodesic segment through the center.
    #[arg(long, conflicts_with = "point", allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "mc-samples")]
    pub mc_samples: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub suite: Option<String>,
    /// CSV to read (for `plot`).
    #[arg(long)]
    pub input: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code: 0 success, 1 a verification check failed,
/// 2 usage or parse error, 3 numerical failure.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    init_threads();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hlmax: {e}");
            e.exit_code()
        }
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("HLMAX_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        // A second call within one process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Eval(a) => cmd_eval(&RunConfig::resolve(&a)?),
        Command::Sweep(a) => cmd_sweep(&RunConfig::resolve(&a)?),
        Command::Verify(a) => cmd_verify(&RunConfig::resolve(&a)?),
        Command::Plot(a) => cmd_plot(&RunConfig::resolve(&a)?),
    }
}

fn quadrature(rc: &RunConfig) -> Result<QuadratureConfig> {
    let cfg = QuadratureConfig {
        mc_samples: rc.mc_samples,
        master_seed: rc.seed,
        ..QuadratureConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn exponents(rc: &RunConfig) -> Result<Vec<PExponent>> {
    rc.p.iter().map(|s| s.parse()).collect()
}

/// Points of `--grid <center>:<radius>:<n>`: along the first axis on
/// Euclidean spaces, along the vertical geodesic `(a, b·eᵗ)` on the affine group.
pub fn grid_points(space: &SpaceInstance, spec: &str) -> Result<Vec<SpacePoint>> {
    let bad = |why: &str| Error::parse(spec, why);
    let mut parts = spec.rsplitn(3, ':');
    let (Some(n), Some(radius), Some(center)) = (parts.next(), parts.next(), parts.next()) else {
        return Err(bad("expected <center>:<radius>:<n>"));
    };
    let n: usize = n.trim().parse().map_err(|_| bad("the point count is not an integer"))?;
    let radius: f64 = radius.trim().parse().map_err(|_| bad("the radius is not a number"))?;
    if n < 2 || !(radius > 0.0 && radius.is_finite()) {
        return Err(bad("need at least two points and a positive radius"));
    }
    let c = space.parse_point(center)?;
    (0..n)
        .map(|k| {
            let t = -radius + 2.0 * radius * k as f64 / (n - 1) as f64;
            match &c {
                SpacePoint::Real1(x) => Ok(SpacePoint::Real1(x + t)),
                SpacePoint::RealN(p) => {
                    let mut v = p.coords().to_vec();
                    v[0] += t;
                    SpacePoint::euclidean(&v)
                }
                SpacePoint::Affine { a, b } => SpacePoint::affine(*a, b * t.exp()),
            }
        })
        .collect()
}

fn points(rc: &RunConfig, space: &SpaceInstance) -> Result<Vec<SpacePoint>> {
    if let Some(g) = &rc.grid {
        return grid_points(space, g);
    }
    if rc.point.is_empty() {
        return Ok(vec![space.identity().expect("every kind has an identity")]);
    }
    rc.point.iter().map(|p| space.parse_point(p)).collect()
}

/// CSV header of `eval`.
pub const EVAL_HEADER: [&str; 9] = ["space", "function", "weight", "p", "point", "value", "error_bound", "kind", "seed"];
/// CSV header of `sweep`.
pub const SWEEP_HEADER: [&str; 5] = ["p", "i_value", "normalized", "gap_to_max", "maximal"];

fn cmd_eval(rc: &RunConfig) -> Result<i32> {
    let cfg = quadrature(rc)?;
    let space: SpaceInstance = rc.space.parse()?;
    let f = make_function(&space, rc.function()?)?;
    let w = make_weight_on(&space, &rc.weight, &cfg)?;
    let ps = exponents(rc)?;
    let xs = points(rc, &space)?;
    let jobs: Vec<(PExponent, &SpacePoint)> = ps.iter().flat_map(|&p| xs.iter().map(move |x| (p, x))).collect();
    let values = jobs
        .par_iter()
        .map(|(p, x)| integral_function(&space, &f, &w, *p, x, &cfg))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<String>> = jobs
        .iter()
        .zip(&values)
        .map(|((p, x), v)| {
            vec![
                space.descriptor(),
                f.descriptor().to_string(),
                w.descriptor(),
                p.to_string(),
                x.to_string(),
                output::float(v.value),
                output::float(v.error_bound),
                v.kind.to_string(),
                cfg.master_seed.to_string(),
            ]
        })
        .collect();
    let csv = output::csv_text(&EVAL_HEADER, &rows)?;
    output::emit(rc.out.as_deref(), &csv)?;
    if let Some(path) = &rc.plot {
        output::write_atomic(path, &svg::from_csv(&csv)?)?;
    }
    Ok(0)
}

fn cmd_sweep(rc: &RunConfig) -> Result<i32> {
    let cfg = quadrature(rc)?;
    let space: SpaceInstance = rc.space.parse()?;
    let f = make_function(&space, rc.function()?)?;
    let w = make_weight_on(&space, &rc.weight, &cfg)?;
    let ps = if rc.p_given { exponents(rc)? } else { config::default_sweep() };
    let xs = points(rc, &space)?;
    let [x] = xs.as_slice() else {
        return Err(Error::Usage("sweep takes exactly one point".into()));
    };
    let rows: Vec<Vec<String>> = p_sweep(&space, &f, &w, x, &ps, &cfg)?
        .iter()
        .map(|r| {
            vec![
                r.p.to_string(),
                output::float(r.i_value.value),
                output::float(r.normalized),
                output::float(r.gap_to_max),
                output::float(r.maximal),
            ]
        })
        .collect();
    let csv = output::csv_text(&SWEEP_HEADER, &rows)?;
    output::emit(rc.out.as_deref(), &csv)?;
    if let Some(path) = &rc.plot {
        output::write_atomic(path, &svg::from_csv(&csv)?)?;
    }
    Ok(0)
}

fn cmd_verify(rc: &RunConfig) -> Result<i32> {
    let suite: Suite = rc.suite.parse()?;
    let cfg = quadrature(rc)?;
    let reports = run_suite(suite, &cfg)?;
    output::emit(rc.out.as_deref(), &to_json(&reports))?;
    let count = |s: Status| reports.iter().filter(|r| r.status == s).count();
    let (pass, inconclusive, fail) = (count(Status::Pass), count(Status::Inconclusive), count(Status::Fail));
    eprintln!("{}: {pass} pass, {inconclusive} inconclusive, {fail} fail", suite.name());
    Ok(if fail > 0 { 1 } else { 0 })
}

fn cmd_plot(rc: &RunConfig) -> Result<i32> {
    let input = rc
        .input
        .as_deref()
        .ok_or_else(|| Error::Usage("plot needs --input <csv>".into()))?;
    let text = std::fs::read_to_string(input)?;
    let svg = svg::from_csv(&text)?;
    let target: Option<&Path> = rc.plot.as_deref().or(rc.out.as_deref());
    output::emit(target, &svg)?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_follow_geodesics() {
        let h = SpaceInstance::affine_left();
        let g = grid_points(&h, "0.5,2:1:3").unwrap();
        assert_eq!(g.len(), 3);
        let d = h.distance(&g[0], &g[2]).unwrap();
        assert!((d - 2.0).abs() < 1e-12);
        let line = SpaceInstance::real_line();
        let g = grid_points(&line, "1:2:5").unwrap();
        assert_eq!(g[0], SpacePoint::Real1(-1.0));
        assert_eq!(g[4], SpacePoint::Real1(3.0));
        assert!(grid_points(&line, "1:2").is_err());
        assert!(grid_points(&line, "1:-2:4").is_err());
    }
}
