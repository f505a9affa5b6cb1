//! The fixed check matrix.
//!
//! | suite          | checks                                                                 |
//! |----------------|------------------------------------------------------------------------|
//! | `euclidean`    | real line and ℝⁿ: convergence, domination (incl. 50 random line cases), global bounds for (p,q) ∈ {(1,1),(1,2),(2,2),(2,4)}, per-radius bounds, continuity |
//! | `affine-left`  | left Haar measure: the same families, per-radius bound with the modular factor |
//! | `affine-right` | right Haar measure: per-radius bound, global bound for (1,2), (2,2), continuity with `Δ(y) ≤ 2Δ(x)` |
//! | `convergence`  | every convergence check                                                |
//! | `all`          | the union                                                              |
//!
//! Every suite ends with a non-vacuity report.

use rayon::prelude::*;

use super::{
    check_continuity, check_convergence, check_domination, check_domination_cases, check_global_bound,
    check_radius_bound, non_vacuity, random_line_cases, standard_radii, CheckReport,
};
use crate::catalog::{make_function, make_weight};
use crate::error::Result;
use crate::operators::PExponent;
use crate::quadrature::QuadratureConfig;
use crate::spaces::{label_hash, substream, SpaceInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Euclidean,
    AffineLeft,
    AffineRight,
    Convergence,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Euclidean => "euclidean",
            Suite::AffineLeft => "affine-left",
            Suite::AffineRight => "affine-right",
            Suite::Convergence => "convergence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Euclidean,
    AffineLeft,
    AffineRight,
}

enum Job {
    Convergence { space: &'static str, f: &'static str, w: &'static str, x: &'static str },
    Domination { space: &'static str, f: &'static str, w: &'static str, p: &'static [f64], xs: &'static [&'static str] },
    RandomDomination,
    Global { space: &'static str, f: &'static str, w: &'static str, p: f64, q: f64 },
    Radius { space: &'static str, f: &'static str },
    Continuity { space: &'static str, f: &'static str, w: &'static str, p: f64, x: &'static str },
}

/// Random real-line domination cases in the suite.
pub const RANDOM_CASES: usize = 50;

const LEFT_PAIRS: [(f64, f64); 4] = [(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (2.0, 4.0)];
const RIGHT_PAIRS: [(f64, f64); 2] = [(1.0, 2.0), (2.0, 2.0)];
const RADII: [f64; 3] = [0.5, 1.0, 2.0];
const RADIUS_EXPONENTS: [f64; 2] = [1.0, 2.0];

fn family(space: &str) -> Family {
    match space {
        "affine-left" => Family::AffineLeft,
        "affine-right" => Family::AffineRight,
        _ => Family::Euclidean,
    }
}

fn matrix() -> Vec<Job> {
    use Job::*;
    let mut jobs = vec![
        Convergence { space: "real-line", f: "indicator-ball:0:1", w: "exp", x: "2" },
        Convergence { space: "real-line", f: "const:2", w: "exp", x: "0.3" },
        Convergence { space: "real-line", f: "zero", w: "exp", x: "0" },
        Convergence { space: "euclidean:2", f: "bump:0,0:1", w: "gauss", x: "0.5,0.5" },
        Convergence { space: "affine-left", f: "bump:e:1", w: "exp", x: "0.5,1.5" },
        Convergence { space: "affine-right", f: "indicator-ball:e:1", w: "exp", x: "0.2,1.1" },
        RandomDomination,
        Domination { space: "euclidean:2", f: "bump:0,0:1", w: "exp", p: &[1.0, 2.0, 4.0], xs: &["0,0", "0.4,0.3", "1.5,-0.5"] },
        Domination { space: "affine-left", f: "bump:e:1", w: "exp", p: &[1.0, 2.0, 4.0], xs: &["0,1", "0.5,1.5", "-1,0.4"] },
        Domination { space: "affine-right", f: "indicator-ball:e:1", w: "exp", p: &[1.0, 2.0], xs: &["0,1", "0.5,1.5", "-1,0.4"] },
        Global { space: "real-line", f: "zero", w: "exp", p: 1.0, q: 2.0 },
        Global { space: "affine-right", f: "zero", w: "exp", p: 1.0, q: 2.0 },
        Global { space: "affine-right", f: "bump:e:1", w: "exp", p: 1.0, q: 2.0 },
        Radius { space: "euclidean:1", f: "indicator-ball:0:1" },
        Radius { space: "euclidean:2", f: "indicator-ball:0,0:1" },
        Radius { space: "euclidean:1", f: "const:2" },
        Radius { space: "affine-left", f: "indicator-ball:e:1" },
        Radius { space: "affine-left", f: "bump:e:1" },
        Radius { space: "affine-right", f: "indicator-ball:e:1" },
        Radius { space: "affine-right", f: "bump:e:1" },
        Continuity { space: "real-line", f: "indicator-ball:0:1", w: "exp", p: 2.0, x: "0.5" },
        Continuity { space: "real-line", f: "const:2", w: "exp", p: 1.0, x: "0" },
        Continuity { space: "euclidean:2", f: "indicator-ball:0,0:1", w: "gauss", p: 1.0, x: "0.3,0.4" },
        Continuity { space: "affine-left", f: "bump:e:1", w: "exp", p: 1.0, x: "e" },
        Continuity { space: "affine-right", f: "indicator-ball:e:1", w: "exp", p: 1.0, x: "0.2,1.1" },
    ];
    for f in ["indicator-ball:0:1", "bump:0:1"] {
        for (p, q) in LEFT_PAIRS {
            jobs.push(Global { space: "euclidean:1", f, w: "exp", p, q });
        }
    }
    for f in ["indicator-ball:e:1", "bump:e:1"] {
        for (p, q) in LEFT_PAIRS {
            jobs.push(Global { space: "affine-left", f, w: "exp", p, q });
        }
    }
    for (p, q) in RIGHT_PAIRS {
        jobs.push(Global { space: "affine-right", f: "indicator-ball:e:1", w: "exp", p, q });
    }
    jobs
}

fn selected(job: &Job, suite: Suite) -> bool {
    let space = match job {
        Job::Convergence { space, .. }
        | Job::Domination { space, .. }
        | Job::Global { space, .. }
        | Job::Radius { space, .. }
        | Job::Continuity { space, .. } => space,
        Job::RandomDomination => "real-line",
    };
    match suite {
        Suite::All => true,
        Suite::Convergence => matches!(job, Job::Convergence { .. }),
        Suite::Euclidean => family(space) == Family::Euclidean,
        Suite::AffineLeft => family(space) == Family::AffineLeft,
        Suite::AffineRight => family(space) == Family::AffineRight,
    }
}

fn run_job(job: &Job, cfg: &QuadratureConfig) -> Result<CheckReport> {
    let p = PExponent::new;
    Ok(match job {
        Job::Convergence { space, f, w, x } => {
            let s: SpaceInstance = space.parse()?;
            check_convergence(&s, &make_function(&s, f)?, &make_weight(w)?, &s.parse_point(x)?, cfg)
        }
        Job::Domination { space, f, w, p: ps, xs } => {
            let s: SpaceInstance = space.parse()?;
            let ps: Vec<PExponent> = ps.iter().map(|&v| p(v)).collect::<Result<_>>()?;
            let xs = xs.iter().map(|x| s.parse_point(x)).collect::<Result<Vec<_>>>()?;
            check_domination(&s, &make_function(&s, f)?, &make_weight(w)?, &ps, &xs, cfg)
        }
        Job::RandomDomination => {
            let cases = random_line_cases(substream(cfg.master_seed, label_hash("suite")), RANDOM_CASES)?;
            check_domination_cases("random-cases", &SpaceInstance::real_line(), &cases, cfg)
        }
        Job::Global { space, f, w, p: pv, q } => {
            let s: SpaceInstance = space.parse()?;
            check_global_bound(&s, &make_function(&s, f)?, &make_weight(w)?, p(*pv)?, p(*q)?, cfg)?
        }
        Job::Radius { space, f } => {
            let s: SpaceInstance = space.parse()?;
            let ps: Vec<PExponent> = RADIUS_EXPONENTS.iter().map(|&v| p(v)).collect::<Result<_>>()?;
            check_radius_bound(&s, &make_function(&s, f)?, &RADII, &ps, cfg)
        }
        Job::Continuity { space, f, w, p: pv, x } => {
            let s: SpaceInstance = space.parse()?;
            check_continuity(&s, &make_function(&s, f)?, &make_weight(w)?, p(*pv)?, &s.parse_point(x)?, &standard_radii(), cfg)
        }
    })
}

/// Runs the checks of `suite`; reports are sorted by name and followed by
/// the non-vacuity report. Identical configurations give identical reports.
pub fn run_suite(suite: Suite, cfg: &QuadratureConfig) -> Result<Vec<CheckReport>> {
    cfg.validate()?;
    let jobs: Vec<Job> = matrix().into_iter().filter(|j| selected(j, suite)).collect();
    let mut reports: Vec<CheckReport> = jobs.par_iter().map(|j| run_job(j, cfg)).collect::<Result<_>>()?;
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    reports.dedup_by(|a, b| a.name == b.name);
    let meta = non_vacuity(&reports, cfg);
    reports.push(meta);
    Ok(reports)
}
