//! Fields over a space and their `L_q` norms.

use std::cell::Cell;

use rand::Rng;
use rayon::prelude::*;

use super::profile::{average_power_on, integral_on, integral_power_on, maximal_on, path_kind, Budget, PathKind, Profile};
use super::PExponent;
use crate::catalog::{RadiusWeight, TestFunction};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_segments, Estimate, QuadratureConfig};
use crate::spaces::{hyperbolic, label_hash, stream, substream, BallSpec, SpaceInstance, SpaceKind, SpacePoint};

/// A nonnegative function on a space, possibly known only through estimates.
pub trait Field: Sync {
    /// Value at `x`. Stochastic fields draw from `seed`.
    fn estimate(&self, x: &SpacePoint, seed: u64) -> Result<Estimate>;

    /// An estimate of `g(x)^q`.
    fn power(&self, x: &SpacePoint, q: f64, seed: u64) -> Result<f64> {
        Ok(self.estimate(x, seed)?.value.powf(q))
    }

    fn is_deterministic(&self) -> bool;

    fn is_zero(&self) -> bool {
        false
    }

    /// Point about which the field is rotationally symmetric.
    fn radial_center(&self) -> Option<SpacePoint> {
        None
    }

    /// Anchor and distances from it where the field may have kinks.
    fn kinks(&self) -> Option<(SpacePoint, Vec<f64>)> {
        None
    }
}

impl Field for TestFunction {
    fn estimate(&self, x: &SpacePoint, _seed: u64) -> Result<Estimate> {
        Ok(Estimate::exact(self.eval(x)))
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn is_zero(&self) -> bool {
        TestFunction::is_zero(self)
    }

    fn radial_center(&self) -> Option<SpacePoint> {
        TestFunction::radial_center(self)
    }

    fn kinks(&self) -> Option<(SpacePoint, Vec<f64>)> {
        self.reach().map(|(c, r)| (c, vec![r]))
    }
}

/// A closed-form field.
pub struct FnField<F>(pub F);

impl<F: Fn(&SpacePoint) -> f64 + Sync> Field for FnField<F> {
    fn estimate(&self, x: &SpacePoint, _seed: u64) -> Result<Estimate> {
        Ok(Estimate::exact((self.0)(x)))
    }

    fn is_deterministic(&self) -> bool {
        true
    }
}

fn radial_for(space: &SpaceInstance, f: &TestFunction, path: PathKind) -> Option<SpacePoint> {
    match path {
        PathKind::Radial => f.radial_center(),
        PathKind::Line => f.radial_center(),
        _ => {
            let _ = space;
            None
        }
    }
}

/// Replicates needed for an unbiased `q`-th power.
fn reps_for(q: f64) -> usize {
    if q.fract() == 0.0 && (2.0..=8.0).contains(&q) {
        q as usize
    } else {
        2
    }
}

/// `x ↦ Af(x, r)`.
pub struct AverageField<'a> {
    space: SpaceInstance,
    f: &'a TestFunction,
    r: f64,
    path: PathKind,
    cfg: &'a QuadratureConfig,
}

impl<'a> AverageField<'a> {
    pub fn new(space: &SpaceInstance, f: &'a TestFunction, r: f64, cfg: &'a QuadratureConfig) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("radius must be positive and finite, got {r}")));
        }
        let path = path_kind(space, f)?;
        Ok(Self { space: *space, f, r, path, cfg })
    }
}

impl Field for AverageField<'_> {
    fn estimate(&self, x: &SpacePoint, seed: u64) -> Result<Estimate> {
        let p = Profile::new(&self.space, self.f, x, Budget::nested(self.cfg, 2), seed, self.cfg)?;
        Ok(p.a_est(self.r))
    }

    fn power(&self, x: &SpacePoint, q: f64, seed: u64) -> Result<f64> {
        let p = Profile::new(&self.space, self.f, x, Budget::nested(self.cfg, reps_for(q)), seed, self.cfg)?;
        Ok(average_power_on(&p, self.r, q))
    }

    fn is_deterministic(&self) -> bool {
        self.path != PathKind::Sampled
    }

    fn is_zero(&self) -> bool {
        self.path == PathKind::Zero
    }

    fn radial_center(&self) -> Option<SpacePoint> {
        radial_for(&self.space, self.f, self.path)
    }

    fn kinks(&self) -> Option<(SpacePoint, Vec<f64>)> {
        self.f.reach().map(|(c, big)| (c, vec![big, (big - self.r).abs(), big + self.r]))
    }
}

/// `x ↦ Mf(x)`.
pub struct MaximalField<'a> {
    space: SpaceInstance,
    f: &'a TestFunction,
    path: PathKind,
    cfg: &'a QuadratureConfig,
}

impl<'a> MaximalField<'a> {
    pub fn new(space: &SpaceInstance, f: &'a TestFunction, cfg: &'a QuadratureConfig) -> Result<Self> {
        let path = path_kind(space, f)?;
        Ok(Self { space: *space, f, path, cfg })
    }
}

impl Field for MaximalField<'_> {
    fn estimate(&self, x: &SpacePoint, seed: u64) -> Result<Estimate> {
        let p = Profile::new(&self.space, self.f, x, Budget::nested(self.cfg, 2), seed, self.cfg)?;
        Ok(maximal_on(&p)?.estimate)
    }

    fn is_deterministic(&self) -> bool {
        self.path != PathKind::Sampled
    }

    fn is_zero(&self) -> bool {
        self.path == PathKind::Zero
    }

    fn radial_center(&self) -> Option<SpacePoint> {
        radial_for(&self.space, self.f, self.path)
    }

    fn kinks(&self) -> Option<(SpacePoint, Vec<f64>)> {
        self.f.reach().map(|(c, r)| (c, vec![r]))
    }
}

/// `x ↦ I_{p,w}f(x)`.
pub struct IntegralField<'a> {
    space: SpaceInstance,
    f: &'a TestFunction,
    w: &'a RadiusWeight,
    p: PExponent,
    path: PathKind,
    cfg: &'a QuadratureConfig,
}

impl<'a> IntegralField<'a> {
    pub fn new(
        space: &SpaceInstance,
        f: &'a TestFunction,
        w: &'a RadiusWeight,
        p: PExponent,
        cfg: &'a QuadratureConfig,
    ) -> Result<Self> {
        let path = path_kind(space, f)?;
        Ok(Self { space: *space, f, w, p, path, cfg })
    }
}

impl Field for IntegralField<'_> {
    fn estimate(&self, x: &SpacePoint, seed: u64) -> Result<Estimate> {
        let budget = Budget::nested(self.cfg, 2);
        let prof = Profile::new(&self.space, self.f, x, budget, seed, self.cfg)?;
        if self.p.is_infinite() {
            return Ok(maximal_on(&prof)?.estimate);
        }
        integral_on(&prof, self.w, self.p.value(), None, budget.panels, self.cfg)
    }

    fn power(&self, x: &SpacePoint, q: f64, seed: u64) -> Result<f64> {
        if self.p.is_infinite() {
            return Ok(self.estimate(x, seed)?.value.powf(q));
        }
        let budget = Budget::nested(self.cfg, reps_for(q));
        let prof = Profile::new(&self.space, self.f, x, budget, seed, self.cfg)?;
        integral_power_on(&prof, self.w, self.p.value(), q, budget.panels, self.cfg)
    }

    fn is_deterministic(&self) -> bool {
        self.path != PathKind::Sampled
    }

    fn is_zero(&self) -> bool {
        self.path == PathKind::Zero
    }

    fn radial_center(&self) -> Option<SpacePoint> {
        radial_for(&self.space, self.f, self.path)
    }

    fn kinks(&self) -> Option<(SpacePoint, Vec<f64>)> {
        self.f.reach().map(|(c, r)| (c, vec![r]))
    }
}

/// What is known about a field outside the integration ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailCertificate {
    /// The field is zero outside the ball.
    Vanishes,
    /// `∫_{outside} g^q dμ` is at most this value (for `q = ∞`: `g` is at most this value outside).
    Bounded(f64),
}

/// Domain of an `L_q` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// The ball itself.
    Ball(BallSpec),
    /// The whole space: the ball plus a certified remainder. A missing
    /// certificate is a usage error.
    Whole(BallSpec, Option<TailCertificate>),
}

impl Region {
    fn ball(&self) -> &BallSpec {
        match self {
            Region::Ball(b) | Region::Whole(b, _) => b,
        }
    }
}

const LQ_BATCHES: usize = 8;
const SUP_GRID: usize = 1025;

/// `(∫_region g^q dμ)^{1/q}`; `q = ∞` gives the largest sampled value,
/// flagged as a lower bound.
///
/// One-dimensional fields and radial fields on isotropic spaces are
/// integrated by adaptive quadrature. Other fields use stratified Monte Carlo
/// in geodesic polar coordinates about the region's center. For a whole-space
/// region the reported value is `(J + tail)^{1/q}`, an upper estimate whose
/// error bar reaches down to `J^{1/q}`.
pub fn lq_norm(space: &SpaceInstance, g: &dyn Field, q: PExponent, region: &Region, cfg: &QuadratureConfig) -> Result<Estimate> {
    let tail = match region {
        Region::Whole(_, None) if !g.is_zero() => {
            return Err(Error::Usage(
                "a whole-space norm needs a tail certificate for the outside of the ball".into(),
            ))
        }
        Region::Whole(_, Some(t)) => *t,
        _ => TailCertificate::Vanishes,
    };
    if g.is_zero() {
        return Ok(Estimate::exact(0.0));
    }
    let ball = region.ball();
    space.check_point(&ball.center)?;
    let seed = substream(cfg.master_seed, label_hash("lq-norm"));
    let one_dim = matches!(space.kind(), SpaceKind::RealLine | SpaceKind::Euclidean(1));
    let isotropic = matches!(space.kind(), SpaceKind::Euclidean(n) if n >= 2) || space.kind() == SpaceKind::AffineLeft;
    let radial = isotropic
        && g.is_deterministic()
        && g.radial_center().is_some_and(|c| space.dist(&c, &ball.center) < 1e-12);
    let j = if one_dim && g.is_deterministic() {
        line_mode(space, g, q, ball, seed, cfg)?
    } else if radial {
        radial_mode(space, g, q, ball, seed, cfg)?
    } else {
        mc_mode(space, g, q, ball, seed, cfg)?
    };
    Ok(attach_tail(j, q, tail))
}

/// Integral (or supremum) over the ball, before the root.
struct Inner {
    j: f64,
    err: f64,
    se: f64,
    samples: u64,
    mc: bool,
}

fn attach_tail(inner: Inner, q: PExponent, tail: TailCertificate) -> Estimate {
    let t = match tail {
        TailCertificate::Vanishes => 0.0,
        TailCertificate::Bounded(t) => t.max(0.0),
    };
    if q.is_infinite() {
        let v = inner.j.max(t);
        let mut e = if inner.mc {
            Estimate::monte_carlo(v, inner.se, inner.samples).widen(inner.err)
        } else {
            Estimate::deterministic(v, inner.err, inner.samples)
        };
        e.lower_bound = true;
        return e;
    }
    let qv = q.value();
    let j = inner.j.max(0.0);
    let base = j.powf(1.0 / qv);
    let v = (j + t).powf(1.0 / qv);
    let (det, sd) = if j > 0.0 {
        (base * inner.err / (qv * j), base * inner.se / (qv * j))
    } else {
        (inner.err.powf(1.0 / qv), inner.se.powf(1.0 / qv))
    };
    let det = det + (v - base);
    if inner.mc {
        Estimate::monte_carlo(v, sd, inner.samples).widen(det)
    } else {
        Estimate::deterministic(v, det, inner.samples)
    }
}

fn outer_cfg(cfg: &QuadratureConfig) -> QuadratureConfig {
    let mut c = cfg.clone();
    c.rel_tol = cfg.rel_tol.max(1e-7);
    c.abs_tol = cfg.abs_tol.max(1e-13);
    c.max_depth = cfg.max_depth.min(24);
    c
}

fn line_mode(space: &SpaceInstance, g: &dyn Field, q: PExponent, ball: &BallSpec, seed: u64, cfg: &QuadratureConfig) -> Result<Inner> {
    let c = crate::catalog::line_coord(&ball.center);
    let (lo, hi) = (c - ball.radius, c + ball.radius);
    let at = |t: f64| match space.kind() {
        SpaceKind::RealLine => SpacePoint::Real1(t),
        _ => SpacePoint::euclidean(&[t]).expect("finite coordinate"),
    };
    let mut bp = vec![lo, hi];
    if let Some((anchor, ks)) = g.kinks() {
        let a = crate::catalog::line_coord(&anchor);
        bp.push(a);
        for k in ks {
            bp.push(a - k);
            bp.push(a + k);
        }
    }
    bp.retain(|b| *b >= lo && *b <= hi);
    bp.sort_by(f64::total_cmp);
    bp.dedup();
    if q.is_infinite() {
        let mut pts: Vec<f64> = (0..SUP_GRID).map(|i| lo + (hi - lo) * i as f64 / (SUP_GRID - 1) as f64).collect();
        pts.extend(bp.iter().copied());
        return sup_of(g, pts.iter().map(|&t| at(t)).collect(), seed);
    }
    let qv = q.value();
    let rel = Cell::new(0.0f64);
    let failed = Cell::new(None);
    let j = integrate_segments(
        |t| match g.estimate(&at(t), seed) {
            Ok(e) => {
                if e.value > 0.0 {
                    rel.set(rel.get().max(e.error_bound / e.value));
                }
                e.value.powf(qv)
            }
            Err(err) => {
                failed.set(Some(err.to_string()));
                f64::NAN
            }
        },
        &bp,
        &outer_cfg(cfg),
    );
    if let Some(msg) = failed.take() {
        return Err(Error::Numeric(msg));
    }
    let j = j?;
    Ok(Inner {
        j: j.value,
        err: j.error_bound + qv * rel.get() * j.value,
        se: 0.0,
        samples: j.samples_used,
        mc: false,
    })
}

/// Point at geodesic distance `d` from `center` in the direction labelled by
/// `(u, v) ∈ [0,1)²`, with the right-Haar factor `Δ(z⁻¹)` of the polar offset.
fn point_at(space: &SpaceInstance, center: &SpacePoint, d: f64, u: f64, v: f64) -> (SpacePoint, f64) {
    match (space.kind(), center) {
        (SpaceKind::AffineLeft | SpaceKind::AffineRight, SpacePoint::Affine { a, b }) => {
            let (za, zb) = hyperbolic::polar_from_identity(d, std::f64::consts::TAU * u);
            let (pa, pb) = hyperbolic::compose(*a, *b, za, zb);
            let fac = if space.kind() == SpaceKind::AffineRight { zb } else { 1.0 };
            (SpacePoint::Affine { a: pa, b: pb }, fac)
        }
        _ => {
            let c = center.coords();
            let dir: Vec<f64> = match c.len() {
                1 => vec![if u < 0.5 { -1.0 } else { 1.0 }],
                2 => {
                    let t = std::f64::consts::TAU * u;
                    vec![t.cos(), t.sin()]
                }
                _ => {
                    let z = 2.0 * v - 1.0;
                    let s = (1.0 - z * z).max(0.0).sqrt();
                    let t = std::f64::consts::TAU * u;
                    vec![s * t.cos(), s * t.sin(), z]
                }
            };
            let coords: Vec<f64> = c.iter().zip(&dir).map(|(x, e)| x + d * e).collect();
            let p = match center {
                SpacePoint::Real1(_) => SpacePoint::Real1(coords[0]),
                _ => SpacePoint::euclidean(&coords).expect("finite coordinates"),
            };
            (p, 1.0)
        }
    }
}

fn radial_mode(space: &SpaceInstance, g: &dyn Field, q: PExponent, ball: &BallSpec, seed: u64, cfg: &QuadratureConfig) -> Result<Inner> {
    let at = |d: f64| point_at(space, &ball.center, d, 0.0, 0.5).0;
    let mut bp = vec![0.0, ball.radius];
    if let Some((_, ks)) = g.kinks() {
        bp.extend(ks.into_iter().filter(|k| *k > 0.0 && *k < ball.radius));
    }
    bp.sort_by(f64::total_cmp);
    bp.dedup();
    if q.is_infinite() {
        let mut pts: Vec<f64> = (0..SUP_GRID).map(|i| ball.radius * i as f64 / (SUP_GRID - 1) as f64).collect();
        pts.extend(bp.iter().copied());
        return sup_of(g, pts.iter().map(|&d| at(d)).collect(), seed);
    }
    let qv = q.value();
    let rel = Cell::new(0.0f64);
    let failed = Cell::new(None);
    let j = integrate_segments(
        |d| match g.estimate(&at(d), seed) {
            Ok(e) => {
                if e.value > 0.0 {
                    rel.set(rel.get().max(e.error_bound / e.value));
                }
                space.shell(d) * e.value.powf(qv)
            }
            Err(err) => {
                failed.set(Some(err.to_string()));
                f64::NAN
            }
        },
        &bp,
        &outer_cfg(cfg),
    );
    if let Some(msg) = failed.take() {
        return Err(Error::Numeric(msg));
    }
    let j = j?;
    Ok(Inner {
        j: j.value,
        err: j.error_bound + qv * rel.get() * j.value,
        se: 0.0,
        samples: j.samples_used,
        mc: false,
    })
}

fn sup_of(g: &dyn Field, pts: Vec<SpacePoint>, seed: u64) -> Result<Inner> {
    let vals: Vec<Estimate> = pts
        .par_iter()
        .enumerate()
        .map(|(i, x)| g.estimate(x, substream(seed, i as u64)))
        .collect::<Result<_>>()?;
    let best = vals
        .iter()
        .copied()
        .fold(Estimate::exact(0.0), |a, b| if b.value > a.value { b } else { a });
    Ok(Inner {
        j: best.value,
        err: best.error_bound - 3.0 * best.std_error,
        se: best.std_error,
        samples: pts.len() as u64,
        mc: best.is_monte_carlo(),
    })
}

/// Stratified Monte Carlo in polar coordinates about the ball's center:
/// `LQ_BATCHES` independent batches, each with one jittered draw per
/// (distance, direction) cell.
fn mc_mode(space: &SpaceInstance, g: &dyn Field, q: PExponent, ball: &BallSpec, seed: u64, cfg: &QuadratureConfig) -> Result<Inner> {
    let total = ((cfg.mc_samples / 50) as usize).max(64);
    let per = (total / LQ_BATCHES).max(8);
    let n_dir = match space.dim() {
        1 => 2,
        _ => (((per as f64) / 4.0).sqrt().round() as usize).max(1),
    };
    let n_dist = (per / n_dir).max(1);
    let cells = n_dir * n_dist;
    let scale = space.volume_scale(&ball.center);
    let rg = ball.radius;
    let qv = if q.is_infinite() { 1.0 } else { q.value() };
    let values: Vec<(f64, f64)> = (0..LQ_BATCHES * cells)
        .into_par_iter()
        .map(|idx| {
            let cell = idx % cells;
            let (i_d, i_u) = (cell / n_dir, cell % n_dir);
            let s = substream(seed, idx as u64);
            let mut rng = stream(s, 0);
            let d = rg * (i_d as f64 + rng.random::<f64>()) / n_dist as f64;
            let u = (i_u as f64 + rng.random::<f64>()) / n_dir as f64;
            let v = rng.random::<f64>();
            let (x, fac) = point_at(space, &ball.center, d, u, v);
            let h = if q.is_infinite() {
                g.estimate(&x, substream(s, 1))?.value
            } else {
                g.power(&x, qv, substream(s, 1))?
            };
            let weight = space.shell(d) * rg / (n_dist * n_dir) as f64 * scale * fac;
            Ok((weight * h, h))
        })
        .collect::<Result<_>>()?;
    if q.is_infinite() {
        let best = values.iter().map(|t| t.1).fold(0.0, f64::max);
        return Ok(Inner {
            j: best,
            err: 0.0,
            se: 0.0,
            samples: values.len() as u64,
            mc: true,
        });
    }
    let batches: Vec<f64> = values.chunks(cells).map(|c| c.iter().map(|t| t.0).sum()).collect();
    let (mean, se) = super::profile::mean_se(&batches);
    Ok(Inner {
        j: mean,
        err: 0.0,
        se,
        samples: values.len() as u64,
        mc: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::make_function;

    #[test]
    fn function_norm_on_the_line() {
        let line = SpaceInstance::real_line();
        let f = make_function(&line, "indicator-ball:0:1").unwrap();
        let cfg = QuadratureConfig::default();
        let ball = BallSpec::new(SpacePoint::Real1(0.0), 3.0).unwrap();
        let n = lq_norm(&line, &f, PExponent::new(2.0).unwrap(), &Region::Ball(ball), &cfg).unwrap();
        assert!((n.value - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn zero_field_and_missing_certificate() {
        let line = SpaceInstance::real_line();
        let cfg = QuadratureConfig::default();
        let ball = BallSpec::new(SpacePoint::Real1(0.0), 3.0).unwrap();
        let zero = make_function(&line, "zero").unwrap();
        assert_eq!(lq_norm(&line, &zero, PExponent::ONE, &Region::Whole(ball, None), &cfg).unwrap().value, 0.0);
        let f = make_function(&line, "indicator-ball:0:1").unwrap();
        assert!(matches!(
            lq_norm(&line, &f, PExponent::ONE, &Region::Whole(ball, None), &cfg),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn closed_form_fields() {
        let line = SpaceInstance::real_line();
        let cfg = QuadratureConfig::default();
        let g = FnField(|x: &SpacePoint| (-crate::catalog::line_coord(x).abs()).exp());
        let ball = BallSpec::new(SpacePoint::Real1(0.0), 30.0).unwrap();
        let n = lq_norm(&line, &g, PExponent::ONE, &Region::Ball(ball), &cfg).unwrap();
        assert!((n.value - 2.0).abs() < 1e-9);
        let s = lq_norm(&line, &g, PExponent::INFINITY, &Region::Ball(ball), &cfg).unwrap();
        assert!(s.lower_bound && (s.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximal_field_norm_on_the_line() {
        let line = SpaceInstance::real_line();
        let f = make_function(&line, "indicator-ball:0:1").unwrap();
        let cfg = QuadratureConfig::default();
        let m = MaximalField::new(&line, &f, &cfg).unwrap();
        let ball = BallSpec::new(SpacePoint::Real1(0.0), 100.0).unwrap();
        let n = lq_norm(&line, &m, PExponent::new(2.0).unwrap(), &Region::Ball(ball), &cfg).unwrap();
        let exact = (2.0 + 2.0 * (0.5 - 1.0 / 101.0f64)).sqrt();
        assert!((n.value - exact).abs() < 1e-6, "{}", n.value);
    }

    #[test]
    fn stratified_norm_of_a_disk_indicator() {
        let h = SpaceInstance::affine_right();
        let f = make_function(&h, "indicator-ball:e:1").unwrap();
        let cfg = QuadratureConfig::default();
        let ball = BallSpec::new(h.identity().unwrap(), 1.5).unwrap();
        let n = lq_norm(&h, &f, PExponent::ONE, &Region::Ball(ball), &cfg).unwrap();
        let exact = f.known_lq_norm(1.0).unwrap();
        assert!(n.is_monte_carlo());
        assert!((n.value - exact).abs() < 4.0 * n.std_error + 0.01 * exact, "{n:?} vs {exact}");
    }
}
