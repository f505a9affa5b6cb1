//! Per-point radius profiles `r ↦ Af(x, r)`.
//!
//! Four evaluation paths share one interface:
//! * one-dimensional spaces use the exact antiderivative of `f`;
//! * radial functions on isotropic spaces (Euclidean ℝⁿ and the affine group
//!   with left Haar measure, whose measure is invariant under every isometry)
//!   reduce the ball integral to a one-dimensional integral over spheres about
//!   the function's center;
//! * everything else is sampled. For each radius the smaller of the two sets
//!   `B_{x,r}` and `supp f` is sampled, and draws are reused across radii so
//!   the sampled profile is smooth in `r`.
//!
//! In every path `Af(x, r) = 0` for `r ≤ d(x, x₀) − R` and
//! `Af(x, r) = ‖f‖₁ / μ(B_{x,r})` for `r ≥ d(x, x₀) + R`, where `B_{x₀,R}`
//! contains the support of `f`.

use std::f64::consts::PI;

use crate::catalog::{line_coord, RadiusWeight, TestFunction};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive::composite_rule, integrate, integrate_segments, truncation_radius, Estimate, QuadratureConfig};
use crate::spaces::sampling::BallRef;
use crate::spaces::{stream, SpaceInstance, SpaceKind, SpacePoint};

/// Monte Carlo sizes of a sampled profile.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Budget {
    pub reps: usize,
    pub per_rep: usize,
    pub panels: usize,
}

impl Budget {
    /// A single evaluation at one point.
    pub fn single(cfg: &QuadratureConfig) -> Self {
        Self {
            reps: 8,
            per_rep: ((cfg.mc_samples / 80) as usize).max(128),
            panels: 16,
        }
    }

    /// One evaluation inside an outer Monte Carlo integral over points.
    pub fn nested(cfg: &QuadratureConfig, reps: usize) -> Self {
        Self {
            reps: reps.max(2),
            per_rep: ((cfg.mc_samples / 800) as usize).max(24),
            panels: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PathKind {
    Zero,
    Constant,
    Line,
    Radial,
    Sampled,
}

pub(crate) fn path_kind(space: &SpaceInstance, f: &TestFunction) -> Result<PathKind> {
    f.check_space(space)?;
    if f.is_zero() {
        return Ok(PathKind::Zero);
    }
    if f.constant_value().is_some() {
        return Ok(PathKind::Constant);
    }
    Ok(match space.kind() {
        SpaceKind::RealLine | SpaceKind::Euclidean(1) => PathKind::Line,
        SpaceKind::Euclidean(_) | SpaceKind::AffineLeft if f.radial_center().is_some() => PathKind::Radial,
        _ => {
            if f.reach().is_none() {
                return Err(Error::Unsupported(format!(
                    "`{}` has no bounded support on `{space}`; ball averages cannot be bracketed",
                    f.descriptor()
                )));
            }
            PathKind::Sampled
        }
    })
}

struct Rep {
    refs: Vec<BallRef>,
    dists: Vec<f64>,
    prefix: Vec<f64>,
}

pub(crate) struct Profile<'a> {
    space: SpaceInstance,
    f: &'a TestFunction,
    x: SpacePoint,
    kind: PathKind,
    /// Distance from `x` to the support anchor.
    d: f64,
    /// Support radius about the anchor (`∞` if unknown).
    reach: f64,
    lo: f64,
    hi: f64,
    mass: f64,
    support_volume: f64,
    reps: Vec<Rep>,
    cfg: QuadratureConfig,
}

fn cap_fraction(kind: SpaceKind, d: f64, rho: f64, r: f64) -> f64 {
    let t = match kind {
        SpaceKind::AffineLeft | SpaceKind::AffineRight => {
            let gap = 2.0 * (0.5 * (r + d - rho)).sinh() * (0.5 * (r - d + rho)).sinh();
            gap / (d.sinh() * rho.sinh())
        }
        _ => (r * r - (d - rho) * (d - rho)) / (2.0 * d * rho),
    };
    let t = t.clamp(0.0, 2.0);
    match kind {
        SpaceKind::Euclidean(3) => 0.5 * t,
        _ => (2.0 / PI) * (0.5 * t).sqrt().asin(),
    }
}

impl<'a> Profile<'a> {
    pub fn new(
        space: &SpaceInstance,
        f: &'a TestFunction,
        x: &SpacePoint,
        budget: Budget,
        seed: u64,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        space.check_point(x)?;
        let kind = path_kind(space, f)?;
        let (d, reach) = match f.reach() {
            Some((c, r)) => (space.dist(&c, x), r),
            None => (0.0, f64::INFINITY),
        };
        let mut p = Self {
            space: *space,
            f,
            x: *x,
            kind,
            d,
            reach,
            lo: (d - reach).max(0.0),
            hi: d + reach,
            mass: f.mass(),
            support_volume: 0.0,
            reps: Vec::new(),
            cfg: cfg.clone(),
        };
        if kind == PathKind::Radial {
            p.d = space.dist(&f.radial_center().expect("radial"), x);
        }
        if kind == PathKind::Sampled {
            let (anchor, _) = f.reach().expect("sampled functions have a reach");
            p.support_volume = space.volume(&anchor, reach);
            let m = budget.per_rep;
            for j in 0..budget.reps {
                let mut rng = stream(seed, j as u64);
                let refs: Vec<BallRef> = (0..m).map(|_| space.draw_ref(&mut rng)).collect();
                let mut pts: Vec<(f64, f64)> = (0..m)
                    .map(|_| {
                        let r = space.draw_ref(&mut rng);
                        let (s, omega) = space.realize(&anchor, reach, &r);
                        (space.dist(x, &s), f.eval(&s) * omega * p.support_volume / m as f64)
                    })
                    .collect();
                pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                let dists = pts.iter().map(|t| t.0).collect();
                let mut acc = 0.0;
                let mut prefix = Vec::with_capacity(m + 1);
                prefix.push(0.0);
                for (_, mass) in &pts {
                    acc += mass;
                    prefix.push(acc);
                }
                p.reps.push(Rep { refs, dists, prefix });
            }
        }
        Ok(p)
    }

    pub fn is_deterministic(&self) -> bool {
        self.kind != PathKind::Sampled
    }

    pub fn reps(&self) -> usize {
        self.reps.len()
    }

    fn vol(&self, r: f64) -> f64 {
        self.space.volume(&self.x, r)
    }

    /// Closed form for `r ≥ hi`.
    fn beyond(&self, r: f64) -> f64 {
        self.mass / self.vol(r)
    }

    fn constant(&self) -> f64 {
        self.f.constant_value().unwrap_or(0.0)
    }

    /// Integral of `f` over `B_{x,r}` on the radial path, with a quadrature error.
    fn radial_ball_integral(&self, r: f64) -> (f64, f64) {
        let (d, reach) = (self.d, self.reach);
        let mut total = 0.0;
        if r > d {
            total += self.f.cumulative((r - d).min(reach));
        }
        let rho1 = (d - r).abs();
        let rho2 = (d + r).min(reach);
        if d == 0.0 || rho1 >= rho2 {
            return (total, 1e-14 * total.abs());
        }
        let kind = self.space.kind();
        let space = self.space;
        let f = self.f;
        let half = 0.5 * (rho2 - rho1);
        let g = |psi: f64| {
            let (s, c) = psi.sin_cos();
            let rho = rho1 + half * (1.0 - c);
            if rho <= 0.0 {
                return 0.0;
            }
            f.profile(rho) * space.shell(rho) * cap_fraction(kind, d, rho, r) * half * s
        };
        let mut tight = self.cfg.clone();
        tight.rel_tol = 1e-11;
        tight.abs_tol = 1e-15;
        match integrate(g, 0.0, PI, &tight) {
            Ok(e) => (total + e.value, e.error_bound + 1e-13 * total.abs()),
            Err(_) => (f64::NAN, f64::INFINITY),
        }
    }

    /// Replicate `j` of the sampled estimator (or the exact value on other paths).
    pub fn a_rep(&self, j: usize, r: f64) -> f64 {
        if self.kind != PathKind::Sampled {
            return self.a(r);
        }
        if r <= self.lo {
            return 0.0;
        }
        if r >= self.hi {
            return self.beyond(r);
        }
        let rep = &self.reps[j];
        let vol = self.vol(r);
        if vol <= self.support_volume {
            let mut s = 0.0;
            for reference in &rep.refs {
                let (y, omega) = self.space.realize(&self.x, r, reference);
                s += omega * self.f.eval(&y);
            }
            s / rep.refs.len() as f64
        } else {
            let k = rep.dists.partition_point(|&t| t < r);
            rep.prefix[k] / vol
        }
    }

    /// `Af(x, r)`: exact on deterministic paths, the replicate mean otherwise.
    pub fn a(&self, r: f64) -> f64 {
        match self.kind {
            PathKind::Zero => 0.0,
            PathKind::Constant => self.constant(),
            PathKind::Line => {
                let x = line_coord(&self.x);
                (self.f.ball_integral_1d(x, r) / (2.0 * r)).max(0.0)
            }
            _ if r <= self.lo => 0.0,
            _ if r >= self.hi => self.beyond(r),
            PathKind::Radial => (self.radial_ball_integral(r).0 / self.vol(r)).max(0.0),
            PathKind::Sampled => (0..self.reps.len()).map(|j| self.a_rep(j, r)).sum::<f64>() / self.reps.len() as f64,
        }
    }

    /// `Af(x, r)` with its error bar.
    pub fn a_est(&self, r: f64) -> Estimate {
        match self.kind {
            PathKind::Sampled if r > self.lo && r < self.hi => {
                let k = self.reps.len();
                let vals: Vec<f64> = (0..k).map(|j| self.a_rep(j, r)).collect();
                let (m, se) = mean_se(&vals);
                Estimate::monte_carlo(m, se, (k * self.reps[0].refs.len()) as u64)
            }
            PathKind::Radial if r > self.lo && r < self.hi => {
                let (v, e) = self.radial_ball_integral(r);
                let vol = self.vol(r);
                Estimate::deterministic((v / vol).max(0.0), e / vol, 0)
            }
            _ => {
                let v = self.a(r);
                Estimate::deterministic(v, 4.0 * f64::EPSILON * v, 0)
            }
        }
    }

    /// Radii where `r ↦ Af(x, r)` may have kinks.
    pub fn kinks(&self) -> Vec<f64> {
        let mut k = match self.kind {
            PathKind::Line => self.f.kinks_1d(line_coord(&self.x)),
            PathKind::Radial => vec![self.lo, self.d, self.hi],
            PathKind::Sampled => vec![self.lo, self.hi],
            _ => Vec::new(),
        };
        k.retain(|r| *r > 0.0 && r.is_finite());
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    }

    /// Radius where the sampled estimator switches from ball to support draws.
    fn switch_radius(&self) -> Option<f64> {
        if self.kind != PathKind::Sampled {
            return None;
        }
        let (mut a, mut b) = (self.lo, self.hi);
        if self.vol(b) <= self.support_volume || (a > 0.0 && self.vol(a) >= self.support_volume) {
            return None;
        }
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if self.vol(m) <= self.support_volume {
                a = m;
            } else {
                b = m;
            }
        }
        Some(0.5 * (a + b))
    }
}

pub(crate) fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (m, 0.0);
    }
    let var = v.iter().map(|t| (t - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Result of the radius search.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MaxResult {
    pub estimate: Estimate,
    pub radius: f64,
}

pub(crate) const MAX_GRID: usize = 256;
pub(crate) const MAX_R_MIN: f64 = 1e-4;
const REFINE_POINTS: usize = 33;

/// Largest value of `r ↦ Af(x, r)`: a 256-point log grid, then two rounds of
/// 33 points on the bracket around the best node, plus the known kinks.
/// Ties go to the smallest radius.
pub(crate) fn maximal_on(p: &Profile) -> Result<MaxResult> {
    match p.kind {
        PathKind::Zero => {
            return Ok(MaxResult {
                estimate: Estimate::exact(0.0),
                radius: MAX_R_MIN,
            })
        }
        PathKind::Constant => {
            return Ok(MaxResult {
                estimate: Estimate::exact(p.constant()),
                radius: MAX_R_MIN,
            })
        }
        _ => {}
    }
    let r_max = if p.hi.is_finite() { p.hi + 1.0 } else { 1e3 };
    let r_max = r_max.max(10.0 * MAX_R_MIN);
    let ratio = (r_max / MAX_R_MIN).ln();
    let mut grid: Vec<f64> = (0..MAX_GRID)
        .map(|i| MAX_R_MIN * (ratio * i as f64 / (MAX_GRID - 1) as f64).exp())
        .collect();
    grid[MAX_GRID - 1] = r_max;
    let values: Vec<f64> = grid.iter().map(|&r| p.a(r)).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite ball average in the radius search".into()));
    }
    let mut best = argmax(&values);
    let (mut best_r, mut best_v) = (grid[best], values[best]);
    let mut lo = grid[best.saturating_sub(1)];
    let mut hi = grid[(best + 1).min(MAX_GRID - 1)];
    let mut spread = 0.0f64;
    for _ in 0..2 {
        let pts: Vec<f64> = (0..REFINE_POINTS)
            .map(|k| lo + (hi - lo) * k as f64 / (REFINE_POINTS - 1) as f64)
            .collect();
        let vals: Vec<f64> = pts.iter().map(|&r| p.a(r)).collect();
        best = argmax(&vals);
        if vals[best] > best_v || (vals[best] == best_v && pts[best] < best_r) {
            best_v = vals[best];
            best_r = pts[best];
        }
        let l = best.saturating_sub(1);
        let h = (best + 1).min(REFINE_POINTS - 1);
        spread = (vals[best] - vals[l]).abs().max((vals[best] - vals[h]).abs());
        lo = pts[l];
        hi = pts[h];
    }
    for k in p.kinks() {
        let v = p.a(k);
        if v > best_v || (v == best_v && k < best_r) {
            best_v = v;
            best_r = k;
        }
    }
    let at = p.a_est(best_r);
    let mut est = if p.is_deterministic() {
        Estimate::deterministic(best_v, spread + at.error_bound, 0)
    } else {
        let mut e = Estimate::monte_carlo(best_v, at.std_error, at.samples_used);
        e.error_bound += spread;
        e
    };
    est.converged = true;
    Ok(MaxResult {
        estimate: est,
        radius: best_r,
    })
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Pieces of `∫ w (A/scale)^p dr` shared by the point estimate and the
/// unbiased power estimates.
struct Nodes {
    /// `(radius, quadrature weight × w(radius))` on the sampled overlap.
    nodes: Vec<(f64, f64)>,
    /// Deterministic part: `∫ w (A/scale)^p` over the closed-form tail.
    tail: Estimate,
    /// Truncation error bound in scaled units.
    trunc: f64,
}

fn truncation_end(p: &Profile, w: &RadiusWeight, pw: f64, sup_scaled: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let support = w.support_bound();
    if p.hi.is_finite() {
        // Beyond hi the scaled profile is decreasing and at most 1.
        let t = truncation_radius(w, 1.0, pw, cfg)?;
        Ok(t.max(p.hi).min(support))
    } else {
        truncation_radius(w, sup_scaled.max(1.0), pw, cfg)
    }
}

fn sampled_nodes(p: &Profile, w: &RadiusWeight, pw: f64, scale: f64, panels: usize, cfg: &QuadratureConfig) -> Result<Nodes> {
    let end = truncation_end(p, w, pw, 1.0, cfg)?;
    let (lo, hi) = (p.lo, p.hi.min(end));
    let mut cuts = vec![lo];
    cuts.extend(w.breakpoints().into_iter().filter(|&b| b > lo && b < hi));
    if let Some(s) = p.switch_radius() {
        if s > lo && s < hi {
            cuts.push(s);
        }
    }
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let mut nodes = Vec::new();
    if hi > lo {
        for seg in cuts.windows(2) {
            let k = ((panels as f64 * (seg[1] - seg[0]) / span).round() as usize).max(1);
            for (r, wt) in composite_rule(seg[0], seg[1], k) {
                nodes.push((r, wt * w.density(r)));
            }
        }
    }
    let tail = deterministic_tail(p, w, pw, scale, end, cfg)?;
    let trunc = if end >= w.support_bound() { 0.0 } else { w.tail_bound(end).unwrap_or(0.0) };
    Ok(Nodes { nodes, tail, trunc })
}

/// `∫_{hi}^{end} w(r) (‖f‖₁/(μ(B_{x,r}) scale))^p dr`.
fn deterministic_tail(p: &Profile, w: &RadiusWeight, pw: f64, scale: f64, end: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    if !(p.hi.is_finite() && end > p.hi) {
        return Ok(Estimate::exact(0.0));
    }
    let mut bp = vec![p.hi];
    bp.extend(w.breakpoints().into_iter().filter(|&b| b > p.hi && b < end));
    bp.push(end);
    integrate_segments(|r| w.density(r) * (p.beyond(r) / scale).powf(pw), &bp, cfg)
}

/// Scale used to keep `(A/scale)^p` representable: the maximum for large
/// `p`, a coarse-grid maximum otherwise.
fn profile_scale(p: &Profile, pw: f64, max_hint: Option<f64>) -> Result<f64> {
    if pw >= 128.0 {
        let m = match max_hint {
            Some(m) => m,
            None => maximal_on(p)?.estimate.value,
        };
        if m > 0.0 {
            return Ok(m);
        }
    }
    let (lo, hi) = if p.hi.is_finite() { (p.lo, p.hi) } else { (MAX_R_MIN, 1e3) };
    let lo = lo.max(MAX_R_MIN);
    let mut s: f64 = 0.0;
    for k in 0..=32 {
        let r = lo + (hi - lo) * k as f64 / 32.0;
        s = s.max(p.a(r));
    }
    if p.hi.is_finite() {
        s = s.max(p.beyond(p.hi));
    }
    if let Some(m) = max_hint {
        s = s.max(m);
    }
    Ok(if s > 0.0 { s } else { p.f.sup().max(f64::MIN_POSITIVE) })
}

/// `I_{p,w}f(x) = (∫_0^∞ w(r) Af(x,r)^p dr)^{1/p}` for finite `p`.
pub(crate) fn integral_on(
    p: &Profile,
    w: &RadiusWeight,
    pw: f64,
    max_hint: Option<f64>,
    panels: usize,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let e = integral_unchecked(p, w, pw, max_hint, panels, cfg)?;
    if !(e.value.is_finite() && e.error_bound.is_finite()) {
        return Err(Error::Numeric(format!(
            "the integral-function of `{}` is not finite (value {}, error {})",
            p.f.descriptor(),
            e.value,
            e.error_bound
        )));
    }
    Ok(e)
}

fn integral_unchecked(
    p: &Profile,
    w: &RadiusWeight,
    pw: f64,
    max_hint: Option<f64>,
    panels: usize,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    match p.kind {
        PathKind::Zero => return Ok(Estimate::exact(0.0)),
        PathKind::Constant => {
            let c = p.constant();
            let w_mass = w.total_mass(cfg)?;
            let v = c * w_mass.value.powf(1.0 / pw);
            let err = if w_mass.value > 0.0 { v * w_mass.error_bound / (pw * w_mass.value) } else { 0.0 };
            return Ok(Estimate::deterministic(v, err, 0));
        }
        _ => {}
    }
    let scale = profile_scale(p, pw, max_hint)?;
    if p.is_deterministic() {
        let sup_scaled = p.f.sup() / scale;
        let end = truncation_end(p, w, pw, sup_scaled, cfg)?;
        let start = p.lo.min(end);
        if end <= start {
            return Ok(Estimate::exact(0.0));
        }
        let mut bp = vec![start];
        bp.extend(p.kinks().into_iter().filter(|&k| k > start && k < end));
        bp.extend(w.breakpoints().into_iter().filter(|&b| b > start && b < end));
        bp.push(end);
        bp.sort_by(f64::total_cmp);
        bp.dedup();
        // The integrand is scale-free, so only a relative tolerance keeps I(c·f) = c·I(f).
        let relative = QuadratureConfig { abs_tol: f64::MIN_POSITIVE, ..cfg.clone() };
        let j = integrate_segments(|r| w.density(r) * (p.a(r) / scale).powf(pw), &bp, &relative)?;
        let tail_sup = if p.hi.is_finite() && end >= p.hi { 1.0 } else { sup_scaled.max(1.0) };
        let trunc = if end >= w.support_bound() {
            0.0
        } else {
            tail_sup.powf(pw) * w.tail_bound(end).unwrap_or(0.0)
        };
        return Ok(finish(scale, pw, j.value, j.error_bound + trunc, 0.0, j.samples_used, false, j.converged));
    }
    let nodes = sampled_nodes(p, w, pw, scale, panels, cfg)?;
    let k = p.reps();
    let mut per_rep = vec![nodes.tail.value; k];
    let mut combined = nodes.tail.value;
    for &(r, wt) in &nodes.nodes {
        let mut mean = 0.0;
        for (j, slot) in per_rep.iter_mut().enumerate() {
            let v = p.a_rep(j, r) / scale;
            *slot += wt * v.powf(pw);
            mean += v;
        }
        mean /= k as f64;
        combined += wt * mean.powf(pw);
    }
    let (_, se) = mean_se(&per_rep);
    let samples = (k * p.reps[0].refs.len() * 2) as u64;
    Ok(finish(scale, pw, combined, nodes.tail.error_bound + nodes.trunc, se, samples, true, nodes.tail.converged))
}

#[allow(clippy::too_many_arguments)]
fn finish(scale: f64, pw: f64, j: f64, det_err: f64, se: f64, samples: u64, mc: bool, converged: bool) -> Estimate {
    let j = j.max(0.0);
    let v = scale * j.powf(1.0 / pw);
    let (det, sd) = if j > 0.0 {
        (v * det_err / (pw * j), v * se / (pw * j))
    } else {
        (scale * det_err.powf(1.0 / pw), scale * se.powf(1.0 / pw))
    };
    let mut e = if mc {
        Estimate::monte_carlo(v, sd, samples).widen(det)
    } else {
        Estimate::deterministic(v, det, samples)
    };
    e.converged = converged;
    e
}

/// Estimate of `I_{p,w}f(x)^q`. When `p` and `q/p` are integers and the
/// profile has at least `q` replicates, products of independent replicates
/// make the estimate unbiased; otherwise the plug-in value is returned.
pub(crate) fn integral_power_on(
    p: &Profile,
    w: &RadiusWeight,
    pw: f64,
    q: f64,
    panels: usize,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let unbiased = p.kind == PathKind::Sampled
        && pw.fract() == 0.0
        && (q / pw).fract() == 0.0
        && q <= p.reps() as f64;
    if !unbiased {
        return Ok(integral_on(p, w, pw, None, panels, cfg)?.value.powf(q));
    }
    let scale = profile_scale(p, pw, None)?;
    let nodes = sampled_nodes(p, w, pw, scale, panels, cfg)?;
    let (pi, groups) = (pw as usize, (q / pw) as usize);
    let mut prod = 1.0;
    for g in 0..groups {
        let mut j = nodes.tail.value;
        for &(r, wt) in &nodes.nodes {
            let mut term = 1.0;
            for i in 0..pi {
                term *= p.a_rep(g * pi + i, r) / scale;
            }
            j += wt * term;
        }
        prod *= j;
    }
    Ok(prod * scale.powf(q))
}

/// Estimate of `Af(x, r)^q`, unbiased for integer `q` up to the replicate count.
pub(crate) fn average_power_on(p: &Profile, r: f64, q: f64) -> f64 {
    if p.kind == PathKind::Sampled && q.fract() == 0.0 && q >= 2.0 && q <= p.reps() as f64 && r > p.lo && r < p.hi {
        (0..q as usize).map(|j| p.a_rep(j, r)).product()
    } else {
        p.a(r).powf(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_fraction_limits() {
        let e2 = SpaceKind::Euclidean(2);
        // sphere of radius 1 about the origin, ball of radius 1 about (1, 0): a third of the circle
        assert!((cap_fraction(e2, 1.0, 1.0, 1.0) - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(cap_fraction(e2, 1.0, 0.5, 0.4), 0.0);
        assert_eq!(cap_fraction(e2, 1.0, 0.5, 1.6), 1.0);
        let e3 = SpaceKind::Euclidean(3);
        // cap of the unit sphere cut at height 1/2
        assert!((cap_fraction(e3, 1.0, 1.0, 1.0) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn hyperbolic_cap_fraction_matches_sampling() {
        let h = SpaceInstance::affine_left();
        let (d, rho, r) = (0.8, 0.6, 0.9);
        let x = SpacePoint::Affine { a: 0.0, b: (-d as f64).exp() };
        let n = 200_000;
        let mut inside = 0;
        for k in 0..n {
            let theta = std::f64::consts::TAU * (k as f64 + 0.5) / n as f64;
            let (a, b) = crate::spaces::hyperbolic::polar_from_identity(rho, theta);
            if h.dist(&x, &SpacePoint::Affine { a, b }) < r {
                inside += 1;
            }
        }
        let frac = inside as f64 / n as f64;
        assert!((frac - cap_fraction(SpaceKind::AffineLeft, d, rho, r)).abs() < 1e-4);
    }
}
