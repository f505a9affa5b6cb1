//! Radius-weights, the modular ball factor and G-norm, and test functions.

mod function;
mod weight;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive::composite_rule, integrate_segments, truncation_radius, Estimate, QuadratureConfig};
use crate::spaces::{hyperbolic, label_hash, stream, substream, SpaceInstance};

pub use function::TestFunction;
pub(crate) use function::line_coord;
pub use weight::{CustomWeight, RadiusWeight};

use rand::Rng;

/// Number of log-spaced nodes of the adaptive weight table.
pub const ADAPTIVE_NODES: usize = 512;
pub const ADAPTIVE_R_MIN: f64 = 1e-3;
pub const ADAPTIVE_R_MAX: f64 = 6.0;

const FACTOR_BATCHES: usize = 8;

/// Parses `exp`, `gauss`, `uniform:<R>`, `table:<path>` or `<c>*<spec>`.
pub fn make_weight(spec: &str) -> Result<RadiusWeight> {
    spec.parse()
}

/// Like [`make_weight`] but also accepts `adaptive`, which depends on the space.
pub fn make_weight_on(space: &SpaceInstance, spec: &str, cfg: &QuadratureConfig) -> Result<RadiusWeight> {
    if spec.trim() == "adaptive" {
        adaptive_weight(space, cfg)
    } else {
        make_weight(spec)
    }
}

pub fn make_function(space: &SpaceInstance, spec: &str) -> Result<TestFunction> {
    TestFunction::parse(space, spec)
}

pub fn total_mass(w: &RadiusWeight, cfg: &QuadratureConfig) -> Result<Estimate> {
    w.total_mass(cfg)
}

/// The ball-averaged modular factor `(1/λ(B_{e,r})) ∫_{B_{e,r}} Δ(y⁻¹) dλ(y)`
/// evaluated with one fixed set of reference draws, so that it is a smooth
/// function of `r`.
pub struct ModularFactor {
    /// `(u, θ)` pairs of the exact left-Haar polar sampler; empty when `Δ ≡ 1`.
    refs: Vec<(f64, f64)>,
}

impl ModularFactor {
    pub fn new(space: &SpaceInstance, cfg: &QuadratureConfig) -> Self {
        if !space.is_affine() {
            return Self { refs: Vec::new() };
        }
        let mut rng = stream(substream(cfg.master_seed, label_hash("modular-factor")), 0);
        let refs = (0..cfg.mc_samples)
            .map(|_| (rng.random::<f64>(), std::f64::consts::TAU * rng.random::<f64>()))
            .collect();
        Self { refs }
    }

    /// Estimate at radius `r` with a batch-means standard error.
    pub fn at(&self, r: f64) -> Estimate {
        if self.refs.is_empty() {
            return Estimate::exact(1.0);
        }
        let cm1 = hyperbolic::cosh_m1(r);
        let per = self.refs.len() / FACTOR_BATCHES;
        let mut batch = [0.0; FACTOR_BATCHES];
        let mut total = 0.0;
        for (i, &(u, theta)) in self.refs.iter().enumerate() {
            // Δ(y⁻¹) = b for y = (a, b).
            let (_, b) = hyperbolic::polar_from_cosh(1.0 + u * cm1, theta);
            total += b;
            if per > 0 && i / per < FACTOR_BATCHES {
                batch[i / per] += b;
            }
        }
        let n = self.refs.len() as f64;
        let mean = total / n;
        let se = if per > 0 {
            let means: Vec<f64> = batch.iter().map(|s| s / per as f64).collect();
            let m = means.iter().sum::<f64>() / FACTOR_BATCHES as f64;
            let var = means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (FACTOR_BATCHES - 1) as f64;
            (var / FACTOR_BATCHES as f64).sqrt()
        } else {
            0.0
        };
        Estimate::monte_carlo(mean, se, self.refs.len() as u64)
    }

    pub fn mean_only(&self, r: f64) -> f64 {
        if self.refs.is_empty() {
            return 1.0;
        }
        let cm1 = hyperbolic::cosh_m1(r);
        let s: f64 = self
            .refs
            .iter()
            .map(|&(u, theta)| hyperbolic::polar_from_cosh(1.0 + u * cm1, theta).1)
            .sum();
        s / self.refs.len() as f64
    }
}

/// `(1/λ(B_{e,r})) ∫_{B_{e,r}} Δ(y⁻¹) dλ(y)`; exactly 1 on the unimodular kinds.
pub fn modular_ball_factor(space: &SpaceInstance, r: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius must be positive and finite, got {r}")));
    }
    Ok(ModularFactor::new(space, cfg).at(r))
}

/// `‖w‖_G = ∫_0^∞ w(r) · (1/λ(B_{e,r})) ∫_{B_{e,r}} Δ(y⁻¹) dλ(y) dr`.
///
/// Unimodular kinds return `‖w‖`. On `affine-left` the inner factor is a
/// common-random-numbers Monte Carlo curve integrated adaptively; the standard
/// error is integrated alongside it.
pub fn g_norm(space: &SpaceInstance, w: &RadiusWeight, cfg: &QuadratureConfig) -> Result<Estimate> {
    match space.kind() {
        crate::spaces::SpaceKind::AffineRight => Err(Error::Usage(
            "the G-norm is defined for left Haar measure; use affine-left".into(),
        )),
        _ if !space.is_affine() => w.total_mass(cfg),
        _ => {
            let factor = ModularFactor::new(space, cfg);
            g_norm_with(&factor, w, cfg)
        }
    }
}

pub(crate) fn g_norm_with(factor: &ModularFactor, w: &RadiusWeight, cfg: &QuadratureConfig) -> Result<Estimate> {
    let end = truncation_radius(w, 1.0, 1.0, cfg)?;
    let mut bp = vec![0.0];
    bp.extend(w.breakpoints().into_iter().filter(|&b| b > 0.0 && b < end));
    bp.push(end);
    let mut loose = cfg.clone();
    loose.rel_tol = cfg.rel_tol.max(1e-8);
    let value = integrate_segments(|r| w.density(r) * factor.mean_only(r), &bp, &loose)?;
    let mut se = 0.0;
    for seg in bp.windows(2) {
        for (r, wt) in composite_rule(seg[0], seg[1], 4) {
            se += wt * w.density(r) * factor.at(r).std_error;
        }
    }
    let tail = if w.support_bound().is_finite() { 0.0 } else { w.tail_bound(end).unwrap_or(0.0) };
    let mut est = Estimate::monte_carlo(value.value, se, factor.refs.len() as u64);
    est.error_bound += value.error_bound + tail;
    Ok(est)
}

/// The weight `e^{-r²}` divided by the modular ball factor wherever that
/// factor exceeds 1, tabulated at 512 log-spaced radii on `[1e-3, 6]`.
pub fn adaptive_weight(space: &SpaceInstance, cfg: &QuadratureConfig) -> Result<RadiusWeight> {
    if space.kind() == crate::spaces::SpaceKind::AffineRight {
        return Err(Error::Usage("the adaptive weight is built from left Haar measure; use affine-left".into()));
    }
    let factor = ModularFactor::new(space, cfg);
    let ratio = (ADAPTIVE_R_MAX / ADAPTIVE_R_MIN).ln();
    let rs: Vec<f64> = (0..ADAPTIVE_NODES)
        .map(|i| ADAPTIVE_R_MIN * (ratio * i as f64 / (ADAPTIVE_NODES - 1) as f64).exp())
        .collect();
    let ws: Vec<f64> = rs
        .iter()
        .map(|&r| {
            let g = (-r * r).exp();
            let k = factor.mean_only(r);
            if k > 1.0 {
                g / k
            } else {
                g
            }
        })
        .collect();
    let table = RadiusWeight::adaptive_table(rs, ws)?;
    Ok(RadiusWeight::adaptive(table, format!("adaptive:{}", space.descriptor())))
}
