//! The averaging function `Af(x, r)`, the maximal function `Mf(x)`, the
//! integral-function `I_{p,w}f(x)`, `L_q` norms of fields and p-sweeps.

mod envelope;
mod field;
mod profile;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{RadiusWeight, TestFunction};
use crate::error::{Error, Result};
use crate::quadrature::{Estimate, QuadratureConfig};
use crate::spaces::{label_hash, substream, SpaceInstance, SpacePoint};

pub use envelope::{certify_region, tail_beyond, Envelope};
pub use field::{lq_norm, AverageField, Field, FnField, IntegralField, MaximalField, Region, TailCertificate};

pub(crate) use profile::Budget;
use profile::{integral_on, maximal_on, Profile};

/// An exponent in `[1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PExponent(f64);

impl PExponent {
    pub const ONE: Self = Self(1.0);
    pub const INFINITY: Self = Self(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value >= 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::Domain(format!("exponent must be at least 1, got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn recip(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }
}

impl TryFrom<f64> for PExponent {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PExponent> for f64 {
    fn from(p: PExponent) -> f64 {
        p.0
    }
}

impl FromStr for PExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            return Ok(Self::INFINITY);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::parse(t, "expected a number at least 1 or `inf`"))?;
        Self::new(v).map_err(|e| Error::parse(t, e.to_string()))
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.pad("inf")
        } else {
            f.pad(&self.0.to_string())
        }
    }
}

/// One row of a p-sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: PExponent,
    pub i_value: Estimate,
    /// `I_{p,w}f(x) / ‖w‖^{1/p}`.
    pub normalized: f64,
    /// `Mf(x) − normalized`.
    pub gap_to_max: f64,
    pub maximal: f64,
}

fn profile_seed(cfg: &QuadratureConfig) -> u64 {
    substream(cfg.master_seed, label_hash("profile"))
}

/// `Af(x, r)`: the mean of `f` over `B_{x,r}`.
pub fn average(space: &SpaceInstance, f: &TestFunction, x: &SpacePoint, r: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius must be positive and finite, got {r}")));
    }
    let (f, c) = f.split_scale();
    let p = Profile::new(space, &f, x, Budget::single(cfg), profile_seed(cfg), cfg)?;
    Ok(p.a_est(r).scaled(c))
}

/// `Mf(x) = sup_{r>0} Af(x, r)`.
pub fn maximal(space: &SpaceInstance, f: &TestFunction, x: &SpacePoint, cfg: &QuadratureConfig) -> Result<Estimate> {
    let (f, c) = f.split_scale();
    let p = Profile::new(space, &f, x, Budget::single(cfg), profile_seed(cfg), cfg)?;
    Ok(maximal_on(&p)?.estimate.scaled(c))
}

/// `Mf(x)` together with the smallest radius attaining it.
pub fn maximal_radius(
    space: &SpaceInstance,
    f: &TestFunction,
    x: &SpacePoint,
    cfg: &QuadratureConfig,
) -> Result<(Estimate, f64)> {
    let (f, c) = f.split_scale();
    let p = Profile::new(space, &f, x, Budget::single(cfg), profile_seed(cfg), cfg)?;
    let m = maximal_on(&p)?;
    Ok((m.estimate.scaled(c), m.radius))
}

/// `I_{p,w}f(x) = (∫_0^∞ w(r) Af(x,r)^p dr)^{1/p}`, and `Mf(x)` for `p = ∞`.
pub fn integral_function(
    space: &SpaceInstance,
    f: &TestFunction,
    w: &RadiusWeight,
    p: PExponent,
    x: &SpacePoint,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    if p.is_infinite() {
        return maximal(space, f, x, cfg);
    }
    let budget = Budget::single(cfg);
    let (f, c) = f.split_scale();
    let prof = Profile::new(space, &f, x, budget, profile_seed(cfg), cfg)?;
    Ok(integral_on(&prof, w, p.value(), None, budget.panels, cfg)?.scaled(c))
}

/// `I_{p,w}f(x)` with an explicit sampling budget and seed.
#[allow(clippy::too_many_arguments)]
pub(crate) fn integral_with(
    space: &SpaceInstance,
    f: &TestFunction,
    w: &RadiusWeight,
    p: PExponent,
    x: &SpacePoint,
    budget: Budget,
    seed: u64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let prof = Profile::new(space, f, x, budget, seed, cfg)?;
    if p.is_infinite() {
        return Ok(maximal_on(&prof)?.estimate);
    }
    integral_on(&prof, w, p.value(), None, budget.panels, cfg)
}

/// `I_{p,w}f(x)` for each `p` of an ascending list, normalized by `‖w‖^{1/p}`
/// and compared with `Mf(x)`. All rows share one radius profile.
pub fn p_sweep(
    space: &SpaceInstance,
    f: &TestFunction,
    w: &RadiusWeight,
    x: &SpacePoint,
    p_list: &[PExponent],
    cfg: &QuadratureConfig,
) -> Result<Vec<SweepRow>> {
    if p_list.len() < 2 {
        return Err(Error::Usage("a sweep needs at least two exponents".into()));
    }
    if p_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Usage("sweep exponents must be strictly ascending".into()));
    }
    let budget = Budget::single(cfg);
    let (f, c) = f.split_scale();
    let prof = Profile::new(space, &f, x, budget, profile_seed(cfg), cfg)?;
    let m = maximal_on(&prof)?.estimate.scaled(c);
    let mass = w.total_mass(cfg)?.value;
    p_list
        .par_iter()
        .map(|&p| {
            let i = if p.is_infinite() {
                m
            } else {
                integral_on(&prof, w, p.value(), Some(m.value / c), budget.panels, cfg)?.scaled(c)
            };
            let normalized = (i.value / mass.powf(p.recip())).max(0.0);
            Ok(SweepRow {
                p,
                i_value: i,
                normalized,
                gap_to_max: m.value - normalized,
                maximal: m.value,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::make_function;

    fn line() -> SpaceInstance {
        SpaceInstance::real_line()
    }

    #[test]
    fn exponent_parsing() {
        assert!("inf".parse::<PExponent>().unwrap().is_infinite());
        assert_eq!("2.5".parse::<PExponent>().unwrap().value(), 2.5);
        assert!(matches!("0.5".parse::<PExponent>(), Err(Error::Parse { .. })));
        assert!(matches!(PExponent::new(0.5), Err(Error::Domain(_))));
        assert_eq!(PExponent::INFINITY.recip(), 0.0);
        assert_eq!(PExponent::INFINITY.to_string(), "inf");
    }

    #[test]
    fn interval_averages() {
        let cfg = QuadratureConfig::default();
        let f = make_function(&line(), "indicator-ball:0:1").unwrap();
        let a = average(&line(), &f, &SpacePoint::Real1(0.0), 2.0, &cfg).unwrap();
        assert!((a.value - 0.5).abs() < 1e-15);
        let a = average(&line(), &f, &SpacePoint::Real1(2.0), 3.0, &cfg).unwrap();
        assert!((a.value - 1.0 / 3.0).abs() < 1e-15);
        assert!(average(&line(), &f, &SpacePoint::Real1(2.0), 0.0, &cfg).is_err());
    }

    #[test]
    fn maximal_on_the_line() {
        let cfg = QuadratureConfig::default();
        let f = make_function(&line(), "indicator-ball:0:1").unwrap();
        for &x in &[0.0, 0.5, 1.5, 2.0, 5.0] {
            let m = maximal(&line(), &f, &SpacePoint::Real1(x), &cfg).unwrap();
            let expected = if x <= 1.0 { 1.0 } else { 1.0 / (1.0 + x) };
            assert!((m.value - expected).abs() < 1e-6, "x={x} {}", m.value);
        }
    }

    #[test]
    fn exp_weight_indicator_integral() {
        let cfg = QuadratureConfig::default();
        let f = make_function(&line(), "indicator-ball:0:1").unwrap();
        let i = integral_function(&line(), &f, &RadiusWeight::exp(), PExponent::ONE, &SpacePoint::Real1(0.0), &cfg).unwrap();
        // 1 − e^{-1} + E₁(1)
        assert!((i.value - 0.851_504_493_2).abs() < 1e-8, "{}", i.value);
    }

    #[test]
    fn infinite_exponent_delegates() {
        let cfg = QuadratureConfig::default();
        let f = make_function(&line(), "indicator-ball:0:1").unwrap();
        let x = SpacePoint::Real1(2.0);
        let i = integral_function(&line(), &f, &RadiusWeight::exp(), PExponent::INFINITY, &x, &cfg).unwrap();
        assert_eq!(i, maximal(&line(), &f, &x, &cfg).unwrap());
    }

    #[test]
    fn constants_and_zero() {
        let cfg = QuadratureConfig::default();
        let h = SpaceInstance::affine_right();
        let x = SpacePoint::Affine { a: 0.3, b: 2.0 };
        let c = make_function(&h, "const:3").unwrap();
        let w = RadiusWeight::gauss();
        let mass = w.total_mass(&cfg).unwrap().value;
        let i = integral_function(&h, &c, &w, PExponent::new(2.0).unwrap(), &x, &cfg).unwrap();
        assert!((i.value - 3.0 * mass.sqrt()).abs() < 1e-9);
        let z = make_function(&h, "zero").unwrap();
        assert_eq!(maximal(&h, &z, &x, &cfg).unwrap().value, 0.0);
    }

    #[test]
    fn sweep_rejects_bad_lists() {
        let cfg = QuadratureConfig::default();
        let f = make_function(&line(), "indicator-ball:0:1").unwrap();
        let x = SpacePoint::Real1(0.0);
        let w = RadiusWeight::exp();
        assert!(p_sweep(&line(), &f, &w, &x, &[PExponent::ONE], &cfg).is_err());
        let ps = [PExponent::new(2.0).unwrap(), PExponent::ONE];
        assert!(p_sweep(&line(), &f, &w, &x, &ps, &cfg).is_err());
    }

    #[test]
    fn radial_path_matches_sampling_on_the_plane() {
        let cfg = QuadratureConfig::default();
        let e2 = SpaceInstance::euclidean(2).unwrap();
        let f = make_function(&e2, "bump:0,0:1").unwrap();
        let x = SpacePoint::euclidean(&[0.7, 0.2]).unwrap();
        let det = average(&e2, &f, &x, 0.9, &cfg).unwrap();
        assert!(!det.is_monte_carlo());
        let mc = crate::quadrature::mc_integrate_ball(&e2, &f, &x, 0.9, &cfg).unwrap();
        let mean = mc.value / e2.ball_volume(&x, 0.9).unwrap();
        let se = mc.std_error / e2.ball_volume(&x, 0.9).unwrap();
        assert!((det.value - mean).abs() < 4.0 * se, "{} vs {mean}", det.value);
    }

    #[test]
    fn radial_path_matches_sampling_on_the_half_plane() {
        let cfg = QuadratureConfig::default();
        let h = SpaceInstance::affine_left();
        let f = make_function(&h, "indicator-ball:e:1").unwrap();
        let x = SpacePoint::Affine { a: 0.8, b: 1.3 };
        let det = average(&h, &f, &x, 1.2, &cfg).unwrap();
        let mc = crate::quadrature::mc_integrate_ball(&h, &f, &x, 1.2, &cfg).unwrap();
        let v = h.ball_volume(&x, 1.2).unwrap();
        assert!((det.value - mc.value / v).abs() < 4.0 * mc.std_error / v + 1e-12);
    }
}
