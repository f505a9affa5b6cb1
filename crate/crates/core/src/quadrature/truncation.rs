use super::QuadratureConfig;
use crate::catalog::RadiusWeight;
use crate::error::{Error, Result};

/// Smallest practical `R` with `integrand_sup^p · ∫_R^∞ w ≤ tail_tol`.
///
/// Weights with finite support return the support bound. A zero integrand
/// returns the floor `1.0`.
pub fn truncation_radius(w: &RadiusWeight, integrand_sup: f64, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(integrand_sup >= 0.0 && integrand_sup.is_finite()) {
        return Err(Error::Domain(format!("integrand bound must be finite and nonnegative, got {integrand_sup}")));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("exponent must be finite and at least 1, got {p}")));
    }
    let support = w.support_bound();
    if integrand_sup == 0.0 {
        return Ok(1.0f64.min(support));
    }
    if support.is_finite() {
        return Ok(support);
    }
    if w.tail_bound(1.0).is_none() {
        return Err(Error::Config(format!(
            "weight `{}` has neither a tail bound nor finite support",
            w.descriptor()
        )));
    }
    // Work in logs so that sup^p may exceed the float range.
    let log_budget = cfg.tail_tol.ln() - p * integrand_sup.ln();
    let ok = |r: f64| -> bool {
        let t = w.tail_bound(r).unwrap_or(f64::INFINITY);
        t <= 0.0 || t.ln() <= log_budget
    };
    let mut hi = 1.0;
    while !ok(hi) {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Numeric(format!(
                "tail of `{}` does not fall below {:e}",
                w.descriptor(),
                cfg.tail_tol
            )));
        }
    }
    if ok(0.0) {
        return Ok(1.0);
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_tail() {
        let w: RadiusWeight = "exp".parse().unwrap();
        let mut cfg = QuadratureConfig::default();
        cfg.tail_tol = 1e-8;
        let r = truncation_radius(&w, 1.0, 1.0, &cfg).unwrap();
        assert!((r - 1e8f64.ln()).abs() < 1e-9, "{r}");
    }

    #[test]
    fn finite_support_and_zero_integrand() {
        let cfg = QuadratureConfig::default();
        let w: RadiusWeight = "uniform:5".parse().unwrap();
        assert_eq!(truncation_radius(&w, 1.0, 2.0, &cfg).unwrap(), 5.0);
        let w: RadiusWeight = "exp".parse().unwrap();
        assert_eq!(truncation_radius(&w, 0.0, 1.0, &cfg).unwrap(), 1.0);
    }

    #[test]
    fn larger_powers_of_small_bounds_truncate_earlier() {
        let cfg = QuadratureConfig::default();
        let w: RadiusWeight = "exp".parse().unwrap();
        let r1 = truncation_radius(&w, 0.5, 1.0, &cfg).unwrap();
        let r8 = truncation_radius(&w, 0.5, 8.0, &cfg).unwrap();
        assert!(r8 < r1);
    }
}
