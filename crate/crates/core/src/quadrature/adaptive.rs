//! Globally adaptive Gauss–Kronrod (7, 15) integration by bisection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Estimate, QuadratureConfig};
use crate::error::{Error, Result};

/// Kronrod abscissae on [-1, 1] (positive half, descending; the last is 0).
pub(crate) const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

pub(crate) const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

/// Gauss weights for the abscissae `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Upper bound on live panels; reaching it ends refinement like depth exhaustion.
const MAX_PANELS: usize = 200_000;

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(Error::Numeric(format!("integrand is {fc} at r = {center}")));
    }
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        if !f1.is_finite() || !f2.is_finite() {
            let at = if f1.is_finite() { center + dx } else { center - dx };
            return Err(Error::Numeric(format!("integrand is not finite at r = {at}")));
        }
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let k = kronrod * half;
    let g = gauss * half;
    Ok((k, (k - g).abs()))
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    depth: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integrates `f` over the union of consecutive segments `[bp[i], bp[i+1]]`.
///
/// Breakpoints let callers place known kinks on panel edges; refinement is
/// driven by the largest panel error until the summed error meets
/// `max(abs_tol, rel_tol·|value|)` or every offending panel reached `max_depth`.
pub fn integrate_segments<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], cfg: &QuadratureConfig) -> Result<Estimate> {
    if breakpoints.len() < 2 {
        return Err(Error::Usage("at least two breakpoints are required".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut finished: Vec<Panel> = Vec::new();
    let mut evals: u64 = 0;
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(a.is_finite() && b.is_finite()) || b < a {
            return Err(Error::Domain(format!("invalid integration segment [{a}, {b}]")));
        }
        if b == a {
            continue;
        }
        let (value, err) = gk15(&f, a, b)?;
        evals += 15;
        heap.push(Panel { a, b, value, err, depth: 0 });
    }
    let mut converged = true;
    let (mut total, mut err) = heap.iter().fold((0.0, 0.0), |(v, e), p: &Panel| (v + p.value, e + p.err));
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if err <= tol {
            break;
        }
        if heap.len() + finished.len() >= MAX_PANELS {
            converged = false;
            break;
        }
        let Some(worst) = heap.pop() else {
            converged = false;
            break;
        };
        if worst.depth >= cfg.max_depth {
            finished.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(&f, worst.a, mid)?;
        let (v2, e2) = gk15(&f, mid, worst.b)?;
        evals += 30;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.err;
        let depth = worst.depth + 1;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
            depth,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
            depth,
        });
    }
    // Sum panels in positional order so the result does not depend on heap layout.
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(finished);
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let err: f64 = panels.iter().map(|p| p.err).sum();
    let mut est = Estimate::deterministic(value, if converged { err } else { 10.0 * err + cfg.abs_tol }, evals);
    est.converged = converged;
    Ok(est)
}

/// `∫_a^b f` over an arbitrary finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    integrate_segments(f, &[a, b], cfg)
}

/// `∫_{r_lo}^{r_hi} g(r) dr` for `0 ≤ r_lo < r_hi < ∞`.
pub fn integrate_radial<F: Fn(f64) -> f64>(g: F, r_lo: f64, r_hi: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    if !(r_lo >= 0.0 && r_lo < r_hi && r_hi.is_finite()) {
        return Err(Error::Domain(format!(
            "radial integration needs 0 <= r_lo < r_hi < inf, got [{r_lo}, {r_hi}]"
        )));
    }
    integrate(g, r_lo, r_hi, cfg)
}

/// Nodes and weights of a composite 15-point Kronrod rule with `panels`
/// equal panels on `[a, b]`. Used where the integrand is a fixed Monte Carlo
/// profile and adaptive refinement would only chase sampling noise.
pub(crate) fn composite_rule(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(panels * 15);
    if b <= a || panels == 0 {
        return out;
    }
    let h = (b - a) / panels as f64;
    for k in 0..panels {
        let lo = a + h * k as f64;
        let c = lo + 0.5 * h;
        let half = 0.5 * h;
        for j in 0..7 {
            out.push((c - half * XGK[j], WGK[j] * half));
        }
        out.push((c, WGK[7] * half));
        for j in (0..7).rev() {
            out.push((c + half * XGK[j], WGK[j] * half));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn constant_on_unit_interval() {
        let e = integrate_radial(|_| 1.0, 0.0, 1.0, &cfg()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        assert!(e.converged);
    }

    #[test]
    fn cubic_polynomials_are_exact() {
        let e = integrate_radial(|r| 4.0 * r * r * r - 3.0 * r * r + 2.0 * r - 7.0, 0.0, 1.0, &cfg()).unwrap();
        // 1 - 1 + 1 - 7
        assert!((e.value + 6.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_matches_antiderivative() {
        let e = integrate_radial(|r| (-r).exp(), 0.0, 18.42, &cfg()).unwrap();
        assert!((e.value - (1.0 - (-18.42f64).exp())).abs() < 1e-9);
    }

    #[test]
    fn kinked_integrand_is_resolved() {
        let f = |r: f64| (r - 0.3).abs() + if r > 0.71 { 1.0 } else { 0.0 };
        let e = integrate_radial(f, 0.0, 1.0, &cfg()).unwrap();
        let exact = 0.5 * 0.09 + 0.5 * 0.49 + 0.29;
        assert!((e.value - exact).abs() < 1e-9, "{}", e.value);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let r = integrate_radial(|r| 1.0 / (r - 0.5), 0.0, 1.0, &cfg());
        assert!(r.is_err() || !r.unwrap().converged);
        let r = integrate_radial(|_| f64::NAN, 0.0, 1.0, &cfg());
        assert!(matches!(r, Err(Error::Numeric(_))));
    }

    #[test]
    fn depth_exhaustion_is_flagged() {
        let mut c = cfg();
        c.max_depth = 10;
        c.rel_tol = 1e-14;
        c.abs_tol = 1e-15;
        let e = integrate_radial(|r| r.sqrt().sin() / (r + 1e-9).sqrt(), 0.0, 1.0, &c).unwrap();
        assert!(!e.converged);
        assert!(e.error_bound.is_finite());
    }

    #[test]
    fn bad_limits_are_rejected() {
        assert!(matches!(integrate_radial(|_| 1.0, 1.0, 1.0, &cfg()), Err(Error::Domain(_))));
        assert!(matches!(integrate_radial(|_| 1.0, -1.0, 1.0, &cfg()), Err(Error::Domain(_))));
    }

    #[test]
    fn composite_rule_weights_sum_to_length() {
        let rule = composite_rule(0.5, 3.0, 7);
        let s: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((s - 2.5).abs() < 1e-13);
        assert!(rule.windows(2).all(|w| w[0].0 < w[1].0));
    }
}
