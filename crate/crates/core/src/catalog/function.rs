//! Nonnegative test functions with support and norm metadata.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive::composite_rule, integrate, integrate_radial, Estimate, QuadratureConfig};
use crate::spaces::{hyperbolic, SpaceInstance, SpaceKind, SpacePoint};

/// Gaussians are treated as supported on `8σ` by the ball engines; the
/// neglected mass is below `e^{-32}` of the total.
const GAUSS_REACH: f64 = 8.0;
const TABLE_NODES: usize = 2048;

/// `C(ρ) = ∫_0^ρ g` tabulated with cubic Hermite interpolation, using the
/// exact derivative `g` at the nodes.
#[derive(Debug)]
struct Cumulative {
    h: f64,
    end: f64,
    c: Vec<f64>,
    d: Vec<f64>,
}

impl Cumulative {
    fn build<G: Fn(f64) -> f64>(end: f64, g: G) -> Self {
        let h = end / TABLE_NODES as f64;
        let mut c = Vec::with_capacity(TABLE_NODES + 1);
        let mut d = Vec::with_capacity(TABLE_NODES + 1);
        let mut acc = 0.0;
        c.push(0.0);
        d.push(g(0.0));
        for i in 0..TABLE_NODES {
            let a = i as f64 * h;
            let b = if i + 1 == TABLE_NODES { end } else { a + h };
            acc += composite_rule(a, b, 1).iter().map(|&(t, wt)| wt * g(t)).sum::<f64>();
            c.push(acc);
            d.push(g(b));
        }
        Self { h, end, c, d }
    }

    fn eval(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        if rho >= self.end {
            return self.c[TABLE_NODES];
        }
        let i = ((rho / self.h) as usize).min(TABLE_NODES - 1);
        let t = (rho - i as f64 * self.h) / self.h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.c[i] + h10 * self.h * self.d[i] + h01 * self.c[i + 1] + h11 * self.h * self.d[i + 1]
    }
}

#[derive(Debug, Clone)]
enum FnKind {
    Const(f64),
    Indicator { center: SpacePoint, radius: f64 },
    Gauss { center: SpacePoint, sigma: f64 },
    Bump { center: SpacePoint, radius: f64 },
    /// `b^s` on the ball of radius `radius` about the identity (affine kinds).
    Power { s: f64, radius: f64 },
    Sum(Vec<TestFunction>),
}

/// A nonnegative function on a fixed space.
#[derive(Clone)]
pub struct TestFunction {
    space: SpaceInstance,
    kind: FnKind,
    scale: f64,
    descriptor: String,
    mass: f64,
    /// Mass of `f / scale`.
    unit_mass: f64,
    table: Option<Arc<Cumulative>>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TestFunction({} on {})", self.descriptor, self.space)
    }
}

fn bump(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

fn parse_positive(spec: &str, token: &str, what: &str) -> Result<f64> {
    let v: f64 = token
        .trim()
        .parse()
        .map_err(|_| Error::parse(spec, format!("{what} `{token}` is not a number")))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::parse(spec, format!("{what} must be positive and finite")));
    }
    Ok(v)
}

/// `∫_{B_{e,R}} b^t dλ` by nested quadrature in geodesic polar coordinates.
fn power_moment(space: &SpaceInstance, t: f64, radius: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    let inner_err = Cell::new(0.0f64);
    let outer = integrate_radial(
        |rho| {
            let mean = integrate(
                |theta| {
                    let (_, b) = hyperbolic::polar_from_identity(rho, theta);
                    b.powf(t)
                },
                0.0,
                std::f64::consts::TAU,
                cfg,
            );
            match mean {
                Ok(m) => {
                    inner_err.set(inner_err.get().max(m.error_bound / std::f64::consts::TAU));
                    space.shell(rho) * m.value / std::f64::consts::TAU
                }
                Err(_) => f64::NAN,
            }
        },
        0.0,
        radius,
        cfg,
    )?;
    let shell_mass = space.unit_volume(radius);
    Ok(outer.widen(inner_err.get() * shell_mass))
}

impl TestFunction {
    /// Parses a function descriptor for `space`:
    /// `const:<c>`, `zero`, `indicator-ball:<center>:<R>`, `gauss:<center>:<sigma>`,
    /// `bump:<center>:<R>`, `power:<s>:<R>`.
    pub fn parse(space: &SpaceInstance, spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let kind = match head {
            "zero" if rest.is_empty() => FnKind::Const(0.0),
            "const" => {
                let c: f64 = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(spec, "constant must be a number"))?;
                if !c.is_finite() {
                    return Err(Error::parse(spec, "constant must be finite"));
                }
                FnKind::Const(c.abs())
            }
            "indicator-ball" | "gauss" | "bump" => {
                let (center, r) = rest
                    .rsplit_once(':')
                    .ok_or_else(|| Error::parse(spec, format!("expected {head}:<center>:<radius>")))?;
                let center = space.parse_point(center)?;
                let r = parse_positive(spec, r, if head == "gauss" { "sigma" } else { "radius" })?;
                match head {
                    "indicator-ball" => FnKind::Indicator { center, radius: r },
                    "bump" => FnKind::Bump { center, radius: r },
                    _ => {
                        if space.is_affine() {
                            return Err(Error::Usage(format!(
                                "gauss functions are defined on the euclidean kinds, not on `{space}`"
                            )));
                        }
                        FnKind::Gauss { center, sigma: r }
                    }
                }
            }
            "power" => {
                if !space.is_affine() {
                    return Err(Error::Usage(format!(
                        "power functions are defined on the affine kinds, not on `{space}`"
                    )));
                }
                let (s, r) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::parse(spec, "expected power:<s>:<R>"))?;
                let s: f64 = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(spec, "exponent must be a number"))?;
                if !s.is_finite() {
                    return Err(Error::parse(spec, "exponent must be finite"));
                }
                FnKind::Power {
                    s,
                    radius: parse_positive(spec, r, "radius")?,
                }
            }
            _ => {
                return Err(Error::parse(
                    spec,
                    "expected const:<c>, zero, indicator-ball:<center>:<R>, gauss:<center>:<sigma>, bump:<center>:<R> or power:<s>:<R>",
                ))
            }
        };
        Self::build(*space, kind, 1.0, spec.to_string())
    }

    fn build(space: SpaceInstance, kind: FnKind, scale: f64, descriptor: String) -> Result<Self> {
        let mut f = Self {
            space,
            kind,
            scale,
            descriptor,
            mass: 0.0,
            unit_mass: 0.0,
            table: None,
        };
        let shell = |rho: f64| space.shell(rho);
        match f.kind.clone() {
            FnKind::Gauss { sigma, .. } => {
                f.table = Some(Arc::new(Cumulative::build(GAUSS_REACH * sigma, |rho| {
                    shell(rho) * (-0.5 * (rho / sigma).powi(2)).exp()
                })));
            }
            FnKind::Bump { radius, .. } => {
                f.table = Some(Arc::new(Cumulative::build(radius, |rho| shell(rho) * bump(rho / radius))));
            }
            _ => {}
        }
        f.unit_mass = match &f.kind {
            FnKind::Const(c) => {
                if *c == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            FnKind::Indicator { center, radius } => space.volume(center, *radius),
            FnKind::Gauss { center, .. } | FnKind::Bump { center, .. } => {
                space.volume_scale(center) * f.table.as_ref().expect("tabulated").eval(f64::INFINITY)
            }
            FnKind::Power { s, radius } => {
                let t = if space.kind() == SpaceKind::AffineRight { s + 1.0 } else { *s };
                power_moment(&space, t, *radius, &QuadratureConfig::default())?.value
            }
            FnKind::Sum(parts) => parts.iter().map(|p| p.mass).sum(),
        };
        f.mass = f.unit_mass_times(scale);
        Ok(f)
    }

    /// `c·f` for `c ≥ 0` (negative factors are replaced by their absolute value).
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::Domain(format!("scale factor must be finite, got {c}")));
        }
        let mut g = self.clone();
        g.scale *= c.abs();
        g.mass = g.unit_mass_times(g.scale);
        g.descriptor = format!("{}*{}", c.abs(), self.descriptor);
        Ok(g)
    }

    fn unit_mass_times(&self, scale: f64) -> f64 {
        if scale == 0.0 {
            0.0
        } else {
            self.unit_mass * scale
        }
    }

    /// `(f / c, c)` for the outer scale factor `c` of `f`, so that operators
    /// can be evaluated on `f / c` and multiplied back. Zero functions are
    /// returned unchanged with `c = 1`.
    pub(crate) fn split_scale(&self) -> (TestFunction, f64) {
        if self.scale == 0.0 || self.scale == 1.0 {
            return (self.clone(), 1.0);
        }
        let mut unit = self.clone();
        unit.scale = 1.0;
        unit.mass = unit.unit_mass;
        (unit, self.scale)
    }

    /// Pointwise sum `f + g` of two functions on the same space.
    pub fn sum(&self, other: &TestFunction) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::Usage("cannot add functions on different spaces".into()));
        }
        let descriptor = format!("{}+{}", self.descriptor, other.descriptor);
        Self::build(self.space, FnKind::Sum(vec![self.clone(), other.clone()]), 1.0, descriptor)
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn space(&self) -> &SpaceInstance {
        &self.space
    }

    pub(crate) fn check_space(&self, space: &SpaceInstance) -> Result<()> {
        if *space != self.space {
            return Err(Error::Usage(format!(
                "function `{}` was built for `{}`, not `{}`",
                self.descriptor, self.space, space
            )));
        }
        Ok(())
    }

    /// `f(x)`, always finite and nonnegative.
    pub fn eval(&self, x: &SpacePoint) -> f64 {
        let base = match &self.kind {
            FnKind::Const(c) => *c,
            FnKind::Indicator { center, radius } => {
                if self.space.dist(center, x) < *radius {
                    1.0
                } else {
                    0.0
                }
            }
            FnKind::Gauss { center, sigma } => (-0.5 * (self.space.dist(center, x) / sigma).powi(2)).exp(),
            FnKind::Bump { center, radius } => bump(self.space.dist(center, x) / radius),
            FnKind::Power { s, radius } => match x {
                SpacePoint::Affine { a, b } if hyperbolic::distance(0.0, 1.0, *a, *b) < *radius => b.powf(*s),
                _ => 0.0,
            },
            FnKind::Sum(parts) => parts.iter().map(|p| p.eval(x)).sum(),
        };
        self.scale * base
    }

    pub fn is_zero(&self) -> bool {
        self.scale == 0.0
            || match &self.kind {
                FnKind::Const(c) => *c == 0.0,
                FnKind::Sum(parts) => parts.iter().all(|p| p.is_zero()),
                _ => false,
            }
    }

    /// `Some(c)` when the function is the constant `c`.
    pub fn constant_value(&self) -> Option<f64> {
        match &self.kind {
            FnKind::Const(c) => Some(c * self.scale),
            _ if self.is_zero() => Some(0.0),
            _ => None,
        }
    }

    /// Declared support: the function vanishes outside `B_{anchor, radius}`.
    /// `None` for functions without compact support.
    pub fn support(&self) -> Option<(SpacePoint, f64)> {
        match &self.kind {
            FnKind::Gauss { .. } | FnKind::Const(_) => None,
            _ => self.reach(),
        }
    }

    /// Support used by the ball engines: the declared support, or `8σ` for Gaussians.
    pub fn reach(&self) -> Option<(SpacePoint, f64)> {
        match &self.kind {
            FnKind::Const(_) => None,
            FnKind::Indicator { center, radius } | FnKind::Bump { center, radius } => Some((*center, *radius)),
            FnKind::Gauss { center, sigma } => Some((*center, GAUSS_REACH * sigma)),
            FnKind::Power { radius, .. } => Some((self.space.identity().expect("affine identity"), *radius)),
            FnKind::Sum(parts) => {
                let mut anchor: Option<(SpacePoint, f64)> = None;
                for p in parts {
                    let (c, r) = p.reach()?;
                    anchor = Some(match anchor {
                        None => (c, r),
                        Some((a, ra)) => (a, ra.max(self.space.dist(&a, &c) + r)),
                    });
                }
                anchor
            }
        }
    }

    /// Ess-sup of `f` near `x`; the built-in functions are globally bounded.
    pub fn local_bound(&self, _x: &SpacePoint) -> f64 {
        self.sup()
    }

    pub fn sup(&self) -> f64 {
        let base = match &self.kind {
            FnKind::Const(c) => *c,
            FnKind::Indicator { .. } | FnKind::Gauss { .. } | FnKind::Bump { .. } => 1.0,
            FnKind::Power { s, radius } => (s.abs() * radius).exp(),
            FnKind::Sum(parts) => parts.iter().map(|p| p.sup()).sum(),
        };
        self.scale * base
    }

    /// `∫ f dμ` (infinite for nonzero constants).
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Closed-form `‖f‖_q` where available; `q = ∞` is the ess-sup.
    pub fn known_lq_norm(&self, q: f64) -> Option<f64> {
        if self.is_zero() {
            return Some(0.0);
        }
        if q.is_infinite() {
            return match &self.kind {
                FnKind::Sum(_) => None,
                _ => Some(self.sup()),
            };
        }
        match &self.kind {
            FnKind::Indicator { center, radius } => Some(self.scale * self.space.volume(center, *radius).powf(1.0 / q)),
            FnKind::Gauss { sigma, .. } => {
                let n = self.space.dim() as f64;
                Some(self.scale * (std::f64::consts::TAU * sigma * sigma / q).powf(n / (2.0 * q)))
            }
            _ => None,
        }
    }

    /// `‖f‖_q`, closed form when known and by quadrature otherwise.
    pub fn reference_lq_norm(&self, q: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
        if !(q >= 1.0) {
            return Err(Error::Domain(format!("norm exponent must be at least 1, got {q}")));
        }
        if let Some(v) = self.known_lq_norm(q) {
            return Ok(Estimate::exact(v));
        }
        let inner = match &self.kind {
            FnKind::Const(_) => {
                return Err(Error::Domain(format!(
                    "`{}` is not in L_{q}: constants have infinite norm",
                    self.descriptor
                )))
            }
            FnKind::Bump { center, radius } => integrate_radial(
                |rho| self.space.shell(rho) * bump(rho / radius).powf(q),
                0.0,
                *radius,
                cfg,
            )?
            .scaled(self.space.volume_scale(center)),
            FnKind::Power { s, radius } => {
                let t = s * q + if self.space.kind() == SpaceKind::AffineRight { 1.0 } else { 0.0 };
                power_moment(&self.space, t, *radius, cfg)?
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "no reference norm available for `{}`",
                    self.descriptor
                )))
            }
        };
        let v = self.scale * inner.value.powf(1.0 / q);
        let err = if inner.value > 0.0 {
            v * inner.error_bound / (q * inner.value)
        } else {
            0.0
        };
        Ok(Estimate::deterministic(v, err, inner.samples_used))
    }

    /// Center of rotational symmetry for the radial kinds.
    pub(crate) fn radial_center(&self) -> Option<SpacePoint> {
        match &self.kind {
            FnKind::Indicator { center, .. } | FnKind::Gauss { center, .. } | FnKind::Bump { center, .. } => {
                Some(*center)
            }
            _ => None,
        }
    }

    /// Radial profile `φ(ρ)` with `f(y) = φ(d(center, y))`.
    pub(crate) fn profile(&self, rho: f64) -> f64 {
        let base = match &self.kind {
            FnKind::Indicator { radius, .. } => {
                if rho < *radius {
                    1.0
                } else {
                    0.0
                }
            }
            FnKind::Gauss { sigma, .. } => (-0.5 * (rho / sigma).powi(2)).exp(),
            FnKind::Bump { radius, .. } => bump(rho / radius),
            _ => f64::NAN,
        };
        self.scale * base
    }

    /// `∫_0^ρ shell(t) φ(t) dt`: the integral of `f` over `B_{center,ρ}`
    /// divided by the center's volume scale.
    pub(crate) fn cumulative(&self, rho: f64) -> f64 {
        let base = match &self.kind {
            FnKind::Indicator { radius, .. } => {
                if rho <= 0.0 {
                    0.0
                } else {
                    self.space.unit_volume(rho.min(*radius))
                }
            }
            _ => self.table.as_ref().map_or(f64::NAN, |t| t.eval(rho)),
        };
        self.scale * base
    }

    /// `∫_{x-r}^{x+r} f` on one-dimensional spaces.
    pub(crate) fn ball_integral_1d(&self, x: f64, r: f64) -> f64 {
        match &self.kind {
            FnKind::Const(c) => 2.0 * r * c * self.scale,
            FnKind::Sum(parts) => self.scale * parts.iter().map(|p| p.ball_integral_1d(x, r)).sum::<f64>(),
            FnKind::Indicator { center, radius } => {
                let c = line_coord(center);
                let lo = (x - r).max(c - radius);
                let hi = (x + r).min(c + radius);
                self.scale * (hi - lo).max(0.0)
            }
            FnKind::Gauss { center, sigma } => {
                let k = std::f64::consts::SQRT_2 * sigma;
                let (a, b) = ((x - r - line_coord(center)) / k, (x + r - line_coord(center)) / k);
                // erfc differences keep far tails accurate.
                let width = if a >= 0.0 {
                    libm::erfc(a) - libm::erfc(b)
                } else if b <= 0.0 {
                    libm::erfc(-b) - libm::erfc(-a)
                } else {
                    libm::erf(b) - libm::erf(a)
                };
                self.scale * 0.5 * k * std::f64::consts::PI.sqrt() * width.max(0.0)
            }
            _ => {
                let c = self.radial_center().map(|p| line_coord(&p)).unwrap_or(f64::NAN);
                let half = 0.5 * self.cumulative(f64::INFINITY);
                let anti = |t: f64| {
                    let d = t - c;
                    half + d.signum() * 0.5 * self.cumulative(d.abs())
                };
                anti(x + r) - anti(x - r)
            }
        }
    }

    /// Radii at which `r ↦ ∫_{x-r}^{x+r} f` may have kinks, on one-dimensional spaces.
    pub(crate) fn kinks_1d(&self, x: f64) -> Vec<f64> {
        match &self.kind {
            FnKind::Const(_) => Vec::new(),
            FnKind::Sum(parts) => parts.iter().flat_map(|p| p.kinks_1d(x)).collect(),
            _ => match self.reach() {
                Some((c, r)) => {
                    let c = line_coord(&c);
                    vec![(x - c + r).abs(), (x - c - r).abs()]
                }
                None => Vec::new(),
            },
        }
    }
}

pub(crate) fn line_coord(p: &SpacePoint) -> f64 {
    match p {
        SpacePoint::Real1(x) => *x,
        SpacePoint::RealN(q) => q.coords()[0],
        SpacePoint::Affine { a, .. } => *a,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> SpaceInstance {
        SpaceInstance::real_line()
    }

    #[test]
    fn indicator_on_the_line() {
        let f = TestFunction::parse(&line(), "indicator-ball:0:1").unwrap();
        assert_eq!(f.support(), Some((SpacePoint::Real1(0.0), 1.0)));
        assert!((f.known_lq_norm(2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(f.eval(&SpacePoint::Real1(0.5)), 1.0);
        assert_eq!(f.eval(&SpacePoint::Real1(1.0)), 0.0);
        assert_eq!(f.ball_integral_1d(2.0, 3.0), 2.0);
        assert_eq!(f.ball_integral_1d(0.0, 0.5), 1.0);
    }

    #[test]
    fn constants() {
        let f = TestFunction::parse(&line(), "const:5").unwrap();
        assert_eq!(f.eval(&SpacePoint::Real1(1e6)), 5.0);
        assert!(f.support().is_none());
        assert_eq!(f.constant_value(), Some(5.0));
        let g = TestFunction::parse(&line(), "const:-2").unwrap();
        assert_eq!(g.eval(&SpacePoint::Real1(0.0)), 2.0);
        assert!(TestFunction::parse(&line(), "zero").unwrap().is_zero());
    }

    #[test]
    fn hyperbolic_indicator_norm() {
        let h = SpaceInstance::affine_left();
        let f = TestFunction::parse(&h, "indicator-ball:e:1").unwrap();
        assert!((f.known_lq_norm(1.0).unwrap() - 3.4123).abs() < 1e-4);
        assert!((f.mass() - 2.0 * std::f64::consts::PI * (1f64.cosh() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn wrong_space_kinds_are_usage_errors() {
        let h = SpaceInstance::affine_left();
        assert!(matches!(TestFunction::parse(&h, "gauss:e:1"), Err(Error::Usage(_))));
        assert!(matches!(TestFunction::parse(&line(), "power:1:1"), Err(Error::Usage(_))));
        assert!(matches!(TestFunction::parse(&line(), "wave:1"), Err(Error::Parse { .. })));
        assert!(matches!(TestFunction::parse(&line(), "bump:0:-1"), Err(Error::Parse { .. })));
    }

    #[test]
    fn tabulated_cumulative_matches_quadrature() {
        let e2 = SpaceInstance::euclidean(2).unwrap();
        let f = TestFunction::parse(&e2, "gauss:0,0:0.7").unwrap();
        let total = std::f64::consts::TAU * 0.49;
        assert!((f.mass() - total).abs() < 1e-12 * total);
        let half = f.cumulative(0.5);
        let exact = total * (1.0 - (-0.5f64 * (0.5 / 0.7f64).powi(2)).exp());
        assert!((half - exact).abs() < 1e-12);
    }

    #[test]
    fn bump_antiderivative_is_consistent() {
        let f = TestFunction::parse(&line(), "bump:0.5:2").unwrap();
        let cfg = QuadratureConfig::default();
        let direct = integrate(|t| f.eval(&SpacePoint::Real1(t)), -0.3, 1.9, &cfg).unwrap().value;
        let via = f.ball_integral_1d(0.8, 1.1);
        assert!((direct - via).abs() < 1e-11, "{direct} {via}");
    }

    #[test]
    fn power_norms_by_quadrature() {
        let h = SpaceInstance::affine_left();
        let cfg = QuadratureConfig::default();
        // b^0 is the indicator of the ball.
        let f = TestFunction::parse(&h, "power:0:1").unwrap();
        let n = f.reference_lq_norm(1.0, &cfg).unwrap();
        assert!((n.value - h.unit_volume(1.0)).abs() < 1e-9);
        // b^{-1} integrates to λ(B) against ρ because the circle mean of b is 1.
        let r = SpaceInstance::affine_right();
        let g = TestFunction::parse(&r, "power:-1:1.5").unwrap();
        assert!((g.mass() - r.unit_volume(1.5)).abs() < 1e-8);
    }
}
