//! Metric measure spaces: the real line, Euclidean ℝⁿ (n ≤ 3), and the affine
//! group `ax + b` carrying its left-invariant hyperbolic metric together with
//! either the left or the right Haar measure.
//!
//! Conventions on the affine group: a point `(a, b)` with `b > 0` is the map
//! `t ↦ b t + a`, the identity is `(0, 1)`, the left Haar density is `1/b²`,
//! the right Haar density is `1/b`, and the modular function is `Δ(a, b) = 1/b`.

pub mod hyperbolic;
pub mod sampling;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use sampling::{label_hash, stream, substream, BallSampler, Stream};

/// Coordinates of a point of ℝⁿ, `1 ≤ n ≤ 3`, stored inline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanPoint {
    pub(crate) coords: [f64; 3],
    pub(crate) dim: usize,
}

impl EuclideanPoint {
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > 3 {
            return Err(Error::Domain(format!(
                "euclidean points have 1 to 3 coordinates, got {}",
                coords.len()
            )));
        }
        let mut c = [0.0; 3];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Self {
            coords: c,
            dim: coords.len(),
        })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// An element of one of the supported spaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpacePoint {
    Real1(f64),
    RealN(EuclideanPoint),
    Affine { a: f64, b: f64 },
}

impl SpacePoint {
    pub fn affine(a: f64, b: f64) -> Result<Self> {
        let p = SpacePoint::Affine { a, b };
        p.validate()?;
        Ok(p)
    }

    pub fn euclidean(coords: &[f64]) -> Result<Self> {
        let p = SpacePoint::RealN(EuclideanPoint::new(coords)?);
        p.validate()?;
        Ok(p)
    }

    /// Checks finiteness and, for affine points, `b > 0`.
    pub fn validate(&self) -> Result<()> {
        let finite = match self {
            SpacePoint::Real1(x) => x.is_finite(),
            SpacePoint::RealN(p) => p.coords().iter().all(|c| c.is_finite()),
            SpacePoint::Affine { a, b } => {
                if !(a.is_finite() && b.is_finite()) {
                    false
                } else if *b <= 0.0 {
                    return Err(Error::Domain(format!("affine point needs b > 0, got b = {b}")));
                } else {
                    true
                }
            }
        };
        if finite {
            Ok(())
        } else {
            Err(Error::Domain(format!("non-finite coordinate in {self}")))
        }
    }

    /// Coordinates in the order used by the text encoding.
    pub fn coords(&self) -> Vec<f64> {
        match self {
            SpacePoint::Real1(x) => vec![*x],
            SpacePoint::RealN(p) => p.coords().to_vec(),
            SpacePoint::Affine { a, b } => vec![*a, *b],
        }
    }
}

impl fmt::Display for SpacePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords().iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    RealLine,
    Euclidean(usize),
    AffineLeft,
    AffineRight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    Lebesgue,
    LeftHaar,
    RightHaar,
}

/// A metric measure space. Instances are immutable and cheap to copy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceInstance {
    kind: SpaceKind,
}

/// A metric ball `B_{x,r}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallSpec {
    pub center: SpacePoint,
    pub radius: f64,
}

impl BallSpec {
    pub fn new(center: SpacePoint, radius: f64) -> Result<Self> {
        center.validate()?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("ball radius must be positive and finite, got {radius}")));
        }
        Ok(Self { center, radius })
    }
}

fn unit_ball_volume(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => PI,
        _ => 4.0 * PI / 3.0,
    }
}

impl SpaceInstance {
    pub fn real_line() -> Self {
        Self {
            kind: SpaceKind::RealLine,
        }
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Domain(format!("euclidean dimension must be 1..=3, got {dim}")));
        }
        Ok(Self {
            kind: SpaceKind::Euclidean(dim),
        })
    }

    pub fn affine_left() -> Self {
        Self {
            kind: SpaceKind::AffineLeft,
        }
    }

    pub fn affine_right() -> Self {
        Self {
            kind: SpaceKind::AffineRight,
        }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    /// Topological dimension.
    pub fn dim(&self) -> usize {
        match self.kind {
            SpaceKind::RealLine => 1,
            SpaceKind::Euclidean(n) => n,
            SpaceKind::AffineLeft | SpaceKind::AffineRight => 2,
        }
    }

    pub fn measure_kind(&self) -> MeasureKind {
        match self.kind {
            SpaceKind::RealLine | SpaceKind::Euclidean(_) => MeasureKind::Lebesgue,
            SpaceKind::AffineLeft => MeasureKind::LeftHaar,
            SpaceKind::AffineRight => MeasureKind::RightHaar,
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self.kind, SpaceKind::AffineLeft | SpaceKind::AffineRight)
    }

    /// Every kind except `real-line` is presented as a group; the real line is
    /// still translated as ℝ¹ by [`SpaceInstance::translate`].
    pub fn is_group(&self) -> bool {
        !matches!(self.kind, SpaceKind::RealLine)
    }

    pub fn is_unimodular(&self) -> bool {
        !self.is_affine()
    }

    /// Identity element; the real line uses `0`.
    pub fn identity(&self) -> Option<SpacePoint> {
        Some(match self.kind {
            SpaceKind::RealLine => SpacePoint::Real1(0.0),
            SpaceKind::Euclidean(n) => SpacePoint::RealN(EuclideanPoint {
                coords: [0.0; 3],
                dim: n,
            }),
            SpaceKind::AffineLeft | SpaceKind::AffineRight => SpacePoint::Affine { a: 0.0, b: 1.0 },
        })
    }

    pub fn descriptor(&self) -> String {
        match self.kind {
            SpaceKind::RealLine => "real-line".into(),
            SpaceKind::Euclidean(n) => format!("euclidean:{n}"),
            SpaceKind::AffineLeft => "affine-left".into(),
            SpaceKind::AffineRight => "affine-right".into(),
        }
    }

    /// Validates that `x` is a well-formed point of this space.
    pub fn check_point(&self, x: &SpacePoint) -> Result<()> {
        let ok = match (self.kind, x) {
            (SpaceKind::RealLine, SpacePoint::Real1(_)) => true,
            (SpaceKind::Euclidean(n), SpacePoint::RealN(p)) => p.dim == n,
            (SpaceKind::AffineLeft | SpaceKind::AffineRight, SpacePoint::Affine { .. }) => true,
            _ => false,
        };
        if !ok {
            return Err(Error::Usage(format!(
                "point `{x}` does not belong to space `{}`",
                self.descriptor()
            )));
        }
        x.validate()
    }

    /// Parses the comma-separated point encoding, e.g. `0.5,2.0`. The token
    /// `e` denotes the identity.
    pub fn parse_point(&self, text: &str) -> Result<SpacePoint> {
        let text = text.trim();
        if text == "e" {
            return Ok(self.identity().expect("every kind has an identity"));
        }
        let values: Vec<f64> = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(text, format!("`{}` is not a number", t.trim())))
            })
            .collect::<Result<_>>()?;
        let point = match self.kind {
            SpaceKind::RealLine if values.len() == 1 => SpacePoint::Real1(values[0]),
            SpaceKind::Euclidean(n) if values.len() == n => SpacePoint::RealN(EuclideanPoint::new(&values)?),
            SpaceKind::AffineLeft | SpaceKind::AffineRight if values.len() == 2 => SpacePoint::Affine {
                a: values[0],
                b: values[1],
            },
            _ => {
                return Err(Error::parse(
                    text,
                    format!("wrong number of coordinates for `{}`", self.descriptor()),
                ))
            }
        };
        point.validate().map_err(|e| Error::parse(text, e.to_string()))?;
        Ok(point)
    }

    /// Distance without variant checks; callers guarantee matching points.
    #[inline]
    pub(crate) fn dist(&self, x: &SpacePoint, y: &SpacePoint) -> f64 {
        match (x, y) {
            (SpacePoint::Real1(p), SpacePoint::Real1(q)) => (p - q).abs(),
            (SpacePoint::RealN(p), SpacePoint::RealN(q)) => {
                let mut s = 0.0;
                for i in 0..p.dim {
                    let d = p.coords[i] - q.coords[i];
                    s += d * d;
                }
                s.sqrt()
            }
            (SpacePoint::Affine { a: a1, b: b1 }, SpacePoint::Affine { a: a2, b: b2 }) => {
                hyperbolic::distance(*a1, *b1, *a2, *b2)
            }
            _ => f64::NAN,
        }
    }

    pub fn distance(&self, x: &SpacePoint, y: &SpacePoint) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        if x == y {
            return Ok(0.0);
        }
        Ok(self.dist(x, y))
    }

    /// Left translation `x ↦ g·x`.
    pub fn translate(&self, g: &SpacePoint, x: &SpacePoint) -> Result<SpacePoint> {
        self.check_point(g)?;
        self.check_point(x)?;
        Ok(self.mul(g, x))
    }

    #[inline]
    pub(crate) fn mul(&self, g: &SpacePoint, x: &SpacePoint) -> SpacePoint {
        match (g, x) {
            (SpacePoint::Real1(p), SpacePoint::Real1(q)) => SpacePoint::Real1(p + q),
            (SpacePoint::RealN(p), SpacePoint::RealN(q)) => {
                let mut out = *q;
                for i in 0..q.dim {
                    out.coords[i] += p.coords[i];
                }
                SpacePoint::RealN(out)
            }
            (SpacePoint::Affine { a: ga, b: gb }, SpacePoint::Affine { a, b }) => {
                let (na, nb) = hyperbolic::compose(*ga, *gb, *a, *b);
                SpacePoint::Affine { a: na, b: nb }
            }
            _ => unreachable!("variant mismatch in group product"),
        }
    }

    pub fn inverse(&self, g: &SpacePoint) -> Result<SpacePoint> {
        self.check_point(g)?;
        Ok(match g {
            SpacePoint::Real1(p) => SpacePoint::Real1(-p),
            SpacePoint::RealN(p) => {
                let mut out = *p;
                for c in out.coords.iter_mut() {
                    *c = -*c;
                }
                SpacePoint::RealN(out)
            }
            SpacePoint::Affine { a, b } => {
                let (ia, ib) = hyperbolic::inverse(*a, *b);
                SpacePoint::Affine { a: ia, b: ib }
            }
        })
    }

    /// Measure of a ball about the identity; every kind has `μ(B_{x,r}) = scale(x)·V(r)`.
    #[inline]
    pub(crate) fn unit_volume(&self, r: f64) -> f64 {
        match self.kind {
            SpaceKind::RealLine => 2.0 * r,
            SpaceKind::Euclidean(n) => unit_ball_volume(n) * r.powi(n as i32),
            SpaceKind::AffineLeft | SpaceKind::AffineRight => hyperbolic::disk_area(r),
        }
    }

    /// Center dependence of ball measures: `Δ(x⁻¹) = b` for the right Haar measure, else 1.
    #[inline]
    pub(crate) fn volume_scale(&self, x: &SpacePoint) -> f64 {
        match (self.kind, x) {
            (SpaceKind::AffineRight, SpacePoint::Affine { b, .. }) => *b,
            _ => 1.0,
        }
    }

    #[inline]
    pub(crate) fn volume(&self, x: &SpacePoint, r: f64) -> f64 {
        self.volume_scale(x) * self.unit_volume(r)
    }

    /// `μ(B_{x,r})`.
    pub fn ball_volume(&self, x: &SpacePoint, r: f64) -> Result<f64> {
        self.check_point(x)?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("radius must be positive and finite, got {r}")));
        }
        Ok(self.volume(x, r))
    }

    /// Modular function `Δ`; identically 1 on the unimodular kinds.
    pub fn modular(&self, x: &SpacePoint) -> Result<f64> {
        self.check_point(x)?;
        Ok(match x {
            SpacePoint::Affine { b, .. } => 1.0 / b,
            _ => 1.0,
        })
    }

    /// Euclidean disk `(center, radius)` whose upper-half-plane part is `B_{x,r}`.
    pub fn ball_shadow(&self, x: &SpacePoint, r: f64) -> Result<(SpacePoint, f64)> {
        if !self.is_affine() {
            return Err(Error::Usage(format!(
                "ball shadows exist only on the affine kinds, not on `{}`",
                self.descriptor()
            )));
        }
        self.check_point(x)?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("radius must be positive and finite, got {r}")));
        }
        let SpacePoint::Affine { a, b } = *x else { unreachable!() };
        let ((ca, cb), rad) = hyperbolic::shadow(a, b, r);
        Ok((SpacePoint::Affine { a: ca, b: cb }, rad))
    }
}

impl FromStr for SpaceInstance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "real-line" => Ok(Self::real_line()),
            "affine-left" => Ok(Self::affine_left()),
            "affine-right" => Ok(Self::affine_right()),
            _ => {
                if let Some(n) = s.strip_prefix("euclidean:") {
                    let n: usize = n
                        .parse()
                        .map_err(|_| Error::parse(s, "dimension must be an integer"))?;
                    Self::euclidean(n).map_err(|e| Error::parse(s, e.to_string()))
                } else {
                    Err(Error::parse(
                        s,
                        "expected real-line, euclidean:<dim>, affine-left or affine-right",
                    ))
                }
            }
        }
    }
}

impl fmt::Display for SpaceInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aff(a: f64, b: f64) -> SpacePoint {
        SpacePoint::affine(a, b).unwrap()
    }

    #[test]
    fn descriptor_round_trip() {
        for d in ["real-line", "euclidean:1", "euclidean:3", "affine-left", "affine-right"] {
            let s: SpaceInstance = d.parse().unwrap();
            assert_eq!(s.descriptor(), d);
        }
        assert!("euclidean:4".parse::<SpaceInstance>().is_err());
        assert!("sphere".parse::<SpaceInstance>().is_err());
    }

    #[test]
    fn distance_examples() {
        let line = SpaceInstance::real_line();
        let d = line.distance(&SpacePoint::Real1(-1.0), &SpacePoint::Real1(3.0)).unwrap();
        assert_eq!(d, 4.0);
        let h = SpaceInstance::affine_left();
        assert_eq!(h.distance(&aff(0.3, 2.0), &aff(0.3, 2.0)).unwrap(), 0.0);
        let d = h.distance(&aff(0.0, 1.0), &aff(0.0, std::f64::consts::E)).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distance_rejects_bad_input() {
        let h = SpaceInstance::affine_left();
        assert!(matches!(
            h.distance(&SpacePoint::Real1(0.0), &aff(0.0, 1.0)),
            Err(Error::Usage(_))
        ));
        let bad = SpacePoint::Affine { a: 0.0, b: -1.0 };
        assert!(matches!(h.distance(&bad, &aff(0.0, 1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn translate_examples() {
        let e2 = SpaceInstance::euclidean(2).unwrap();
        let g = SpacePoint::euclidean(&[1.0, 2.0]).unwrap();
        let x = SpacePoint::euclidean(&[3.0, 4.0]).unwrap();
        assert_eq!(e2.translate(&g, &x).unwrap(), SpacePoint::euclidean(&[4.0, 6.0]).unwrap());

        let h = SpaceInstance::affine_left();
        assert_eq!(h.translate(&aff(0.0, 1.0), &aff(3.0, 4.0)).unwrap(), aff(3.0, 4.0));
        // t ↦ 2t+1 after t ↦ 4t+3 is t ↦ 8t+7
        assert_eq!(h.translate(&aff(1.0, 2.0), &aff(3.0, 4.0)).unwrap(), aff(7.0, 8.0));
    }

    #[test]
    fn ball_volume_examples() {
        let line = SpaceInstance::real_line();
        assert_eq!(line.ball_volume(&SpacePoint::Real1(5.0), 1.0).unwrap(), 2.0);
        let e2 = SpaceInstance::euclidean(2).unwrap();
        let v = e2.ball_volume(&e2.identity().unwrap(), 1.0).unwrap();
        assert!((v - PI).abs() < 1e-15);
        let h = SpaceInstance::affine_left();
        let v = h.ball_volume(&aff(0.0, 1.0), 1.0).unwrap();
        assert!((v - 2.0 * PI * (1f64.cosh() - 1.0)).abs() < 1e-12);
        assert!((v - 3.4123).abs() < 1e-4);
        assert!(matches!(h.ball_volume(&aff(0.0, 1.0), 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn right_haar_ball_volume_carries_modular_factor() {
        let rh = SpaceInstance::affine_right();
        let e = rh.identity().unwrap();
        for &(a, b) in &[(0.0, 2.0), (-1.5, 0.25), (3.0, 7.0)] {
            let x = aff(a, b);
            let inv = rh.inverse(&x).unwrap();
            for &r in &[0.1, 1.0, 3.0] {
                let lhs = rh.ball_volume(&x, r).unwrap();
                let rhs = rh.modular(&inv).unwrap() * rh.ball_volume(&e, r).unwrap();
                assert!((lhs - rhs).abs() <= 1e-12 * rhs);
            }
        }
    }

    #[test]
    fn modular_examples() {
        let e3 = SpaceInstance::euclidean(3).unwrap();
        let p = SpacePoint::euclidean(&[1.0, -2.0, 0.5]).unwrap();
        assert_eq!(e3.modular(&p).unwrap(), 1.0);
        let h = SpaceInstance::affine_left();
        assert_eq!(h.modular(&aff(0.0, 1.0)).unwrap(), 1.0);
        assert_eq!(h.modular(&aff(0.0, 2.0)).unwrap(), 0.5);
    }

    #[test]
    fn shadow_examples() {
        let h = SpaceInstance::affine_left();
        let (c, rad) = h.ball_shadow(&aff(0.0, 1.0), 1.0).unwrap();
        assert_eq!(c, aff(0.0, 1f64.cosh()));
        assert!((rad - 1.1752).abs() < 1e-4);
        let (c, rad) = h.ball_shadow(&aff(2.0, 3.0), 1.0).unwrap();
        assert!((rad - 3.0 * 1f64.sinh()).abs() < 1e-14);
        assert_eq!(c, aff(2.0, 3.0 * 1f64.cosh()));
        let (c, rad) = h.ball_shadow(&aff(0.0, 1.0), 1e-9).unwrap();
        assert!(rad < 1e-8);
        assert!((h.dist(&c, &aff(0.0, 1.0))) < 1e-8);
        assert!(matches!(
            SpaceInstance::real_line().ball_shadow(&SpacePoint::Real1(0.0), 1.0),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn point_parsing() {
        let h = SpaceInstance::affine_left();
        assert_eq!(h.parse_point("0.5,2.0").unwrap(), aff(0.5, 2.0));
        assert_eq!(h.parse_point("e").unwrap(), aff(0.0, 1.0));
        assert!(matches!(h.parse_point("0.5,-2"), Err(Error::Parse { .. })));
        assert!(matches!(h.parse_point("0.5"), Err(Error::Parse { .. })));
        let e2 = SpaceInstance::euclidean(2).unwrap();
        assert!(e2.parse_point("1,x").is_err());
    }
}
