//! Seeded random streams and ball samplers.
//!
//! Every Monte Carlo consumer derives its generator from a master seed and a
//! task index through [`substream`], so results never depend on how work is
//! scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hyperbolic;
use super::{EuclideanPoint, SpaceInstance, SpaceKind, SpacePoint};

pub type Stream = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable hash of `(master, index)` used as the seed of an independent substream.
#[inline]
pub fn substream(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Stable 64-bit hash of a label (FNV-1a), for naming substreams.
pub fn label_hash(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in label.bytes() {
        h ^= byte as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub fn stream(master: u64, index: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(substream(master, index))
}

/// Which construction [`SpaceInstance::sample_ball_with`] uses on the affine kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallSampler {
    /// Uniform on the Euclidean shadow disk, reweighted by the Haar density.
    ShadowDisk,
    /// Exact left-Haar-uniform sampling in geodesic polar coordinates.
    GeodesicPolar,
}

/// A center- and radius-free random reference used with common random
/// numbers: the same reference realized at `(x, r)` moves continuously with
/// both arguments.
#[derive(Debug, Clone, Copy)]
pub(crate) enum BallRef {
    /// Point of the closed unit ball of ℝⁿ.
    Unit([f64; 3]),
    /// Area fraction `u ∈ [0,1)` and angle of a hyperbolic polar sample.
    Polar { u: f64, theta: f64 },
}

pub(crate) fn unit_ball_point<R: Rng>(dim: usize, rng: &mut R) -> [f64; 3] {
    loop {
        let mut c = [0.0; 3];
        let mut n2 = 0.0;
        for v in c.iter_mut().take(dim) {
            *v = 2.0 * rng.random::<f64>() - 1.0;
            n2 += *v * *v;
        }
        if n2 < 1.0 {
            return c;
        }
    }
}

/// Uniform direction on the unit sphere `S^{dim-1}`.
pub(crate) fn unit_direction<R: Rng>(dim: usize, rng: &mut R) -> [f64; 3] {
    match dim {
        1 => [if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0, 0.0],
        2 => {
            let t = std::f64::consts::TAU * rng.random::<f64>();
            [t.cos(), t.sin(), 0.0]
        }
        _ => {
            let z = 2.0 * rng.random::<f64>() - 1.0;
            let phi = std::f64::consts::TAU * rng.random::<f64>();
            let s = (1.0 - z * z).max(0.0).sqrt();
            [s * phi.cos(), s * phi.sin(), z]
        }
    }
}

impl SpaceInstance {
    pub(crate) fn draw_ref<R: Rng>(&self, rng: &mut R) -> BallRef {
        match self.kind {
            SpaceKind::RealLine => BallRef::Unit(unit_ball_point(1, rng)),
            SpaceKind::Euclidean(n) => BallRef::Unit(unit_ball_point(n, rng)),
            SpaceKind::AffineLeft | SpaceKind::AffineRight => BallRef::Polar {
                u: rng.random::<f64>(),
                theta: std::f64::consts::TAU * rng.random::<f64>(),
            },
        }
    }

    /// Realize a reference inside `B_{x,r}`. The returned weight `ω` satisfies
    /// `E[ω h(y)] = (1/μ(B_{x,r})) ∫_{B_{x,r}} h dμ`.
    #[inline]
    pub(crate) fn realize(&self, x: &SpacePoint, r: f64, reference: &BallRef) -> (SpacePoint, f64) {
        match (reference, x) {
            (BallRef::Unit(u), SpacePoint::Real1(c)) => (SpacePoint::Real1(c + r * u[0]), 1.0),
            (BallRef::Unit(u), SpacePoint::RealN(p)) => {
                let mut out = *p;
                for i in 0..p.dim {
                    out.coords[i] += r * u[i];
                }
                (SpacePoint::RealN(out), 1.0)
            }
            (BallRef::Polar { u, theta }, SpacePoint::Affine { a, b }) => {
                let ch = 1.0 + u * hyperbolic::cosh_m1(r);
                let (ya, yb) = hyperbolic::polar_from_cosh(ch, *theta);
                let (pa, pb) = hyperbolic::compose(*a, *b, ya, yb);
                let weight = if self.kind == SpaceKind::AffineRight { yb } else { 1.0 };
                (SpacePoint::Affine { a: pa, b: pb }, weight)
            }
            _ => unreachable!("reference/point variant mismatch"),
        }
    }

    /// Draw a point of `B_{x,r}` with an importance weight whose mean is one
    /// (see [`SpaceInstance::realize`]). Affine kinds use the shadow-disk sampler.
    pub fn sample_ball<R: Rng>(&self, x: &SpacePoint, r: f64, rng: &mut R) -> (SpacePoint, f64) {
        self.sample_ball_with(BallSampler::ShadowDisk, x, r, rng)
    }

    pub fn sample_ball_with<R: Rng>(
        &self,
        sampler: BallSampler,
        x: &SpacePoint,
        r: f64,
        rng: &mut R,
    ) -> (SpacePoint, f64) {
        match (self.kind, x) {
            (SpaceKind::AffineLeft | SpaceKind::AffineRight, SpacePoint::Affine { a, b })
                if sampler == BallSampler::ShadowDisk =>
            {
                let ((ca, cb), rad) = hyperbolic::shadow(*a, *b, r);
                let s = rng.random::<f64>().sqrt();
                let phi = std::f64::consts::TAU * rng.random::<f64>();
                let pa = ca + rad * s * phi.cos();
                let pb = cb + rad * s * phi.sin();
                let density = if self.kind == SpaceKind::AffineLeft {
                    1.0 / (pb * pb)
                } else {
                    1.0 / pb
                };
                let disk = std::f64::consts::PI * rad * rad;
                let weight = density * disk / self.volume(x, r);
                (SpacePoint::Affine { a: pa, b: pb }, weight)
            }
            _ => {
                let reference = self.draw_ref(rng);
                self.realize(x, r, &reference)
            }
        }
    }

    /// Point at geodesic distance `rho` from `anchor` along a direction drawn
    /// from `rng`. Directions are uniform for the isotropy group at `anchor`.
    pub(crate) fn polar_point<R: Rng>(&self, anchor: &SpacePoint, rho: f64, rng: &mut R) -> SpacePoint {
        match anchor {
            SpacePoint::Real1(c) => {
                let d = unit_direction(1, rng);
                SpacePoint::Real1(c + rho * d[0])
            }
            SpacePoint::RealN(p) => {
                let d = unit_direction(p.dim, rng);
                let mut out: EuclideanPoint = *p;
                for i in 0..p.dim {
                    out.coords[i] += rho * d[i];
                }
                SpacePoint::RealN(out)
            }
            SpacePoint::Affine { a, b } => {
                let theta = std::f64::consts::TAU * rng.random::<f64>();
                let (ya, yb) = hyperbolic::polar_from_identity(rho, theta);
                let (pa, pb) = hyperbolic::compose(*a, *b, ya, yb);
                SpacePoint::Affine { a: pa, b: pb }
            }
        }
    }

    /// Surface measure of the geodesic sphere of radius `rho` about the
    /// identity (left-invariant measures), i.e. `dμ = shell(ρ) dρ dσ` with
    /// `σ` the normalized direction measure.
    pub(crate) fn shell(&self, rho: f64) -> f64 {
        use std::f64::consts::PI;
        match self.kind {
            SpaceKind::RealLine => 2.0,
            SpaceKind::Euclidean(1) => 2.0,
            SpaceKind::Euclidean(2) => 2.0 * PI * rho,
            SpaceKind::Euclidean(_) => 4.0 * PI * rho * rho,
            SpaceKind::AffineLeft | SpaceKind::AffineRight => 2.0 * PI * rho.sinh(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substreams_are_stable_and_distinct() {
        assert_eq!(substream(7, 3), substream(7, 3));
        assert_ne!(substream(7, 3), substream(7, 4));
        assert_ne!(substream(7, 3), substream(8, 3));
    }

    #[test]
    fn identical_seed_gives_identical_samples() {
        let space: SpaceInstance = "affine-left".parse().unwrap();
        let x = space.identity().unwrap();
        let mut r1 = stream(11, 0);
        let mut r2 = stream(11, 0);
        for _ in 0..100 {
            let a = space.sample_ball(&x, 1.0, &mut r1);
            let b = space.sample_ball(&x, 1.0, &mut r2);
            assert_eq!(a.0, b.0);
            assert_eq!(a.1.to_bits(), b.1.to_bits());
        }
    }
}
