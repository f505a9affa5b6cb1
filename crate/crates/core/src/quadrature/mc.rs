use rayon::prelude::*;

use super::{Estimate, QuadratureConfig};
use crate::catalog::TestFunction;
use crate::error::{Error, Result};
use crate::spaces::{label_hash, stream, substream, SpaceInstance, SpacePoint};

const CHUNK: u64 = 4096;

/// Monte Carlo estimate of `∫_{B_{x,r}} f dμ` with `cfg.mc_samples` draws.
///
/// Samples come from the exact geodesic-polar sampler on the affine kinds
/// and from uniform points of the Euclidean ball otherwise. The reported
/// `error_bound` is three standard errors.
pub fn mc_integrate_ball(
    space: &SpaceInstance,
    f: &TestFunction,
    x: &SpacePoint,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    space.check_point(x)?;
    f.check_space(space)?;
    mc_ball_with(space, |y| f.eval(y), x, r, cfg.mc_samples, substream(cfg.master_seed, label_hash("mc-ball")))
}

pub(crate) fn mc_ball_with<F>(space: &SpaceInstance, h: F, x: &SpacePoint, r: f64, samples: u64, seed: u64) -> Result<Estimate>
where
    F: Fn(&SpacePoint) -> f64 + Sync,
{
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius must be positive and finite, got {r}")));
    }
    if samples == 0 {
        return Err(Error::Usage("Monte Carlo integration needs at least one sample".into()));
    }
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, c);
            let n = CHUNK.min(samples - c * CHUNK);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let reference = space.draw_ref(&mut rng);
                let (y, weight) = space.realize(x, r, &reference);
                let v = weight * h(&y);
                s1 += v;
                s2 += v * v;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = partial.iter().fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let n = samples as f64;
    let mean = s1 / n;
    if !mean.is_finite() {
        return Err(Error::Numeric("non-finite Monte Carlo mean".into()));
    }
    let var = if samples > 1 {
        ((s2 - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let vol = space.volume(x, r);
    Ok(Estimate::monte_carlo(vol * mean, vol * (var / n).sqrt(), samples))
}
