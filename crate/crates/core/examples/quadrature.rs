//! Adaptive quadrature with error bounds, and Monte Carlo ball integrals.

use hlmax::catalog::make_function;
use hlmax::quadrature::{integrate, integrate_segments, mc_integrate_ball, QuadratureConfig};
use hlmax::spaces::{SpaceInstance, SpacePoint};

fn main() -> hlmax::Result<()> {
    let cfg = QuadratureConfig::default();
    let e = integrate(|t| (-t * t).exp(), 0.0, 6.0, &cfg)?;
    println!("∫_0^6 e^(-t²) dt = {:.15} ± {:.1e} ({} evaluations)", e.value, e.error_bound, e.samples_used);
    println!("                 √π/2 = {:.15}", std::f64::consts::PI.sqrt() / 2.0);

    let kinked = integrate_segments(|t: f64| (t - 1.0).abs().sqrt(), &[0.0, 1.0, 3.0], &cfg)?;
    println!("∫_0^3 √|t-1| dt = {:.12} ± {:.1e}, exact {:.12}", kinked.value, kinked.error_bound, (2.0 + 2.0 * 2f64.powf(1.5)) / 3.0);

    let h = SpaceInstance::affine_left();
    let f = make_function(&h, "bump:e:1")?;
    for seed in [1, 2, 3] {
        let cfg = QuadratureConfig { mc_samples: 50_000, ..QuadratureConfig::with_seed(seed) };
        let m = mc_integrate_ball(&h, &f, &SpacePoint::affine(0.2, 1.1)?, 1.5, &cfg)?;
        println!("seed {seed}: ∫_B f dλ ≈ {:.5} (σ = {:.1e})", m.value, m.std_error);
    }
    Ok(())
}
