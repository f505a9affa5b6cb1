//! Radius-weights, their masses, and the modular correction on the affine group.

use hlmax::catalog::{adaptive_weight, g_norm, make_weight, modular_ball_factor};
use hlmax::quadrature::QuadratureConfig;
use hlmax::spaces::SpaceInstance;

fn main() -> hlmax::Result<()> {
    let cfg = QuadratureConfig::default();
    let h = SpaceInstance::affine_left();
    for spec in ["exp", "gauss", "uniform:2"] {
        let w = make_weight(spec)?;
        let mass = w.total_mass(&cfg)?;
        let g = g_norm(&h, &w, &cfg)?;
        println!("{spec:<10} ‖w‖ = {:.8}  ‖w‖_G = {:.6} ± {:.1e}", mass.value, g.value, g.error_bound);
    }
    for r in [0.5, 1.0, 2.0, 4.0] {
        let m = modular_ball_factor(&h, r, &cfg)?;
        println!("mean of Δ(y⁻¹) over B(e,{r}) = {:.5} ± {:.1e}", m.value, m.error_bound);
    }
    let w = adaptive_weight(&h, &cfg)?;
    println!("{} has mass {:.6}", w.descriptor(), w.total_mass(&cfg)?.value);
    Ok(())
}
