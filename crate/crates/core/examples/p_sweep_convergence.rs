//! Normalized integral-functions climb toward the maximal function as p grows.

use hlmax::catalog::{make_function, make_weight};
use hlmax::operators::p_sweep;
use hlmax::quadrature::QuadratureConfig;
use hlmax::spaces::{SpaceInstance, SpacePoint};
use hlmax::verify::standard_exponents;

fn main() -> hlmax::Result<()> {
    let cfg = QuadratureConfig::default();
    let line = SpaceInstance::real_line();
    let f = make_function(&line, "indicator-ball:0:1")?;
    for spec in ["exp", "gauss"] {
        let w = make_weight(spec)?;
        println!("weight {spec}, x = 2");
        for row in p_sweep(&line, &f, &w, &SpacePoint::Real1(2.0), &standard_exponents(), &cfg)? {
            println!("  p = {:<4} normalized = {:.6}  gap to Mf = {:.6}", row.p, row.normalized, row.gap_to_max);
        }
    }
    Ok(())
}
