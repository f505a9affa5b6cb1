//! Norm bounds for integral-functions and averages on the affine group.

use hlmax::catalog::{make_function, make_weight};
use hlmax::operators::PExponent;
use hlmax::quadrature::QuadratureConfig;
use hlmax::spaces::SpaceInstance;
use hlmax::verify::{check_global_bound, check_radius_bound};

fn main() -> hlmax::Result<()> {
    let cfg = QuadratureConfig { mc_samples: 50_000, ..QuadratureConfig::with_seed(3) };
    let w = make_weight("gauss")?;
    for space in [SpaceInstance::affine_left(), SpaceInstance::affine_right()] {
        let f = make_function(&space, "indicator-ball:e:1")?;
        let r = check_global_bound(&space, &f, &w, PExponent::new(1.0)?, PExponent::new(2.0)?, &cfg)?;
        println!("{:<64} {:<6} {:.5} <= {:.5} (slack {:.5})", r.name, r.status, r.lhs, r.rhs, r.slack);
        let r = check_radius_bound(&space, &f, &[0.5, 1.0], &[PExponent::new(1.0)?], &cfg);
        println!("{:<64} {:<6} {:.5} <= {:.5} (slack {:.5})", r.name, r.status, r.lhs, r.rhs, r.slack);
    }
    Ok(())
}
