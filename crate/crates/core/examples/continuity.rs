//! Oscillation of an integral-function over shrinking neighborhoods.

use hlmax::catalog::{make_function, make_weight};
use hlmax::operators::PExponent;
use hlmax::quadrature::QuadratureConfig;
use hlmax::spaces::{SpaceInstance, SpacePoint};
use hlmax::verify::{check_continuity, standard_radii};

fn main() -> hlmax::Result<()> {
    let cfg = QuadratureConfig::default();
    let line = SpaceInstance::real_line();
    let f = make_function(&line, "indicator-ball:0:1")?;
    let w = make_weight("exp")?;
    let report = check_continuity(&line, &f, &w, PExponent::new(2.0)?, &SpacePoint::Real1(1.0), &standard_radii(), &cfg);
    println!("{}: {}", report.name, report.status);
    println!("{}", serde_json::to_string_pretty(&report.details).expect("details are JSON"));
    Ok(())
}
