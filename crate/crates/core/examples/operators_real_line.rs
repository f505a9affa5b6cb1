//! Averages, the maximal function and integral-functions on the real line.

use hlmax::catalog::{make_function, make_weight};
use hlmax::operators::{average, integral_function, maximal, maximal_radius, PExponent};
use hlmax::quadrature::QuadratureConfig;
use hlmax::spaces::{SpaceInstance, SpacePoint};

fn main() -> hlmax::Result<()> {
    let cfg = QuadratureConfig::default();
    let line = SpaceInstance::real_line();
    let f = make_function(&line, "indicator-ball:0:1")?;
    let w = make_weight("exp")?;
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "x", "A(x,1)", "Mf", "I_1", "I_4");
    for x in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let x = SpacePoint::Real1(x);
        let a = average(&line, &f, &x, 1.0, &cfg)?;
        let m = maximal(&line, &f, &x, &cfg)?;
        let i1 = integral_function(&line, &f, &w, PExponent::new(1.0)?, &x, &cfg)?;
        let i4 = integral_function(&line, &f, &w, PExponent::new(4.0)?, &x, &cfg)?;
        println!("{:>5} {:>10.6} {:>10.6} {:>10.6} {:>10.6}", x.to_string(), a.value, m.value, i1.value, i4.value);
    }
    let (m, r) = maximal_radius(&line, &f, &SpacePoint::Real1(2.0), &cfg)?;
    println!("at x = 2 the best radius is {r:.6} with average {:.6}", m.value);
    Ok(())
}
