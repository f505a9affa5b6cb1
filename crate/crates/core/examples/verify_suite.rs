//! Runs the Euclidean verification suite and prints one line per check.

use hlmax::quadrature::QuadratureConfig;
use hlmax::verify::{run_suite, Suite};

fn main() -> hlmax::Result<()> {
    let reports = run_suite(Suite::Euclidean, &QuadratureConfig::with_seed(7))?;
    for r in &reports {
        println!("{:<12} {}", r.status, r.name);
    }
    println!("{} checks", reports.len());
    Ok(())
}
