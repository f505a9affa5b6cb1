//! Hardy–Littlewood averaging, maximal and integral-functions on metric
//! measure spaces: the real line, Euclidean ℝⁿ and the affine group `ax + b`
//! with its left or right Haar measure.
//!
//! ```
//! use hlmax::{catalog, operators, quadrature::QuadratureConfig, spaces::SpaceInstance};
//!
//! let line = SpaceInstance::real_line();
//! let f = catalog::make_function(&line, "indicator-ball:0:1").unwrap();
//! let x = line.parse_point("2").unwrap();
//! let m = operators::maximal(&line, &f, &x, &QuadratureConfig::default()).unwrap();
//! assert!((m.value - 1.0 / 3.0).abs() < 1e-4);
//! ```

pub mod catalog;
pub mod cli;
pub mod error;
pub mod operators;
pub mod quadrature;
pub mod spaces;
pub mod verify;

pub use error::{Error, Result};
