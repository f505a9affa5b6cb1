//! Numerical integration: adaptive Gauss–Kronrod over radii, seeded Monte
//! Carlo over metric balls, and truncation of radial integrals on `(0, ∞)`.

pub mod adaptive;
mod mc;
mod truncation;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use adaptive::{integrate, integrate_radial, integrate_segments};
pub use mc::mc_integrate_ball;
pub use truncation::truncation_radius;

/// Numerical control parameters shared by every engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: usize,
    pub mc_samples: u64,
    pub master_seed: u64,
    pub tail_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_depth: 40,
            mc_samples: 100_000,
            master_seed: 42,
            tail_tol: 1e-10,
        }
    }
}

impl QuadratureConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            master_seed: seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol), ("tail_tol", self.tail_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.mc_samples < 1000 {
            return Err(Error::Config(format!("mc_samples must be at least 1000, got {}", self.mc_samples)));
        }
        if self.max_depth < 10 {
            return Err(Error::Config(format!("max_depth must be at least 10, got {}", self.max_depth)));
        }
        Ok(())
    }

    /// Short stable fingerprint of every field, used to tag reports.
    pub fn digest(&self) -> String {
        let text = format!(
            "{:016x}{:016x}{}{}{}{:016x}",
            self.rel_tol.to_bits(),
            self.abs_tol.to_bits(),
            self.max_depth,
            self.mc_samples,
            self.master_seed,
            self.tail_tol.to_bits()
        );
        format!("{:016x}", crate::spaces::label_hash(&text))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateKind {
    Deterministic,
    MonteCarlo,
}

impl fmt::Display for EstimateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimateKind::Deterministic => "deterministic",
            EstimateKind::MonteCarlo => "monte-carlo",
        })
    }
}

/// A numerical value with an error bar.
///
/// Deterministic estimates carry an a-posteriori quadrature bound. Monte
/// Carlo estimates carry a standard error and report `3·std_error` (plus any
/// deterministic contribution) as `error_bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error_bound: f64,
    pub kind: EstimateKind,
    pub samples_used: u64,
    /// Zero for deterministic estimates.
    pub std_error: f64,
    /// False when adaptive refinement ran out of depth.
    pub converged: bool,
    /// Set when the value is only a lower bound of the target (maxima over grids).
    pub lower_bound: bool,
}

impl Estimate {
    pub fn deterministic(value: f64, error_bound: f64, evaluations: u64) -> Self {
        Self {
            value,
            error_bound: error_bound.abs(),
            kind: EstimateKind::Deterministic,
            samples_used: evaluations,
            std_error: 0.0,
            converged: true,
            lower_bound: false,
        }
    }

    pub fn exact(value: f64) -> Self {
        Self::deterministic(value, 0.0, 0)
    }

    pub fn monte_carlo(value: f64, std_error: f64, samples: u64) -> Self {
        Self {
            value,
            error_bound: 3.0 * std_error,
            kind: EstimateKind::MonteCarlo,
            samples_used: samples,
            std_error,
            converged: true,
            lower_bound: false,
        }
    }

    pub fn is_monte_carlo(&self) -> bool {
        self.kind == EstimateKind::MonteCarlo
    }

    /// Multiplies value and error by a nonnegative constant.
    pub fn scaled(mut self, c: f64) -> Self {
        self.value *= c;
        self.error_bound *= c.abs();
        self.std_error *= c.abs();
        self
    }

    /// Adds a deterministic error contribution.
    pub(crate) fn widen(mut self, extra: f64) -> Self {
        self.error_bound += extra.abs();
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        QuadratureConfig::default().validate().unwrap();
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = QuadratureConfig::default();
        c.mc_samples = 10;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = QuadratureConfig::default();
        c.rel_tol = 0.0;
        assert!(c.validate().is_err());
        let mut c = QuadratureConfig::default();
        c.max_depth = 3;
        assert!(c.validate().is_err());
    }

    #[test]
    fn digest_tracks_fields() {
        let a = QuadratureConfig::default();
        let mut b = a.clone();
        assert_eq!(a.digest(), b.digest());
        b.master_seed = 7;
        assert_ne!(a.digest(), b.digest());
    }
}
