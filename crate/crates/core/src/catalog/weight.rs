//! Radius-weights: integrable densities on `(0, ∞)`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_segments, truncation_radius, Estimate, QuadratureConfig};

const SQRT_PI_2: f64 = 0.886_226_925_452_758;

/// Piecewise-linear density given at increasing nodes, zero outside them.
#[derive(Debug)]
pub(crate) struct LinearTable {
    pub(crate) r: Vec<f64>,
    pub(crate) w: Vec<f64>,
}

impl LinearTable {
    fn new(r: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        if r.len() < 2 || r.len() != w.len() {
            return Err(Error::Validation("a weight table needs at least two rows".into()));
        }
        for (i, (&ri, &wi)) in r.iter().zip(&w).enumerate() {
            if !(ri.is_finite() && ri >= 0.0) {
                return Err(Error::Validation(format!("row {}: radius {ri} is not a finite nonnegative number", i + 1)));
            }
            if !(wi.is_finite() && wi >= 0.0) {
                return Err(Error::Validation(format!("row {}: weight {wi} is negative or not finite", i + 1)));
            }
        }
        if let Some(i) = r.windows(2).position(|p| p[1] <= p[0]) {
            return Err(Error::Validation(format!("radii must be strictly increasing (rows {} and {})", i + 1, i + 2)));
        }
        Ok(Self { r, w })
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.r.len();
        if !(x >= self.r[0] && x <= self.r[n - 1]) {
            return 0.0;
        }
        let i = match self.r.partition_point(|&v| v <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let t = (x - self.r[i]) / (self.r[i + 1] - self.r[i]);
        self.w[i] + t * (self.w[i + 1] - self.w[i])
    }

    /// Exact integral of the interpolant over `[from, ∞)`.
    fn integral_from(&self, from: f64) -> f64 {
        let mut s = 0.0;
        for k in 0..self.r.len() - 1 {
            let (a, b) = (self.r[k], self.r[k + 1]);
            if b <= from {
                continue;
            }
            let lo = a.max(from);
            s += 0.5 * (b - lo) * (self.eval(lo) + self.w[k + 1]);
        }
        s
    }
}

/// A user-supplied weight, mostly useful in tests and experiments.
pub struct CustomWeight {
    pub name: String,
    pub density: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub support: f64,
    pub tail: Option<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
    pub mass: Option<f64>,
}

#[derive(Clone)]
pub(crate) enum WeightKind {
    Exp,
    Gauss,
    Uniform(f64),
    Table { table: Arc<LinearTable>, label: String },
    /// Tabulated on `[r[0], r[n-1]]`; constant below, `e^{-r²}` above.
    Adaptive { table: Arc<LinearTable>, label: String },
    Custom(Arc<CustomWeight>),
}

/// A radius-weight `w` with its total mass `‖w‖ = ∫_0^∞ w`.
#[derive(Clone)]
pub struct RadiusWeight {
    pub(crate) kind: WeightKind,
    scale: f64,
}

impl fmt::Debug for RadiusWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadiusWeight({})", self.descriptor())
    }
}

fn gauss_tail(r: f64) -> f64 {
    if r <= 0.0 {
        return SQRT_PI_2;
    }
    let e = (-r * r).exp();
    (SQRT_PI_2 * e).min(e / (2.0 * r))
}

impl RadiusWeight {
    pub fn exp() -> Self {
        Self::base(WeightKind::Exp)
    }

    pub fn gauss() -> Self {
        Self::base(WeightKind::Gauss)
    }

    pub fn uniform(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("uniform weight needs a positive finite bound, got {r}")));
        }
        Ok(Self::base(WeightKind::Uniform(r)))
    }

    /// Piecewise-linear weight through `(r_i, w_i)`, zero outside the listed range.
    pub fn from_table(r: Vec<f64>, w: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        Ok(Self::base(WeightKind::Table {
            table: Arc::new(LinearTable::new(r, w)?),
            label: label.into(),
        }))
    }

    /// Reads a two-column CSV `r,w` (an optional header row is skipped).
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Validation(format!("cannot read weight table {}: {e}", path.display())))?;
        let (mut rs, mut ws) = (Vec::new(), Vec::new());
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
            if rec.len() != 2 {
                return Err(Error::Validation(format!("{}: row {} must have two columns", path.display(), i + 1)));
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(r), Ok(w)) => {
                    rs.push(r);
                    ws.push(w);
                }
                _ if i == 0 => continue,
                _ => {
                    return Err(Error::Validation(format!(
                        "{}: row {} is not numeric",
                        path.display(),
                        i + 1
                    )))
                }
            }
        }
        Self::from_table(rs, ws, format!("table:{}", path.display()))
    }

    pub fn custom(weight: CustomWeight) -> Self {
        Self::base(WeightKind::Custom(Arc::new(weight)))
    }

    pub(crate) fn adaptive(table: LinearTable, label: String) -> Self {
        Self::base(WeightKind::Adaptive {
            table: Arc::new(table),
            label,
        })
    }

    pub(crate) fn adaptive_table(r: Vec<f64>, w: Vec<f64>) -> Result<LinearTable> {
        LinearTable::new(r, w)
    }

    fn base(kind: WeightKind) -> Self {
        Self { kind, scale: 1.0 }
    }

    /// The weight `c·w` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("weight scale must be positive and finite, got {c}")));
        }
        Ok(Self {
            kind: self.kind.clone(),
            scale: self.scale * c,
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn density(&self, r: f64) -> f64 {
        if !(r > 0.0) {
            return 0.0;
        }
        let base = match &self.kind {
            WeightKind::Exp => (-r).exp(),
            WeightKind::Gauss => (-r * r).exp(),
            WeightKind::Uniform(b) => {
                if r <= *b {
                    1.0
                } else {
                    0.0
                }
            }
            WeightKind::Table { table, .. } => table.eval(r),
            WeightKind::Adaptive { table, .. } => {
                let n = table.r.len();
                if r < table.r[0] {
                    table.w[0]
                } else if r > table.r[n - 1] {
                    (-r * r).exp()
                } else {
                    table.eval(r)
                }
            }
            WeightKind::Custom(c) => (c.density)(r),
        };
        self.scale * base
    }

    /// Radius beyond which the density vanishes (`∞` if none).
    pub fn support_bound(&self) -> f64 {
        match &self.kind {
            WeightKind::Uniform(b) => *b,
            WeightKind::Table { table, .. } => *table.r.last().expect("tables are nonempty"),
            WeightKind::Custom(c) => c.support,
            _ => f64::INFINITY,
        }
    }

    /// Closed-form `‖w‖` where one is known.
    pub fn closed_form_mass(&self) -> Option<f64> {
        let m = match &self.kind {
            WeightKind::Exp => Some(1.0),
            WeightKind::Gauss => Some(SQRT_PI_2),
            WeightKind::Uniform(b) => Some(*b),
            WeightKind::Table { table, .. } => Some(table.integral_from(0.0)),
            WeightKind::Adaptive { .. } => None,
            WeightKind::Custom(c) => c.mass,
        };
        m.map(|m| m * self.scale)
    }

    /// Upper bound of `∫_R^∞ w`, if the weight provides one.
    pub fn tail_bound(&self, r: f64) -> Option<f64> {
        let r = r.max(0.0);
        let t = match &self.kind {
            WeightKind::Exp => Some((-r).exp()),
            WeightKind::Gauss => Some(gauss_tail(r)),
            WeightKind::Uniform(b) => Some((b - r).max(0.0)),
            WeightKind::Table { table, .. } => Some(table.integral_from(r)),
            WeightKind::Adaptive { table, .. } => {
                let end = *table.r.last().expect("tables are nonempty");
                if r >= end {
                    Some(gauss_tail(r))
                } else {
                    let below = if r < table.r[0] { (table.r[0] - r) * table.w[0] } else { 0.0 };
                    Some(below + table.integral_from(r) + gauss_tail(end))
                }
            }
            WeightKind::Custom(c) => c.tail.as_ref().map(|t| t(r)),
        };
        t.map(|t| t * self.scale)
    }

    /// Radii where the density may fail to be smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            WeightKind::Uniform(b) => vec![*b],
            WeightKind::Table { table, .. } | WeightKind::Adaptive { table, .. } => table.r.clone(),
            WeightKind::Custom(c) if c.support.is_finite() => vec![c.support],
            _ => Vec::new(),
        }
    }

    /// False for weights that vanish on a set of positive measure in `(0, ∞)`.
    pub fn is_ae_nonzero(&self) -> bool {
        !self.support_bound().is_finite()
    }

    pub fn descriptor(&self) -> String {
        let base = match &self.kind {
            WeightKind::Exp => "exp".to_string(),
            WeightKind::Gauss => "gauss".to_string(),
            WeightKind::Uniform(b) => format!("uniform:{b}"),
            WeightKind::Table { label, .. } | WeightKind::Adaptive { label, .. } => label.clone(),
            WeightKind::Custom(c) => c.name.clone(),
        };
        if self.scale == 1.0 {
            base
        } else {
            format!("{}*{base}", self.scale)
        }
    }

    /// `‖w‖` by adaptive quadrature up to the truncation radius; the
    /// certified tail beyond it is added to the error bound.
    pub fn total_mass(&self, cfg: &QuadratureConfig) -> Result<Estimate> {
        if self.tail_bound(1.0).is_none() && !self.support_bound().is_finite() {
            return Err(Error::Validation(format!(
                "weight `{}` has no certified tail, its mass cannot be computed",
                self.descriptor()
            )));
        }
        let end = truncation_radius(self, 1.0, 1.0, cfg)?;
        let end = if self.support_bound().is_finite() { self.support_bound() } else { end };
        let mut bp = vec![0.0];
        bp.extend(self.breakpoints().into_iter().filter(|&b| b > 0.0 && b < end));
        bp.push(end);
        let est = integrate_segments(|r| self.density(r), &bp, cfg)?;
        let tail = if self.support_bound().is_finite() {
            0.0
        } else {
            self.tail_bound(end).unwrap_or(0.0)
        };
        if !tail.is_finite() {
            return Err(Error::Validation(format!("weight `{}` has a divergent tail", self.descriptor())));
        }
        Ok(est.widen(tail))
    }
}

impl FromStr for RadiusWeight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((c, rest)) = s.split_once('*') {
            let c: f64 = c
                .trim()
                .parse()
                .map_err(|_| Error::parse(s, "scale factor must be a number"))?;
            let base: RadiusWeight = rest.parse()?;
            return base.scaled(c).map_err(|e| Error::parse(s, e.to_string()));
        }
        match s {
            "exp" => return Ok(Self::exp()),
            "gauss" => return Ok(Self::gauss()),
            _ => {}
        }
        if let Some(b) = s.strip_prefix("uniform:") {
            let b: f64 = b.parse().map_err(|_| Error::parse(s, "uniform bound must be a number"))?;
            return Self::uniform(b).map_err(|e| Error::parse(s, e.to_string()));
        }
        if let Some(path) = s.strip_prefix("table:") {
            return Self::from_csv(Path::new(path));
        }
        Err(Error::parse(s, "expected exp, gauss, uniform:<R> or table:<path>"))
    }
}
