use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::Shared;
use crate::error::{Error, Result};
use crate::operators::PExponent;

/// Settings after merging flags, the `--config` file and defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub space: String,
    pub function: Option<String>,
    pub weight: String,
    pub p: Vec<String>,
    /// Whether exponents came from a flag or the file rather than the default.
    pub p_given: bool,
    pub point: Vec<String>,
    pub grid: Option<String>,
    pub seed: u64,
    pub mc_samples: u64,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub suite: String,
    pub input: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Scalar {
    fn text(&self) -> String {
        match self {
            Scalar::Int(v) => v.to_string(),
            Scalar::Float(v) => v.to_string(),
            Scalar::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(Scalar),
    Many(Vec<Scalar>),
}

impl OneOrMany {
    fn texts(&self) -> Vec<String> {
        match self {
            OneOrMany::One(s) => s.text().split(',').map(|t| t.trim().to_string()).collect(),
            OneOrMany::Many(v) => v.iter().map(Scalar::text).collect(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    space: Option<String>,
    function: Option<String>,
    weight: Option<String>,
    p: Option<OneOrMany>,
    point: Option<OneOrMany>,
    grid: Option<String>,
    seed: Option<u64>,
    #[serde(alias = "mc_samples")]
    mc_samples: Option<u64>,
    out: Option<PathBuf>,
    plot: Option<PathBuf>,
    suite: Option<String>,
    input: Option<PathBuf>,
}

fn load(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read `{}`: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("`{}`: {e}", path.display())))
}

/// `1, 2, 4, …, 256`.
pub(super) fn default_sweep() -> Vec<PExponent> {
    (0..=8).map(|k| PExponent::new(f64::from(1u32 << k)).expect("powers of two are valid")).collect()
}

impl RunConfig {
    pub fn resolve(flags: &Shared) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => load(path)?,
            None => FileConfig::default(),
        };
        let p_flag: Vec<String> = flags.p.iter().map(|s| s.trim().to_string()).collect();
        let p_file = file.p.as_ref().map(OneOrMany::texts);
        let p_given = !p_flag.is_empty() || p_file.is_some();
        let p = if !p_flag.is_empty() {
            p_flag
        } else {
            p_file.unwrap_or_else(|| vec!["1".into()])
        };
        let (point, grid) = if !flags.point.is_empty() || flags.grid.is_some() {
            (flags.point.clone(), flags.grid.clone())
        } else {
            (file.point.as_ref().map(OneOrMany::texts).unwrap_or_default(), file.grid)
        };
        Ok(Self {
            space: flags.space.clone().or(file.space).unwrap_or_else(|| "real-line".into()),
            function: flags.function.clone().or(file.function),
            weight: flags.weight.clone().or(file.weight).unwrap_or_else(|| "exp".into()),
            p,
            p_given,
            point,
            grid,
            seed: flags.seed.or(file.seed).unwrap_or(42),
            mc_samples: flags.mc_samples.or(file.mc_samples).unwrap_or(100_000),
            out: flags.out.clone().or(file.out),
            plot: flags.plot.clone().or(file.plot),
            suite: flags.suite.clone().or(file.suite).unwrap_or_else(|| "all".into()),
            input: flags.input.clone().or(file.input),
        })
    }

    pub fn function(&self) -> Result<&str> {
        self.function
            .as_deref()
            .ok_or_else(|| Error::Usage("missing --function".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "function = \"bump:0:1\"\np = [1, 2.5, \"inf\"]\nseed = 9\nmc-samples = 5000\n").unwrap();
        let flags = Shared {
            config: Some(path.clone()),
            seed: Some(3),
            ..Shared::default()
        };
        let rc = RunConfig::resolve(&flags).unwrap();
        assert_eq!(rc.seed, 3);
        assert_eq!(rc.mc_samples, 5000);
        assert_eq!(rc.p, ["1", "2.5", "inf"]);
        assert_eq!(rc.function.as_deref(), Some("bump:0:1"));
        assert_eq!(rc.space, "real-line");

        std::fs::write(&path, "colour = 1\n").unwrap();
        assert!(matches!(RunConfig::resolve(&flags), Err(Error::Config(_))));
    }

    #[test]
    fn default_sweep_doubles() {
        let ps: Vec<f64> = default_sweep().into_iter().map(f64::from).collect();
        assert_eq!(ps.first(), Some(&1.0));
        assert_eq!(ps.last(), Some(&256.0));
        assert_eq!(ps.len(), 9);
    }
}
