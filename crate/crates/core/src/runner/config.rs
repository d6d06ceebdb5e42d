//! Run configuration and its flat `key = value` file format.
//!
//! ```text
//! # lines starting with '#' are ignored
//! suites = identities, bounds
//! dims = 3, 4
//! degrees = 1
//! radii = 1, 1/2
//! lmax = 2
//! seed = 7
//! mode = exact
//! cases = 4
//! coeff_degree = 3
//! out = runs
//! cache = runs/cache
//! jobs = 4
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Spectra,
    Bounds,
    Curvature,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Identities, Suite::Spectra, Suite::Bounds, Suite::Curvature];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Spectra => "spectra",
            Suite::Bounds => "bounds",
            Suite::Curvature => "curvature",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "identities" | "verify" => Ok(Suite::Identities),
            "spectra" | "spectrum" => Ok(Suite::Spectra),
            "bounds" => Ok(Suite::Bounds),
            "curvature" => Ok(Suite::Curvature),
            other => Err(Error::Config(format!("unknown suite `{other}`"))),
        }
    }
}

/// Arithmetic used by the identity checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(Error::Config(format!(
                "unknown mode `{other}` (expected exact or float)"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub suites: Vec<Suite>,
    pub dims: Vec<usize>,
    /// Form degrees `p`.
    pub degrees: Vec<usize>,
    #[serde(serialize_with = "serialize_radii")]
    pub radii: Vec<Q>,
    pub l_max: usize,
    pub seed: u64,
    pub mode: Mode,
    /// Randomized identity cases per `(m, p, R)`.
    pub cases: usize,
    /// Largest coefficient degree of randomized forms and weights.
    pub coeff_degree: usize,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub cache: Option<PathBuf>,
    #[serde(skip)]
    pub jobs: usize,
}

fn serialize_radii<S: serde::Serializer>(radii: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(radii.iter().map(|r| r.to_string()))
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suites: Suite::ALL.to_vec(),
            dims: vec![3],
            degrees: vec![1],
            radii: vec![Q::from_integer(1.into())],
            l_max: 2,
            seed: 7,
            mode: Mode::Exact,
            cases: 3,
            coeff_degree: 3,
            out: PathBuf::from("runs"),
            cache: None,
            jobs: 1,
        }
    }
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Config(format!("bad value `{s}` for `{key}`")))
        })
        .collect()
}

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
}

pub fn parse_radius(s: &str) -> Result<Q> {
    s.trim()
        .parse::<Q>()
        .map_err(|_| Error::Config(format!("bad radius `{s}` (expected an integer or a fraction like 1/2)")))
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.trim() {
            "suites" => {
                self.suites = if value.trim() == "all" {
                    Suite::ALL.to_vec()
                } else {
                    list(key, value)?
                }
            }
            "dims" | "dim" => self.dims = list(key, value)?,
            "degrees" | "degree" => self.degrees = list(key, value)?,
            "radii" | "radius" => self.radii = value.split(',').map(parse_radius).collect::<Result<_>>()?,
            "lmax" | "l_max" => self.l_max = scalar(key, value)?,
            "seed" => self.seed = scalar(key, value)?,
            "mode" => self.mode = value.parse()?,
            "cases" => self.cases = scalar(key, value)?,
            "coeff_degree" => self.coeff_degree = scalar(key, value)?,
            "out" => self.out = PathBuf::from(value.trim()),
            "cache" => self.cache = Some(PathBuf::from(value.trim())),
            "jobs" => self.jobs = scalar(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies every setting in a configuration file's text.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = RunConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    /// Checks the ranges each selected suite needs.
    pub fn validate(&self) -> Result<()> {
        if self.suites.is_empty() {
            return Err(Error::Config("no suites selected".into()));
        }
        if self.dims.is_empty() || self.degrees.is_empty() || self.radii.is_empty() {
            return Err(Error::Config("dims, degrees and radii must be non-empty".into()));
        }
        if let Some(m) = self.dims.iter().find(|&&m| m < 2) {
            return Err(Error::Config(format!("dimension {m} < 2")));
        }
        if self.radii.iter().any(|r| *r <= Q::from_integer(0.into())) {
            return Err(Error::Config("radii must be positive".into()));
        }
        if self.l_max == 0 {
            return Err(Error::Config("lmax must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        for &m in &self.dims {
            for &p in &self.degrees {
                let needs_p_below = |suite: Suite, limit: usize| -> Result<()> {
                    if self.suites.contains(&suite) && (p == 0 || p > limit) {
                        return Err(Error::Config(format!(
                            "suite {} needs 1 <= p <= {limit} for m = {m}, got p = {p}",
                            suite.name()
                        )));
                    }
                    Ok(())
                };
                needs_p_below(Suite::Identities, m - 1)?;
                needs_p_below(Suite::Spectra, m - 1)?;
                needs_p_below(Suite::Bounds, m.saturating_sub(2))?;
            }
        }
        Ok(())
    }
}
