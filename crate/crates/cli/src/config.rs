//! JSON run configuration.

use std::path::{Path, PathBuf};

use ekdev_core::simulate::Model;
use ekdev_core::{AdditiveFunctionSpec, LimitMeasure};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Upper limit on the number of grid points.
pub const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub g: Option<AdditiveFunctionSpec>,
    pub rho: Option<LimitMeasure>,
    pub n: Option<u64>,
    #[serde(rename = "Q", alias = "q")]
    pub q: Option<u64>,
    /// Value cutoff; absent means no truncation.
    #[serde(rename = "C", alias = "c")]
    pub c: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub x_grid: Option<XGrid>,
    pub output: Option<OutputSpec>,
    pub model: Option<Model>,
    /// Exact law instead of Monte Carlo for `simulate`.
    #[serde(default)]
    pub exact: bool,
    pub counterexample: Option<CounterexampleParams>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl XGrid {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(CliError::config("x_grid.step", format!("must be positive, got {}", self.step)));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max) {
            return Err(CliError::config("x_grid", "need finite min <= max"));
        }
        if (self.max - self.min) / self.step >= MAX_GRID_POINTS as f64 {
            return Err(CliError::config("x_grid", format!("more than {MAX_GRID_POINTS} points")));
        }
        Ok(())
    }

    /// `min, min + step, ...` up to `max` (inclusive up to rounding).
    pub fn points(&self) -> Vec<f64> {
        let k = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        (0..=k).map(|i| self.min + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Svg,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub delta: f64,
    pub theta: f64,
    pub k: usize,
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        CounterexampleParams {
            lambda1: 1.0,
            lambda2: 2.0,
            delta: 0.1,
            theta: 1.0,
            k: 6,
        }
    }
}

impl RunConfig {
    /// Parses JSON, reporting the failing field path with line and column.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::Parse {
                field: path,
                line: inner.line(),
                column: inner.column(),
                message: inner.to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn cutoff(&self) -> Result<f64, CliError> {
        match self.c {
            None => Ok(f64::INFINITY),
            Some(c) if c >= 0.0 => Ok(c),
            Some(c) => Err(CliError::config("C", format!("must be non-negative, got {c}"))),
        }
    }

    pub fn require_g(&self) -> Result<&AdditiveFunctionSpec, CliError> {
        self.g.as_ref().ok_or_else(|| CliError::missing("g"))
    }

    pub fn require_rho(&self) -> Result<&LimitMeasure, CliError> {
        self.rho.as_ref().ok_or_else(|| CliError::missing("rho"))
    }

    pub fn require_n(&self) -> Result<u64, CliError> {
        self.n.ok_or_else(|| CliError::missing("n"))
    }

    pub fn require_q(&self) -> Result<u64, CliError> {
        self.q.ok_or_else(|| CliError::missing("Q"))
    }

    pub fn require_x_grid(&self) -> Result<XGrid, CliError> {
        let grid = self.x_grid.ok_or_else(|| CliError::missing("x_grid"))?;
        grid.validate()?;
        Ok(grid)
    }
}
