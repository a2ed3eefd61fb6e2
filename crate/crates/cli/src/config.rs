//! Sweep configuration files.

use crate::error::{CliError, CliResult};
use kdq_core::{GridConfig, ModelSpec, OdeConfig, Protocol, RampIntegratorConfig};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::Path;

/// Quantities a sweep can tabulate, in canonical column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    MeanW,
    MeanWDephased,
    Enhancement,
    Qbar01,
    CoherenceEntropy,
    Mu4,
    Witness,
}

impl Observable {
    pub const ALL: [Observable; 7] = [
        Observable::MeanW,
        Observable::MeanWDephased,
        Observable::Enhancement,
        Observable::Qbar01,
        Observable::CoherenceEntropy,
        Observable::Mu4,
        Observable::Witness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::MeanW => "mean_w",
            Observable::MeanWDephased => "mean_w_dephased",
            Observable::Enhancement => "enhancement",
            Observable::Qbar01 => "qbar01",
            Observable::CoherenceEntropy => "coherence_entropy",
            Observable::Mu4 => "mu4",
            Observable::Witness => "witness",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.name() == name)
    }

    /// Needs the propagators between the two late fields.
    pub fn needs_dynamics(self) -> bool {
        !matches!(self, Observable::Qbar01 | Observable::CoherenceEntropy)
    }
}

/// `[min, max, count]`, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl TryFrom<[f64; 3]> for AxisRange {
    type Error = String;

    fn try_from([min, max, count]: [f64; 3]) -> Result<Self, String> {
        if count.fract() != 0.0 || count < 0.0 || count > u32::MAX as f64 {
            return Err(format!(
                "axis count must be a non-negative integer, got {count}"
            ));
        }
        Ok(AxisRange {
            min,
            max,
            count: count as usize,
        })
    }
}

impl From<AxisRange> for [f64; 3] {
    fn from(r: AxisRange) -> Self {
        [r.min, r.max, r.count as f64]
    }
}

impl AxisRange {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        AxisRange { min, max, count }
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }

    fn validate(&self, axis: &str) -> CliResult<()> {
        if self.count < 2 {
            return Err(CliError::Config(format!(
                "{axis}: count must be at least 2"
            )));
        }
        if !self.min.is_finite() || !self.max.is_finite() || self.min >= self.max {
            return Err(CliError::Config(format!("{axis}: need finite min < max")));
        }
        Ok(())
    }
}

fn ising_coupling() -> Vec<f64> {
    vec![1.0]
}

fn quench() -> Protocol {
    Protocol::SuddenQuench
}

fn one() -> usize {
    1
}

fn default_output() -> String {
    ".".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Stem for emitted files.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default = "ising_coupling")]
    pub hopping: Vec<f64>,
    #[serde(default = "ising_coupling")]
    pub pairing: Vec<f64>,
    pub beta: f64,
    pub h0_range: AxisRange,
    pub h1_range: AxisRange,
    pub h2: f64,
    #[serde(default = "quench")]
    pub protocol: Protocol,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub ode: OdeConfig,
    pub outputs: BTreeSet<Observable>,
    #[serde(default = "one")]
    pub parallelism: usize,
    #[serde(default = "default_output")]
    pub output_path: String,
    #[serde(default)]
    pub emit_png: bool,
    /// Transform variables probed by the `witness` column.
    #[serde(default)]
    pub u_samples: Option<Vec<f64>>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: SweepConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> CliResult<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.h0_range.validate("h0_range")?;
        self.h1_range.validate("h1_range")?;
        if self.outputs.is_empty() {
            return Err(CliError::Config(
                "outputs must name at least one observable".into(),
            ));
        }
        if self.parallelism == 0 {
            return Err(CliError::Config("parallelism must be at least 1".into()));
        }
        if let Some(u) = &self.u_samples {
            if u.is_empty() || u.iter().any(|x| !x.is_finite()) {
                return Err(CliError::Config(
                    "u_samples must be finite and nonempty".into(),
                ));
            }
        }
        // a representative cell catches bad couplings, beta or h2 early
        self.spec(self.h0_range.min, self.h1_range.min).validate()?;
        self.grid.build()?;
        self.integrator().validate()?;
        Ok(())
    }

    pub fn spec(&self, h0: f64, h1: f64) -> ModelSpec {
        ModelSpec {
            hopping: self.hopping.clone(),
            pairing: self.pairing.clone(),
            beta: self.beta,
            h0,
            h1,
            h2: self.h2,
            protocol: self.protocol,
        }
    }

    pub fn integrator(&self) -> RampIntegratorConfig {
        self.ode.into()
    }

    pub fn stem(&self) -> &str {
        self.name.as_deref().unwrap_or("sweep")
    }

    /// Requested observables in canonical order.
    pub fn columns(&self) -> Vec<Observable> {
        self.outputs.iter().copied().collect()
    }
}
