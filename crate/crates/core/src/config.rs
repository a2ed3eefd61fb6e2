//! JSON model presets.
//!
//! ```json
//! { "hopping": [1.0], "pairing": [1.0], "beta": 15.0,
//!   "h0": 2.0, "h1": 0.0, "h2": 0.5,
//!   "protocol": {"type": "ramp", "delta": 4.0},
//!   "grid": {"kind": "gauss", "n": 2048},
//!   "ode": {"rel_tol": 1e-10, "abs_tol": 1e-12} }
//! ```

use crate::dynamics::RampIntegratorConfig;
use crate::error::{Error, Result};
use crate::grid::{GridKind, MomentumGrid, DEFAULT_GAUSS_NODES};
use crate::model::{ModelSpec, Protocol};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GridConfig {
    Gauss {
        n: usize,
    },
    Chain {
        #[serde(rename = "L")]
        l: usize,
    },
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig::Gauss {
            n: DEFAULT_GAUSS_NODES,
        }
    }
}

impl GridConfig {
    pub fn kind(&self) -> GridKind {
        match *self {
            GridConfig::Gauss { n } => GridKind::GaussLegendre(n),
            GridConfig::Chain { l } => GridKind::FiniteChain(l),
        }
    }

    pub fn build(&self) -> Result<MomentumGrid> {
        MomentumGrid::new(self.kind())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OdeConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: u64,
}

impl Default for OdeConfig {
    fn default() -> Self {
        let d = RampIntegratorConfig::default();
        OdeConfig {
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            max_steps: d.max_steps,
        }
    }
}

impl From<OdeConfig> for RampIntegratorConfig {
    fn from(c: OdeConfig) -> Self {
        RampIntegratorConfig {
            rel_tol: c.rel_tol,
            abs_tol: c.abs_tol,
            max_steps: c.max_steps,
        }
    }
}

fn ising_coupling() -> Vec<f64> {
    vec![1.0]
}

fn quench() -> Protocol {
    Protocol::SuddenQuench
}

/// A model together with its momentum grid and integrator settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    #[serde(default = "ising_coupling")]
    pub hopping: Vec<f64>,
    #[serde(default = "ising_coupling")]
    pub pairing: Vec<f64>,
    pub beta: f64,
    #[serde(default)]
    pub h0: f64,
    #[serde(default)]
    pub h1: f64,
    #[serde(default)]
    pub h2: f64,
    #[serde(default = "quench")]
    pub protocol: Protocol,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub ode: OdeConfig,
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ModelConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec().validate()?;
        self.grid.build()?;
        self.integrator().validate()
    }

    pub fn spec(&self) -> ModelSpec {
        ModelSpec {
            hopping: self.hopping.clone(),
            pairing: self.pairing.clone(),
            beta: self.beta,
            h0: self.h0,
            h1: self.h1,
            h2: self.h2,
            protocol: self.protocol,
        }
    }

    pub fn integrator(&self) -> RampIntegratorConfig {
        self.ode.into()
    }
}
