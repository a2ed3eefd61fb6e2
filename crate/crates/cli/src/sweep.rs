//! Parallel evaluation of observables over an `(h0, h1)` grid.

use crate::config::{Observable, SweepConfig};
use crate::error::CliResult;
use kdq_core::{
    default_u_samples, observable_set, propagators, scan_nonclassicality, sudden_propagator,
    work_moments, ModePropagator, MomentumGrid, Protocol, Scheme,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub h0: f64,
    pub h1: f64,
    /// One entry per column; NaN when `error` is set.
    pub values: Vec<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub config: SweepConfig,
    pub version: String,
    pub threads: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub columns: Vec<Observable>,
    pub h0_values: Vec<f64>,
    pub h1_values: Vec<f64>,
    /// Row-major: all `h1` for the first `h0`, then the next `h0`.
    pub rows: Vec<SweepRow>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    pub fn column(&self, obs: Observable) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|&c| c == obs)?;
        Some(self.rows.iter().map(|r| r.values[idx]).collect())
    }

    pub fn failed_cells(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

/// Runs on a dedicated pool of `threads` workers (`cfg.parallelism` when `None`).
pub fn run_sweep(cfg: &SweepConfig, threads: Option<usize>) -> CliResult<SweepResult> {
    cfg.validate()?;
    let threads = threads.unwrap_or(cfg.parallelism).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    let start = Instant::now();
    let rows = pool.install(|| evaluate(cfg))?;
    Ok(SweepResult {
        columns: cfg.columns(),
        h0_values: cfg.h0_range.values(),
        h1_values: cfg.h1_range.values(),
        rows,
        metadata: SweepMetadata {
            config: cfg.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            threads,
            wall_time_s: start.elapsed().as_secs_f64(),
        },
    })
}

type Propagators = Result<Arc<Vec<ModePropagator>>, String>;

fn evaluate(cfg: &SweepConfig) -> CliResult<Vec<SweepRow>> {
    let grid = cfg.grid.build()?;
    let columns = cfg.columns();
    let h0s = cfg.h0_range.values();
    let h1s = cfg.h1_range.values();
    let u_samples = cfg.u_samples.clone().unwrap_or_else(default_u_samples);

    // The evolution between the late fields does not depend on h0.
    let needs_dynamics = columns.iter().any(|c| c.needs_dynamics());
    let sudden: Propagators = Ok(Arc::new(grid.momenta().map(sudden_propagator).collect()));
    let cache: Vec<Propagators> = match cfg.protocol {
        Protocol::LinearRamp { .. } if needs_dynamics => h1s
            .par_iter()
            .map(|&h1| {
                propagators(&cfg.spec(h1, h1), &grid, &cfg.integrator())
                    .map(Arc::new)
                    .map_err(|e| e.to_string())
            })
            .collect(),
        _ => vec![sudden; h1s.len()],
    };

    let cells: Vec<(f64, usize)> = h0s
        .iter()
        .flat_map(|&h0| (0..h1s.len()).map(move |j| (h0, j)))
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(h0, j)| {
            let h1 = h1s[j];
            let outcome = cache[j]
                .clone()
                .and_then(|props| cell(cfg, &grid, &columns, &u_samples, h0, h1, &props));
            match outcome {
                Ok(values) => SweepRow {
                    h0,
                    h1,
                    values,
                    error: None,
                },
                Err(msg) => SweepRow {
                    h0,
                    h1,
                    values: vec![f64::NAN; columns.len()],
                    error: Some(msg),
                },
            }
        })
        .collect())
}

fn cell(
    cfg: &SweepConfig,
    grid: &MomentumGrid,
    columns: &[Observable],
    u_samples: &[f64],
    h0: f64,
    h1: f64,
    props: &[ModePropagator],
) -> Result<Vec<f64>, String> {
    let spec = cfg.spec(h0, h1);
    let set = observable_set(&spec, grid, props).map_err(|e| e.to_string())?;
    let mut values = Vec::with_capacity(columns.len());
    for &c in columns {
        let v = match c {
            Observable::MeanW => set.mean_w,
            Observable::MeanWDephased => set.mean_w_dephased,
            Observable::Enhancement => set.enhancement,
            Observable::Qbar01 => set.qbar01,
            Observable::CoherenceEntropy => set.coherence_entropy,
            Observable::Mu4 => {
                work_moments(&spec, grid, props, Scheme::Kdq)
                    .map_err(|e| e.to_string())?
                    .fourth_central
                    .re
            }
            Observable::Witness => {
                scan_nonclassicality(&spec, grid, props, u_samples)
                    .map_err(|e| e.to_string())?
                    .max_imag_witness
            }
        };
        if !v.is_finite() {
            return Err(format!("{} is not finite", c.name()));
        }
        values.push(v);
    }
    Ok(values)
}
