//! Parameter sweeps, figure recipes and table/heatmap output for the
//! `kdq` command-line tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod heatmap;
pub mod output;
pub mod recipes;
pub mod sweep;

pub use config::{AxisRange, Observable, SweepConfig};
pub use error::{CliError, CliResult};
pub use sweep::{run_sweep, SweepResult, SweepRow};
