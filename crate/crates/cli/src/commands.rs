//! Command-line surface.

use crate::config::{AxisRange, Observable, SweepConfig};
use crate::error::{CliError, CliResult};
use crate::sweep::run_sweep;
use crate::{heatmap, output, recipes};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kdq_core::{
    build_dense, char_function, coherence_entropy_density, default_u_samples, dense_char_function,
    mean_overlap_qbar, propagators, scan_nonclassicality, work_moments, GridConfig, ModelConfig,
    MomentumGrid, Protocol, Scheme, C64,
};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "kdq",
    version,
    about = "Kirkwood-Dirac work statistics of quadratic fermionic chains"
)]
pub struct Cli {
    /// Worker threads
    #[arg(long, global = true, env = "KDQ_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate observables over an (h0, h1) grid
    Sweep(SweepArgs),
    /// Tabulate the characteristic function G(u)
    Gfunc(GfuncArgs),
    /// Work cumulants and fourth central moment
    Moments(MomentsArgs),
    /// Non-classicality witnesses
    Witness(WitnessArgs),
    /// Compare against exact diagonalization of a short chain
    OracleCheck(OracleArgs),
    /// Relative entropy of coherence and mean overlap
    Coherence(ModelArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Png,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Kdq,
    Tpm,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Kdq => Scheme::Kdq,
            SchemeArg::Tpm => Scheme::Tpm,
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep configuration (JSON)
    #[arg(long, conflicts_with = "recipe", required_unless_present = "recipe")]
    pub config: Option<PathBuf>,
    /// Built-in figure recipe
    #[arg(long)]
    pub recipe: Option<String>,
    /// Output directory (overrides the configured one)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output formats; defaults to csv, plus png when the config asks for it
    #[arg(long, value_enum, value_delimiter = ',')]
    pub format: Vec<Format>,
    /// Points per axis (overrides both counts)
    #[arg(long)]
    pub resolution: Option<usize>,
}

/// Model selection: a JSON preset and/or individual overrides.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Model preset (JSON)
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub h0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub h1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub h2: Option<f64>,
    /// Ramp velocity; selects the linear ramp
    #[arg(long)]
    pub delta: Option<f64>,
    /// Gauss-Legendre nodes
    #[arg(long, conflicts_with = "chain")]
    pub nodes: Option<usize>,
    /// Finite chain length
    #[arg(long)]
    pub chain: Option<usize>,
}

impl ModelArgs {
    pub fn resolve(&self) -> CliResult<ModelConfig> {
        let mut cfg = match &self.config {
            Some(path) => ModelConfig::from_path(path)?,
            None => {
                let beta = self
                    .beta
                    .ok_or_else(|| CliError::Config("--beta or --config is required".into()))?;
                ModelConfig::from_json(&json!({ "beta": beta }).to_string())?
            }
        };
        if let Some(b) = self.beta {
            cfg.beta = b;
        }
        cfg.h0 = self.h0.unwrap_or(cfg.h0);
        cfg.h1 = self.h1.unwrap_or(cfg.h1);
        cfg.h2 = self.h2.unwrap_or(cfg.h2);
        if let Some(delta) = self.delta {
            cfg.protocol = Protocol::LinearRamp { delta };
        }
        if let Some(n) = self.nodes {
            cfg.grid = GridConfig::Gauss { n };
        }
        if let Some(l) = self.chain {
            cfg.grid = GridConfig::Chain { l };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct GfuncArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub u_min: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub u_max: f64,
    #[arg(long, default_value_t = 21)]
    pub u_count: usize,
    #[arg(long, value_enum, default_value = "kdq")]
    pub scheme: SchemeArg,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "kdq")]
    pub scheme: SchemeArg,
    /// Include per-mode cumulants
    #[arg(long)]
    pub per_mode: bool,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Explicit transform variables (default: 64 points in (0, 2])
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub u: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Chain length for exact diagonalization
    #[arg(long, default_value_t = 8)]
    pub sites: usize,
    #[arg(long, default_value_t = 10)]
    pub u_count: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[arg(long, value_enum, default_value = "kdq")]
    pub scheme: SchemeArg,
}

/// Runs one invocation, writing the primary result to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    if let Command::Sweep(args) = &cli.command {
        return sweep(args, cli.threads, out);
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n.max(1));
    }
    // output is buffered so the work can move onto the pool
    let (buf, status) = pool.build()?.install(|| {
        let mut buf: Vec<u8> = Vec::new();
        let status = match &cli.command {
            Command::Sweep(_) => unreachable!(),
            Command::Gfunc(a) => gfunc(a, &mut buf),
            Command::Moments(a) => moments(a, &mut buf),
            Command::Witness(a) => witness(a, &mut buf),
            Command::OracleCheck(a) => oracle_check(a, &mut buf),
            Command::Coherence(a) => coherence(a, &mut buf),
        };
        (buf, status)
    });
    out.write_all(&buf)
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
    status
}

fn emit_json(out: &mut dyn Write, value: serde_json::Value) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, &value)?;
    writeln!(out).map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn sweep(args: &SweepArgs, threads: Option<usize>, out: &mut dyn Write) -> CliResult<()> {
    let mut cfg: SweepConfig = match (&args.config, &args.recipe) {
        (Some(path), _) => SweepConfig::from_path(path)?,
        (None, Some(name)) => recipes::recipe(name)?,
        (None, None) => return Err(CliError::Config("--config or --recipe is required".into())),
    };
    if let Some(n) = args.resolution {
        cfg.h0_range = AxisRange::new(cfg.h0_range.min, cfg.h0_range.max, n);
        cfg.h1_range = AxisRange::new(cfg.h1_range.min, cfg.h1_range.max, n);
    }
    let dir = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output_path));
    let formats = if args.format.is_empty() {
        let mut f = vec![Format::Csv];
        if cfg.emit_png {
            f.push(Format::Png);
        }
        f
    } else {
        args.format.clone()
    };

    let result = run_sweep(&cfg, threads)?;
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let stem = cfg.stem();
    let mut files = Vec::new();
    for format in formats {
        match format {
            Format::Csv => {
                let path = dir.join(format!("{stem}.csv"));
                output::write_csv_file(&result, &path)?;
                files.push(path);
            }
            Format::Json => {
                let path = dir.join(format!("{stem}.json"));
                output::write_json_file(&result, &path)?;
                files.push(path);
            }
            Format::Png => {
                for obs in &result.columns {
                    let path = dir.join(format!("{stem}_{}.png", obs.name()));
                    heatmap::write_png(&result, *obs, &path)?;
                    files.push(path);
                }
            }
        }
    }
    emit_json(
        out,
        json!({
            "rows": result.rows.len(),
            "failed_cells": result.failed_cells(),
            "columns": result.columns.iter().map(|c| c.name()).collect::<Vec<_>>(),
            "files": files,
            "threads": result.metadata.threads,
            "wall_time_s": result.metadata.wall_time_s,
        }),
    )
}

fn u_grid(min: f64, max: f64, count: usize) -> CliResult<Vec<f64>> {
    match count {
        0 => Err(CliError::Config("--u-count must be positive".into())),
        1 => Ok(vec![min]),
        _ => Ok(AxisRange::new(min, max, count).values()),
    }
}

fn gfunc(args: &GfuncArgs, out: &mut dyn Write) -> CliResult<()> {
    let cfg = args.model.resolve()?;
    let (spec, grid) = (cfg.spec(), cfg.grid.build()?);
    let props = propagators(&spec, &grid, &cfg.integrator())?;
    let us = u_grid(args.u_min, args.u_max, args.u_count)?;
    let values = us
        .iter()
        .map(|&u| char_function(&spec, &grid, &props, C64::from(u), args.scheme.into()))
        .collect::<Result<Vec<_>, _>>()?;

    let mut buf: Vec<u8> = Vec::new();
    match args.format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut buf);
            w.write_record(["u", "re", "im"])?;
            for (u, g) in us.iter().zip(&values) {
                w.write_record([u, &g.re, &g.im].map(|x| output::format_value(*x)))?;
            }
            w.flush().map_err(|e| CliError::io(Path::new("<csv>"), e))?;
        }
        Format::Json => {
            let rows: Vec<_> = us
                .iter()
                .zip(&values)
                .map(|(u, g)| json!({ "u": u, "re": g.re, "im": g.im }))
                .collect();
            let doc = json!({ "model": cfg, "scheme": Scheme::from(args.scheme), "values": rows });
            serde_json::to_writer_pretty(&mut buf, &doc)?;
            buf.push(b'\n');
        }
        Format::Png => return Err(CliError::Config("gfunc writes csv or json".into())),
    }
    match &args.out {
        Some(path) => std::fs::write(path, &buf).map_err(|e| CliError::io(path, e)),
        None => out
            .write_all(&buf)
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn moments(args: &MomentsArgs, out: &mut dyn Write) -> CliResult<()> {
    let cfg = args.model.resolve()?;
    let (spec, grid) = (cfg.spec(), cfg.grid.build()?);
    let props = propagators(&spec, &grid, &cfg.integrator())?;
    let mut m = work_moments(&spec, &grid, &props, args.scheme.into())?;
    if !args.per_mode {
        m.per_mode.clear();
    }
    emit_json(out, json!({ "model": cfg, "moments": m }))
}

fn witness(args: &WitnessArgs, out: &mut dyn Write) -> CliResult<()> {
    let cfg = args.model.resolve()?;
    let (spec, grid) = (cfg.spec(), cfg.grid.build()?);
    let props = propagators(&spec, &grid, &cfg.integrator())?;
    let u = if args.u.is_empty() {
        default_u_samples()
    } else {
        args.u.clone()
    };
    let report = scan_nonclassicality(&spec, &grid, &props, &u)?;
    emit_json(out, json!({ "model": cfg, "report": report }))
}

fn oracle_check(args: &OracleArgs, out: &mut dyn Write) -> CliResult<()> {
    let cfg = args.model.resolve()?;
    let spec = cfg.spec();
    let dense = build_dense(&spec, args.sites)?;
    let grid = MomentumGrid::finite_chain(args.sites)?;
    let props = propagators(&spec, &grid, &cfg.integrator())?;
    let scheme: Scheme = args.scheme.into();
    let us: Vec<f64> = (1..=args.u_count)
        .map(|k| 2.0 * k as f64 / args.u_count as f64)
        .collect();
    let mut deviation: f64 = 0.0;
    let mut rows = Vec::new();
    for &u in &us {
        let a = dense_char_function(&dense, C64::from(u), scheme)?;
        let b = char_function(&spec, &grid, &props, C64::from(u), scheme)?;
        deviation = deviation.max((a - b).norm());
        rows.push(json!({ "u": u, "dense": [a.re, a.im], "modes": [b.re, b.im] }));
    }
    emit_json(
        out,
        json!({ "sites": args.sites, "max_deviation": deviation, "tolerance": args.tolerance,
                "values": rows }),
    )?;
    if deviation <= args.tolerance {
        Ok(())
    } else {
        Err(CliError::OracleMismatch {
            deviation,
            tolerance: args.tolerance,
        })
    }
}

fn coherence(args: &ModelArgs, out: &mut dyn Write) -> CliResult<()> {
    let cfg = args.resolve()?;
    let (spec, grid) = (cfg.spec(), cfg.grid.build()?);
    let entropy = coherence_entropy_density(&spec, &grid)?;
    let qbar = mean_overlap_qbar(&spec, &grid, spec.h0, spec.h1)?;
    emit_json(
        out,
        json!({ "h0": spec.h0, "h1": spec.h1, "beta": spec.beta,
                Observable::CoherenceEntropy.name(): entropy, Observable::Qbar01.name(): qbar }),
    )
}
