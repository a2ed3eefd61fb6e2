//! Closed-form averages over the momentum grid.
//!
//! Work densities use the measure `dp / 2pi`; the coherence entropy and the
//! mean overlap use `dp / pi`.

use crate::dynamics::{transition_probability_unchecked, ModePropagator};
use crate::error::Result;
use crate::grid::MomentumGrid;
use crate::kdq::{check_lengths, grid_frames, ModeFrames};
use crate::model::{overlap_q, ModelSpec};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Smallest argument passed to `ln` in the entropy integrand.
pub const LOG_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableSet {
    pub mean_w: f64,
    pub mean_w_dephased: f64,
    pub enhancement: f64,
    pub coherence_entropy: f64,
    pub qbar01: f64,
}

/// Overlaps entering the work averages for one mode.
#[derive(Debug, Clone, Copy)]
struct ModeOverlaps {
    thermal: f64,
    q01: f64,
    q02: f64,
    q12: f64,
}

fn mode_overlaps(beta: f64, f: &ModeFrames, prop: &ModePropagator) -> ModeOverlaps {
    let q02 = 2.0 * transition_probability_unchecked(prop, &f.initial, &f.second) - 1.0;
    let q12 = 2.0 * transition_probability_unchecked(prop, &f.first, &f.second) - 1.0;
    ModeOverlaps {
        thermal: (0.5 * beta * f.initial.omega).tanh(),
        q01: overlap_q(f.initial.phi, f.first.phi),
        q02,
        q12,
    }
}

fn mean_integrand(f: &ModeFrames, o: &ModeOverlaps) -> f64 {
    o.thermal * (f.first.omega * o.q01 - f.second.omega * o.q02)
}

fn dephased_integrand(f: &ModeFrames, o: &ModeOverlaps) -> f64 {
    o.thermal * (f.first.omega * o.q01 - f.second.omega * o.q12 * o.q01)
}

fn enhancement_integrand(f: &ModeFrames, o: &ModeOverlaps) -> f64 {
    o.thermal * f.second.omega * (o.q01 * o.q12 - o.q02)
}

/// Relative entropy of coherence of one mode's thermal state with respect
/// to the eigenbasis of `h1`, in nats.
pub fn mode_coherence_entropy(beta: f64, f: &ModeFrames) -> f64 {
    let x = beta * f.initial.omega;
    let stay = (0.5 * (f.initial.phi - f.first.phi)).cos().powi(2);
    let decay2 = (-2.0 * x).exp();
    let norm = (1.0 + (-x).exp()).powi(2);
    // populations of the dephased state, each divided by e^x
    let b1 = stay + (1.0 - stay) * decay2;
    let b2 = (1.0 - stay) + stay * decay2;
    let term = |b: f64| b * (x + b.max(LOG_FLOOR).ln()) / norm;
    (x * (0.5 * x).tanh() - term(b1) - term(b2)).max(0.0)
}

fn integrate_modes(
    spec: &ModelSpec,
    grid: &MomentumGrid,
    props: &[ModePropagator],
    integrand: impl Fn(&ModeFrames, &ModeOverlaps) -> f64,
) -> Result<f64> {
    let frames = grid_frames(spec, grid)?;
    check_lengths(grid, frames.len(), props.len())?;
    let mut acc = 0.0;
    for ((node, f), prop) in grid.nodes().iter().zip(&frames).zip(props) {
        crate::dynamics::check_momentum(node.p, prop.p)?;
        acc += node.weight * integrand(f, &mode_overlaps(spec.beta, f, prop));
    }
    Ok(acc / TAU)
}

/// Average work per site.
pub fn mean_work_density(
    spec: &ModelSpec,
    grid: &MomentumGrid,
    props: &[ModePropagator],
) -> Result<f64> {
    integrate_modes(spec, grid, props, mean_integrand)
}

/// Average work per site when the initial state is first dephased in the
/// eigenbasis of the first-measurement Hamiltonian.
pub fn dephased_mean_work_density(
    spec: &ModelSpec,
    grid: &MomentumGrid,
    props: &[ModePropagator],
) -> Result<f64> {
    integrate_modes(spec, grid, props, dephased_integrand)
}

/// Work gained (negative) or lost because the initial coherences were kept.
pub fn extraction_enhancement(
    spec: &ModelSpec,
    grid: &MomentumGrid,
    props: &[ModePropagator],
) -> Result<f64> {
    integrate_modes(spec, grid, props, enhancement_integrand)
}

pub fn coherence_entropy_density(spec: &ModelSpec, grid: &MomentumGrid) -> Result<f64> {
    let frames = grid_frames(spec, grid)?;
    let acc: f64 = grid
        .nodes()
        .iter()
        .zip(&frames)
        .map(|(n, f)| n.weight * mode_coherence_entropy(spec.beta, f))
        .sum();
    Ok(acc / PI)
}

/// All closed-form observables in a single pass over the grid.
pub fn observable_set(
    spec: &ModelSpec,
    grid: &MomentumGrid,
    props: &[ModePropagator],
) -> Result<ObservableSet> {
    let frames = grid_frames(spec, grid)?;
    check_lengths(grid, frames.len(), props.len())?;
    let (mut mean, mut dephased, mut enh, mut ent, mut q) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((node, f), prop) in grid.nodes().iter().zip(&frames).zip(props) {
        crate::dynamics::check_momentum(node.p, prop.p)?;
        let o = mode_overlaps(spec.beta, f, prop);
        let w = node.weight;
        mean += w * mean_integrand(f, &o);
        dephased += w * dephased_integrand(f, &o);
        enh += w * enhancement_integrand(f, &o);
        ent += w * mode_coherence_entropy(spec.beta, f);
        q += w * o.q01;
    }
    Ok(ObservableSet {
        mean_w: mean / TAU,
        mean_w_dephased: dephased / TAU,
        enhancement: enh / TAU,
        coherence_entropy: ent / PI,
        qbar01: q / PI,
    })
}
