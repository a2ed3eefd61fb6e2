//! Non-classicality diagnostics.
//!
//! A genuine joint probability distribution has a Hermitian characteristic
//! function, `G(-u) = G(u)*`. For one mode pair the violation
//! `g_p(u) - g_p(-u)*` is purely imaginary and factorizes as
//!
//! ```text
//! i 4 sin(f0 - f1) sinh(b w0) sin(u w1) sin(u w2) [sin f2 Im(z^2 - s^2) + 2 cos f2 Im(z s)]
//! ```
//!
//! with `f_k` the Bogoliubov angles. The second diagnostic is a negative
//! fourth central moment of the work.

use crate::dynamics::ModePropagator;
use crate::error::{Error, Result};
use crate::grid::MomentumGrid;
use crate::kdq::{
    check_lengths, grid_frames, work_moments_with_frames, CharFactor, ModeFrames, Scheme,
};
use crate::linalg::C64;
use crate::model::ModelSpec;
use serde::{Deserialize, Serialize};

/// `|g(u) - g(-u)*| / g(0)` above this flags complex quasiprobabilities.
pub const IMAG_THRESHOLD: f64 = 1e-8;

/// `Re mu4` below minus this flags negativity.
pub const NEGATIVITY_THRESHOLD: f64 = 1e-10;

/// Imaginary part of `g_p(u) - g_p(-u)*` from the factorized expression.
pub fn imag_witness_closed_form(
    beta: f64,
    frames: &ModeFrames,
    prop: &ModePropagator,
    u: f64,
) -> f64 {
    let (f0, f1, f2) = (frames.initial.phi, frames.first.phi, frames.second.phi);
    let (z, s) = (prop.z, prop.s);
    let dynamics = f2.sin() * (z * z - s * s).im + 2.0 * f2.cos() * (z * s).im;
    4.0 * (f0 - f1).sin()
        * (beta * frames.initial.omega).sinh()
        * (u * frames.first.omega).sin()
        * (u * frames.second.omega).sin()
        * dynamics
}

/// `g_p(u) - g_p(-u)*` evaluated from the characteristic factor.
pub fn direct_witness(
    beta: f64,
    frames: &ModeFrames,
    prop: &ModePropagator,
    u: f64,
) -> Result<C64> {
    let f = CharFactor::new(beta, *frames, *prop, Scheme::Kdq)?;
    Ok(f.eval(C64::from(u)) - f.eval(C64::from(-u)).conj())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    /// Largest `|g_p(u) - g_p(-u)*| / g_p(0)` over modes and sampled `u`.
    pub max_imag_witness: f64,
    pub mu4_real: f64,
    pub mu4_imag_abs: f64,
    pub nonclassical_imag: bool,
    pub nonclassical_negativity: bool,
}

/// 64 evenly spaced points in `(0, 2]`.
pub fn default_u_samples() -> Vec<f64> {
    (1..=64).map(|k| k as f64 * 2.0 / 64.0).collect()
}

pub fn scan_nonclassicality(
    spec: &ModelSpec,
    grid: &MomentumGrid,
    props: &[ModePropagator],
    u_samples: &[f64],
) -> Result<WitnessReport> {
    if u_samples.is_empty() {
        return Err(Error::Config("at least one u sample is required".into()));
    }
    let frames = grid_frames(spec, grid)?;
    check_lengths(grid, frames.len(), props.len())?;
    let mut max_imag: f64 = 0.0;
    for (f, prop) in frames.iter().zip(props) {
        let factor = CharFactor::new(spec.beta, *f, *prop, Scheme::Kdq)?;
        for &u in u_samples {
            let d = factor.ratio(C64::from(u)) - factor.ratio(C64::from(-u)).conj();
            max_imag = max_imag.max(d.norm());
        }
    }
    let moments = work_moments_with_frames(spec.beta, grid, &frames, props, Scheme::Kdq)?;
    let mu4 = moments.fourth_central;
    Ok(WitnessReport {
        max_imag_witness: max_imag,
        mu4_real: mu4.re,
        mu4_imag_abs: mu4.im.abs(),
        nonclassical_imag: max_imag > IMAG_THRESHOLD,
        nonclassical_negativity: mu4.re < -NEGATIVITY_THRESHOLD,
    })
}
