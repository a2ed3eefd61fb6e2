//! Per-mode time evolution between the two measurement times.
//!
//! A mode pair evolves with the SU(2) matrix `[[z, -s*], [s, z*]]`. For a
//! sudden quench it is the identity; for a linear ramp `(z, s)` solves
//!
//! ```text
//! i d/dt (z, s) = [[W(t), D], [D, -W(t)]] (z, s),   W = h(t) - T_p,  D = -D_p
//! ```
//!
//! from `(1, 0)`, which is evolution under half the mode block.

use crate::error::{Error, Result};
use crate::grid::MomentumGrid;
use crate::linalg::{Mat2, C64, ONE, ZERO};
use crate::model::{fourier_couplings, ModeFrame, ModelSpec, Protocol};
use crate::ode::{self, OdeError, Tolerances};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Pairing below which a mode cannot leave its initial state.
pub const DEGENERATE_PAIRING: f64 = 1e-14;

/// Momenta must agree to this tolerance to be treated as the same mode.
const MOMENTUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModePropagator {
    pub p: f64,
    pub z: C64,
    pub s: C64,
}

impl ModePropagator {
    pub fn matrix(&self) -> Mat2 {
        Mat2::new(self.z, -self.s.conj(), self.s, self.z.conj())
    }

    /// `| |z|^2 + |s|^2 - 1 |`
    pub fn unitarity_defect(&self) -> f64 {
        (self.z.norm_sqr() + self.s.norm_sqr() - 1.0).abs()
    }

    pub fn is_identity(&self) -> bool {
        self.z == ONE && self.s == ZERO
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampIntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: u64,
}

impl Default for RampIntegratorConfig {
    fn default() -> Self {
        RampIntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 10_000_000,
        }
    }
}

impl RampIntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_steps > 0;
        if ok && self.rel_tol.is_finite() && self.abs_tol.is_finite() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "invalid integrator settings {self:?}"
            )))
        }
    }
}

pub fn sudden_propagator(p: f64) -> ModePropagator {
    ModePropagator { p, z: ONE, s: ZERO }
}

/// Ramp duration and signed speed: `h(t) = h1 + rate t` for `t` in `[0, duration]`.
pub fn ramp_schedule(h1: f64, h2: f64, delta: f64) -> (f64, f64) {
    let duration = (h2 - h1).abs() / delta;
    let rate = if h2 >= h1 { delta } else { -delta };
    (duration, rate)
}

/// Ramp propagator, renormalized so that `|z|^2 + |s|^2 = 1` to rounding.
pub fn ramp_propagator(
    spec: &ModelSpec,
    p: f64,
    cfg: &RampIntegratorConfig,
) -> Result<ModePropagator> {
    let raw = integrate_ramp(spec, p, cfg)?;
    // project the integrator drift back onto SU(2)
    let norm = (raw.z.norm_sqr() + raw.s.norm_sqr()).sqrt();
    Ok(ModePropagator {
        p,
        z: raw.z / norm,
        s: raw.s / norm,
    })
}

/// The integrator output as is, before renormalization.
pub fn integrate_ramp(
    spec: &ModelSpec,
    p: f64,
    cfg: &RampIntegratorConfig,
) -> Result<ModePropagator> {
    let delta = match spec.protocol {
        Protocol::LinearRamp { delta } => delta,
        Protocol::SuddenQuench => {
            return Err(Error::InvalidModel(
                "ramp propagator requested for a sudden quench".into(),
            ))
        }
    };
    let (h1, h2) = (spec.h1, spec.h2);
    if h1 == h2 {
        return Ok(sudden_propagator(p));
    }
    let (duration, rate) = ramp_schedule(h1, h2, delta);
    let (tp, dp) = fourier_couplings(spec, p);

    if dp.abs() < DEGENERATE_PAIRING {
        // W(t) is integrated exactly; s never leaves zero.
        let phase = (0.5 * (h1 + h2) - tp) * duration;
        return Ok(ModePropagator {
            p,
            z: C64::new(0.0, -phase).exp(),
            s: ZERO,
        });
    }

    let off = -dp;
    let rhs = |t: f64, y: &[C64; 2]| {
        let w = h1 + rate * t - tp;
        // y' = -i M y
        let a = y[0] * w + y[1] * off;
        let b = y[0] * off - y[1] * w;
        [C64::new(a.im, -a.re), C64::new(b.im, -b.re)]
    };
    let scale = h1.abs().max(h2.abs()) + tp.abs() + dp.abs();
    let tol = Tolerances {
        rel: cfg.rel_tol,
        abs: cfg.abs_tol,
        max_steps: cfg.max_steps,
    };
    let y = ode::integrate(rhs, 0.0, duration, [ONE, ZERO], tol, 0.05 / scale).map_err(|e| {
        Error::IntegrationFailure {
            p,
            reason: match e {
                OdeError::MaxSteps(n) => format!("step budget of {n} exhausted"),
                OdeError::StepUnderflow(h) => format!("step size underflow ({h:e})"),
                OdeError::NonFinite => "non-finite state".into(),
            },
        }
    })?;
    Ok(ModePropagator {
        p,
        z: y[0],
        s: y[1],
    })
}

/// Propagator for every node of `grid`, computed in parallel.
pub fn propagators(
    spec: &ModelSpec,
    grid: &MomentumGrid,
    cfg: &RampIntegratorConfig,
) -> Result<Vec<ModePropagator>> {
    match spec.protocol {
        Protocol::SuddenQuench => Ok(grid.momenta().map(sudden_propagator).collect()),
        Protocol::LinearRamp { .. } => grid
            .nodes()
            .par_iter()
            .map(|n| ramp_propagator(spec, n.p, cfg))
            .collect(),
    }
}

pub(crate) fn check_momentum(expected: f64, found: f64) -> Result<()> {
    if (expected - found).abs() > MOMENTUM_TOL {
        Err(Error::MomentumMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// `|v_j^+ . U v_i^+|^2`: probability that the positive-energy state of frame `i`
/// ends in the positive-energy state of frame `j`.
pub fn transition_probability(
    prop: &ModePropagator,
    frame_i: &ModeFrame,
    frame_j: &ModeFrame,
) -> Result<f64> {
    check_momentum(prop.p, frame_i.p)?;
    check_momentum(prop.p, frame_j.p)?;
    Ok(transition_probability_unchecked(prop, frame_i, frame_j))
}

pub(crate) fn transition_probability_unchecked(
    prop: &ModePropagator,
    frame_i: &ModeFrame,
    frame_j: &ModeFrame,
) -> f64 {
    let vi = frame_i.v_plus();
    let vj = frame_j.v_plus();
    let uv = prop.matrix().apply([C64::from(vi[0]), C64::from(vi[1])]);
    (uv[0] * vj[0] + uv[1] * vj[1]).norm_sqr().min(1.0)
}
