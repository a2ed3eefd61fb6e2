//! Translation-invariant quadratic fermionic chains and their momentum blocks.
//!
//! Each pair of modes `(p, -p)` carries the real symmetric traceless block
//!
//! ```text
//! h_p(h) = [[ 2h - 2T_p,   -2D_p    ],
//!           [   -2D_p,   2T_p - 2h  ]]
//! ```
//!
//! with `T_p = sum_r T(r) cos(p r)` and `D_p = sum_r D(r) sin(p r)`. For the
//! transverse-field Ising preset (`T = D = [1]`) this is the familiar block
//! with `omega_p = 2 sqrt((cos p - h)^2 + sin^2 p)`.
//!
//! The Bogoliubov angle is fixed by `cos phi = 2(h - T_p)/omega` and
//! `sin phi = 2 D_p/omega`, so that `h_p = omega (cos phi sz - sin phi sx)`
//! and the positive-energy eigenvector is `(cos(phi/2), -sin(phi/2))`.

use crate::error::{Error, Result};
use crate::grid::MomentumGrid;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Below this single-particle energy a mode has no well-defined angle.
pub const GAP_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Protocol {
    #[serde(rename = "quench")]
    SuddenQuench,
    /// Linear ramp `h1 -> h2` at speed `delta > 0` (field units per time).
    #[serde(rename = "ramp")]
    LinearRamp { delta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub hopping: Vec<f64>,
    pub pairing: Vec<f64>,
    pub beta: f64,
    pub h0: f64,
    pub h1: f64,
    pub h2: f64,
    pub protocol: Protocol,
}

impl ModelSpec {
    pub fn new(
        hopping: Vec<f64>,
        pairing: Vec<f64>,
        beta: f64,
        fields: (f64, f64, f64),
        protocol: Protocol,
    ) -> Result<Self> {
        let spec = ModelSpec {
            hopping,
            pairing,
            beta,
            h0: fields.0,
            h1: fields.1,
            h2: fields.2,
            protocol,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Transverse-field Ising chain with `J = 1`.
    pub fn ising(beta: f64, h0: f64, h1: f64, h2: f64, protocol: Protocol) -> Self {
        ModelSpec {
            hopping: vec![1.0],
            pairing: vec![1.0],
            beta,
            h0,
            h1,
            h2,
            protocol,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "beta must be positive and finite, got {}",
                self.beta
            )));
        }
        if self.hopping.len() != self.pairing.len() {
            return Err(Error::InvalidModel(format!(
                "hopping ({}) and pairing ({}) must have the same range",
                self.hopping.len(),
                self.pairing.len()
            )));
        }
        if self.hopping.is_empty() {
            return Err(Error::InvalidModel("couplings must not be empty".into()));
        }
        let finite = self
            .hopping
            .iter()
            .chain(&self.pairing)
            .chain([&self.h0, &self.h1, &self.h2])
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidModel("non-finite coupling or field".into()));
        }
        if let Protocol::LinearRamp { delta } = self.protocol {
            if !(delta > 0.0 && delta.is_finite()) {
                return Err(Error::InvalidModel(format!(
                    "ramp speed must be positive, got {delta}"
                )));
            }
        }
        Ok(())
    }

    pub fn with_fields(&self, h0: f64, h1: f64, h2: f64) -> Self {
        ModelSpec {
            h0,
            h1,
            h2,
            ..self.clone()
        }
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        ModelSpec {
            beta,
            ..self.clone()
        }
    }

    pub fn with_protocol(&self, protocol: Protocol) -> Self {
        ModelSpec {
            protocol,
            ..self.clone()
        }
    }

    /// Largest coupling range `r`.
    pub fn range(&self) -> usize {
        self.hopping.len()
    }
}

/// `(T_p, D_p)`: cosine transform of the hopping and sine transform of the pairing.
pub fn fourier_couplings(spec: &ModelSpec, p: f64) -> (f64, f64) {
    spec.hopping.iter().zip(&spec.pairing).enumerate().fold(
        (0.0, 0.0),
        |(t, d), (i, (&tr, &dr))| {
            let r = (i + 1) as f64;
            (t + tr * (p * r).cos(), d + dr * (p * r).sin())
        },
    )
}

/// Single-mode data at momentum `p` and field `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFrame {
    pub p: f64,
    pub omega: f64,
    /// Bogoliubov angle in `[0, 2 pi)`.
    pub phi: f64,
    pub hmat: [[f64; 2]; 2],
}

impl ModeFrame {
    /// Eigenvector of `hmat` with eigenvalue `+omega`.
    pub fn v_plus(&self) -> [f64; 2] {
        let half = 0.5 * self.phi;
        [half.cos(), -half.sin()]
    }

    /// Eigenvector of `hmat` with eigenvalue `-omega`.
    pub fn v_minus(&self) -> [f64; 2] {
        let half = 0.5 * self.phi;
        [half.sin(), half.cos()]
    }
}

pub fn mode_frame(spec: &ModelSpec, p: f64, h: f64) -> Result<ModeFrame> {
    let (tp, dp) = fourier_couplings(spec, p);
    let a = 2.0 * (h - tp);
    let b = 2.0 * dp;
    let omega = a.hypot(b);
    if omega < GAP_EPSILON {
        return Err(Error::GaplessMode { p, omega });
    }
    let phi = b.atan2(a).rem_euclid(TAU);
    Ok(ModeFrame {
        p,
        omega,
        phi,
        hmat: [[a, -b], [-b, -a]],
    })
}

/// `Q = cos(phi_i - phi_j)`, the overlap between two mode eigenbases.
pub fn overlap_q(phi_i: f64, phi_j: f64) -> f64 {
    (phi_i - phi_j).cos()
}

/// `(1/pi) int_0^pi Q_p dp` between the eigenbases at fields `h_i` and `h_j`.
pub fn mean_overlap_qbar(spec: &ModelSpec, grid: &MomentumGrid, h_i: f64, h_j: f64) -> Result<f64> {
    let mut acc = 0.0;
    for node in grid.nodes() {
        let fi = mode_frame(spec, node.p, h_i)?;
        let fj = mode_frame(spec, node.p, h_j)?;
        acc += node.weight * overlap_q(fi.phi, fj.phi);
    }
    Ok(acc / PI)
}

/// Bogoliubov angles on every grid node, unwrapped to be continuous in `p`.
pub fn unwrapped_angles(spec: &ModelSpec, grid: &MomentumGrid, h: f64) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = Vec::with_capacity(grid.len());
    for node in grid.nodes() {
        let mut phi = mode_frame(spec, node.p, h)?.phi;
        if let Some(&prev) = out.last() {
            phi += TAU * ((prev - phi) / TAU).round();
        }
        out.push(phi);
    }
    Ok(out)
}
