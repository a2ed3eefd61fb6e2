//! Work statistics of translation-invariant quadratic fermionic chains.
//!
//! The chain decouples into independent pairs of momentum modes `(p, -p)`,
//! each described by a 2x2 block. Everything here is built on that
//! reduction: characteristic functions of the Kirkwood-Dirac and
//! two-point-measurement work distributions, closed-form averages, and
//! non-classicality diagnostics. [`oracle`] repeats the computations in the
//! full Fock space for small chains.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod kdq;
pub mod linalg;
pub mod model;
pub mod observables;
mod ode;
pub mod oracle;
pub mod witness;

pub use config::{GridConfig, ModelConfig, OdeConfig};
pub use dynamics::{
    integrate_ramp, propagators, ramp_propagator, sudden_propagator, transition_probability,
    ModePropagator, RampIntegratorConfig,
};
pub use error::{Error, Result};
pub use grid::{GridKind, MomentumGrid, Node, DEFAULT_GAUSS_NODES};
pub use kdq::{
    char_function, mode_char_factor, mode_kdq_distribution, work_moments, CharFactor,
    KdqDistribution, ModeFrames, Outcome, Scheme, WorkMoments,
};
pub use linalg::C64;
pub use model::{
    fourier_couplings, mean_overlap_qbar, mode_frame, overlap_q, ModeFrame, ModelSpec, Protocol,
};
pub use observables::{
    coherence_entropy_density, dephased_mean_work_density, extraction_enhancement,
    mean_work_density, observable_set, ObservableSet,
};
pub use oracle::{
    build_dense, dense_char_function, dense_coherence_entropy, dense_joint_distribution,
    dense_mean_work, DenseSystem,
};
pub use witness::{
    default_u_samples, direct_witness, imag_witness_closed_form, scan_nonclassicality,
    WitnessReport,
};
