use thiserror::Error;

/// Failures raised by the model, dynamics, statistics and oracle layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid momentum grid: {0}")]
    InvalidGrid(String),

    #[error("gapless mode at p = {p} (omega = {omega:e})")]
    GaplessMode { p: f64, omega: f64 },

    #[error("ramp integration failed at p = {p}: {reason}")]
    IntegrationFailure { p: f64, reason: String },

    #[error("momentum mismatch: {expected} vs {found}")]
    MomentumMismatch { expected: f64, found: f64 },

    #[error("projector defect {defect:e} exceeds tolerance")]
    ProjectorError { defect: f64 },

    #[error("branch tracking failed at p = {p}: |g(u)/g(0)| = {modulus:e}")]
    BranchTrackingFailure { p: f64, modulus: f64 },

    #[error("dense oracle limited to even 4 <= L <= 12, got L = {0}")]
    DimensionTooLarge(usize),

    #[error("eigenvalue clusters separated by {gap:e}, too close to the clustering tolerance")]
    DegeneracyClusteringAmbiguous { gap: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// Stable machine-readable tag, used by the CLI error payloads.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidModel(_) => "invalid_model",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::GaplessMode { .. } => "gapless_mode",
            Error::IntegrationFailure { .. } => "integration_failure",
            Error::MomentumMismatch { .. } => "momentum_mismatch",
            Error::ProjectorError { .. } => "projector_error",
            Error::BranchTrackingFailure { .. } => "branch_tracking_failure",
            Error::DimensionTooLarge(_) => "dimension_too_large",
            Error::DegeneracyClusteringAmbiguous { .. } => "degeneracy_clustering_ambiguous",
            Error::Config(_) => "config",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
