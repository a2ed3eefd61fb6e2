use serde_json::json;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] kdq_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown recipe {0:?}")]
    UnknownRecipe(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("png: {0}")]
    Image(#[from] image::ImageError),
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
    #[error("oracle mismatch: deviation {deviation:e} exceeds {tolerance:e}")]
    OracleMismatch { deviation: f64, tolerance: f64 },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Config(_) => "config",
            CliError::UnknownRecipe(_) => "unknown_recipe",
            CliError::Io { .. } => "io",
            CliError::Csv(_) => "csv",
            CliError::Json(_) => "json",
            CliError::Image(_) => "image",
            CliError::ThreadPool(_) => "thread_pool",
            CliError::OracleMismatch { .. } => "oracle_mismatch",
        }
    }

    /// One-line JSON object for stderr.
    pub fn to_json(&self) -> String {
        json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
