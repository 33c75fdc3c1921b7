use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("CSV schema mismatch in {path}: {msg}")]
    Schema { path: PathBuf, msg: String },
    #[error("bad value in {path}, row {row}, column `{column}`: {msg}")]
    Row {
        path: PathBuf,
        row: usize,
        column: &'static str,
        msg: String,
    },
    #[error("cache file {path}: {msg}")]
    Cache { path: PathBuf, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] vk_core::CoreError),
    #[error(transparent)]
    ExactLa(#[from] vk_exactla::ExactLaError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = PipelineError> = std::result::Result<T, E>;

pub(crate) trait IoContext<T> {
    fn at(self, path: &std::path::Path) -> Result<T>;
}

impl<T> IoContext<T> for std::io::Result<T> {
    fn at(self, path: &std::path::Path) -> Result<T> {
        self.map_err(|source| PipelineError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}
