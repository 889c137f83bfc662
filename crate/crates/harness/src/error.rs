use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] dequant::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("wav: {0}")]
    Wav(#[from] hound::Error),
    #[error("unsupported wav encoding: {0}")]
    UnsupportedFormat(String),
    #[error("wav file contains no samples")]
    EmptyWav,
    #[error("sample {index} is not finite")]
    NonFinite { index: usize },
    #[error("invalid signal descriptor: {0}")]
    Descriptor(String),
    #[error("invalid experiment spec: {0}")]
    Spec(String),
    #[error("toml: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("nothing to report")]
    EmptyReport,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}
