use std::fmt;
use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] earcon_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{}: {message}", path.display())]
    Wav { path: PathBuf, message: String },

    #[error("metadata header mismatch; missing columns: [{}], unexpected columns: [{}]{}",
        missing.join(", "), unexpected.join(", "),
        if *misordered { " (columns out of order)" } else { "" })]
    Schema {
        missing: Vec<String>,
        unexpected: Vec<String>,
        misordered: bool,
    },

    #[error("{}: row {line}: {message}", path.display())]
    MetadataRow { path: PathBuf, line: u64, message: String },

    #[error("{} clip(s) failed: {}", .0.len(), ClipFailure::list(.0))]
    Clips(Vec<ClipFailure>),

    #[error("{} already exists; pass --force to overwrite", .0.display())]
    OutputExists(PathBuf),

    #[error("{}: {message}", path.display())]
    Png { path: PathBuf, message: String },

    #[error("corpus has no clip for: {}", .0.join("; "))]
    MissingCombinations(Vec<String>),

    #[error("manifest does not match this build: {0}")]
    ManifestMismatch(String),

    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug)]
pub struct ClipFailure {
    pub file: String,
    pub message: String,
}

impl ClipFailure {
    fn list(items: &[ClipFailure]) -> String {
        items.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("; ")
    }
}

impl fmt::Display for ClipFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.file, self.message)
    }
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}
