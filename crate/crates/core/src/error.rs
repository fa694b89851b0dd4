use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the engine can report. Variants map onto the process exit
/// codes used by the command-line front end (see [`Error::exit_code`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    /// Not a tensor file at all (magic or version mismatch).
    #[error("format error: {0}")]
    Format(String),

    /// Structurally a tensor file, but truncated or internally inconsistent.
    #[error("corrupt data: {0}")]
    Corruption(String),

    /// Well-formed data that violates a domain invariant (non-finite values, bad shapes).
    #[error("validation error: {0}")]
    Validation(String),

    /// Manifest or report document that does not follow its schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// Caller asked for something impossible (k too large, unknown id, length mismatch).
    #[error("usage error: {0}")]
    Usage(String),

    #[error("config error: {0}")]
    Config(String),

    /// Input that is valid but carries no information, e.g. a constant vector
    /// that cannot be z-normalized.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Synthetic fixture description that cannot produce a usable dataset.
    #[error("spec error: {0}")]
    Spec(String),
}

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_DEGENERATE: i32 = 5;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config(_) => EXIT_USAGE,
            Error::Format(_)
            | Error::Corruption(_)
            | Error::Validation(_)
            | Error::Schema(_)
            | Error::Spec(_) => EXIT_VALIDATION,
            Error::Io { .. } => EXIT_IO,
            Error::Degenerate(_) => EXIT_DEGENERATE,
        }
    }

    /// Prefixes the message with a file path, keeping the error class.
    pub fn in_file(self, path: &Path) -> Self {
        let p = path.display();
        match self {
            Error::Io { source, .. } => Error::Io {
                path: path.to_path_buf(),
                source,
            },
            Error::Format(m) => Error::Format(format!("{p}: {m}")),
            Error::Corruption(m) => Error::Corruption(format!("{p}: {m}")),
            Error::Validation(m) => Error::Validation(format!("{p}: {m}")),
            Error::Schema(m) => Error::Schema(format!("{p}: {m}")),
            Error::Usage(m) => Error::Usage(format!("{p}: {m}")),
            Error::Config(m) => Error::Config(format!("{p}: {m}")),
            Error::Degenerate(m) => Error::Degenerate(format!("{p}: {m}")),
            Error::Spec(m) => Error::Spec(format!("{p}: {m}")),
        }
    }
}
