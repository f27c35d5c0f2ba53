//! File formats and command implementations behind the `bosim` binary.
//!
//! Everything effectful lives here; the numerics come from `bosim-core`.
//! Commands are plain functions over resolved configurations so integration
//! tests can drive them without spawning processes.

use std::path::PathBuf;

pub mod commands;
pub mod config;
pub mod formats;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] bosim_core::Error),
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed line: {message}")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// Process exit code: 2 precondition violation, 3 cap exceeded, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(bosim_core::Error::CapExceeded { .. })
            | CliError::Core(bosim_core::Error::PermanentSizeCap { .. }) => 3,
            CliError::Core(_) | CliError::Config(_) => 2,
            CliError::Io { .. } | CliError::MalformedLine { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
