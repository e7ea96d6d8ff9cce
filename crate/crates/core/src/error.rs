use std::path::PathBuf;

/// Errors produced by the physics library and the scenario runner.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative numerical procedure hit its refinement cap.
    #[error("no convergence after {iterations} refinements (last {last:e}, previous {previous:e})")]
    Convergence {
        iterations: usize,
        last: f64,
        previous: f64,
    },

    /// A key/value data file could not be parsed.
    #[error("{source_name}:{line}: {message}")]
    DataFile {
        source_name: String,
        line: usize,
        message: String,
    },

    /// A named nuclide or lattice preset does not exist.
    #[error("unknown {kind} {name:?}; available: {available}")]
    UnknownName {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed table: {0}")]
    Table(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
