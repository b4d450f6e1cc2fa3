use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Instance document or value violates the schema; `path` locates the field.
    #[error("invalid instance at `{path}`: {message}")]
    Instance { path: String, message: String },

    #[error("malformed instance name `{0}` (expected {{u|w}}-P<photos>D<drones>%D<percent>)")]
    InstanceName(String),

    #[error("invalid generator spec: {0}")]
    Generator(String),

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("network: {0}")]
    Network(String),

    #[error("model: {0}")]
    Model(String),

    #[error("decode: {0}")]
    Decode(String),

    #[error("solver backend `{command}` failed: {message}\n--- output ---\n{output}")]
    Backend {
        command: String,
        message: String,
        output: String,
    },

    #[error("oracle limits exceeded: {what} = {bound} > {limit}")]
    OracleLimit {
        what: &'static str,
        bound: u128,
        limit: u128,
    },

    #[error("invalid set-cover instance: {0}")]
    Gscp(String),

    #[error("benchmark: {0}")]
    Bench(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn instance(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Instance {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
