use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised anywhere in the analysis. Messages carry the name of the
/// module that produced them so that CLI output points at the failing stage.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),

    #[error("{module}: {message}")]
    Data {
        module: &'static str,
        message: String,
    },

    #[error("{module}: {message}")]
    Numeric {
        module: &'static str,
        message: String,
    },

    /// The Grassmann residual vanished; every direction of the projection is
    /// already represented by the chosen axis pairs.
    #[error("grassmann: residual fully explained (|R|_F = {norm:e})")]
    FullyExplained { norm: f64 },

    #[error("decomposition: every axis pair is forbidden")]
    AllPairsForbidden,

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("dataset: csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("bundle: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn data(module: &'static str, message: impl Into<String>) -> Self {
        Error::Data {
            module,
            message: message.into(),
        }
    }

    pub(crate) fn numeric(module: &'static str, message: impl Into<String>) -> Self {
        Error::Numeric {
            module,
            message: message.into(),
        }
    }

    /// Process exit code used by the command line front end:
    /// 1 config error, 2 data error, 3 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Data { .. } | Error::Io(_) | Error::Csv(_) | Error::Json(_) => 2,
            Error::Numeric { .. } | Error::FullyExplained { .. } | Error::AllPairsForbidden => 3,
        }
    }
}
