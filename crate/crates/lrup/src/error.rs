use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] lrup_core::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    /// Process exit code: 2 for bad input, 4 for numerical domain failures,
    /// 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        use lrup_core::Error as E;
        match self {
            Error::Usage(_) | Error::Parse { .. } | Error::Json(_) => 2,
            Error::Core(e) => match e {
                E::DomainViolation { .. }
                | E::IllConditioned { .. }
                | E::NoConvergence(_)
                | E::InsideRegion
                | E::Singular
                | E::NotHermitian => 4,
                E::DimensionMismatch { .. } | E::IndexOutOfRange { .. } | E::InvalidArgument(_) | E::ZeroStartVector | E::SizeGuard { .. } => 2,
            },
            Error::Io { .. } | Error::Csv(_) => 1,
        }
    }
}
