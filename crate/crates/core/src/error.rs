use thiserror::Error;

/// Errors raised by the spectral toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field has nonzero mean; {0}")]
    NonZeroMean(String),

    #[error("empty shell: {0}")]
    EmptyShell(String),

    #[error("misconfigured cutoff: {0}")]
    Cutoff(String),

    #[error("interpolant: {0}")]
    Interpolant(String),

    #[error("non-finite coefficients at t = {time}: {what}")]
    BlowUp { time: f64, what: String },

    #[error("time misalignment: {0}")]
    TimeMismatch(String),

    #[error("fit: {0}")]
    Fit(String),

    #[error("config: {0}")]
    Config(String),

    #[error("snapshot format: {0}")]
    Format(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// True for failures caused by user input (bad config, bad files) as
    /// opposed to numerical breakdown.
    pub fn is_config_error(&self) -> bool {
        !matches!(
            self,
            Error::BlowUp { .. } | Error::Fit(_) | Error::TimeMismatch(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
