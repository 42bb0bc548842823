use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the models and the weather ingestion layer.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of a model.
    #[error("{quantity} = {value} is outside the model domain ({expected})")]
    Domain {
        quantity: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// A configuration value violates a parameter invariant.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// The pass never rises above the elevation floor.
    #[error("empty pass profile: maximum elevation {theta_max_deg} deg is below the floor {theta_min_deg} deg")]
    EmptyProfile { theta_max_deg: f64, theta_min_deg: f64 },

    /// Correlation is undefined for a constant series.
    #[error("correlation undefined: series `{series}` has zero variance")]
    UndefinedCorrelation { series: String },

    /// Two series that must be paired have different lengths.
    #[error("length mismatch: {left} vs {right} samples")]
    LengthMismatch { left: usize, right: usize },

    /// A statistic was requested over an empty selection.
    #[error("no data for {what}")]
    EmptySelection { what: String },

    /// The weather file is missing a required column or site.
    #[error("schema error: {0}")]
    Schema(String),

    /// A weather row failed validation.
    #[error("line {line}: {message}")]
    Record { line: u64, message: String },

    /// A site id was referenced that is not in the data set.
    #[error("unknown site `{0}`")]
    UnknownSite(String),

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            quantity,
            value,
            expected,
        }
    }

    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for failures of the input data (as opposed to model or configuration errors).
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Schema(_)
                | Error::Record { .. }
                | Error::UnknownSite(_)
                | Error::Io { .. }
                | Error::Csv(_)
                | Error::EmptySelection { .. }
        )
    }
}
