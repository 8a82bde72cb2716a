use std::path::PathBuf;

use thiserror::Error;

use crate::numerics::NumericsError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Numerics(#[from] NumericsError),

    #[error("calibration failed for family {family} under {loss} loss: {source}")]
    Calibration {
        family: String,
        loss: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {message} (lines {lines:?})", path = path.display())]
    Data {
        path: PathBuf,
        lines: Vec<usize>,
        message: String,
    },

    #[error("i/o error on {path}: {source}", path = path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerics(_) | Error::Calibration { .. })
    }
}
