use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("accuracy error: {0}")]
    Accuracy(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// A requested window or argument lies outside the precomputed data.
    #[error(
        "coverage error: requested [{start}, {end}] but data covers [{have_start}, {have_end}]"
    )]
    Coverage {
        start: f64,
        end: f64,
        have_start: f64,
        have_end: f64,
    },

    #[error("range error: {0}")]
    Range(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn coverage(start: f64, end: f64, have_start: f64, have_end: f64) -> Self {
        Error::Coverage {
            start,
            end,
            have_start,
            have_end,
        }
    }
}
