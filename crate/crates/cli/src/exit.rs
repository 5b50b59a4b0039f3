use std::fmt;

use placekit::Error;

pub const CONFIG: u8 = 2;
pub const NUMERIC: u8 = 3;
pub const VALIDATION: u8 = 4;

/// An error with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub source: anyhow::Error,
}

pub type CliResult<T> = Result<T, CliError>;

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.source)
    }
}

pub fn config_error(e: impl Into<anyhow::Error>) -> CliError {
    CliError {
        code: CONFIG,
        source: e.into(),
    }
}

pub fn numeric_error(e: impl Into<anyhow::Error>) -> CliError {
    CliError {
        code: NUMERIC,
        source: e.into(),
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidInput(_)
            | Error::Degenerate(_)
            | Error::TooManyMalformed { .. }
            | Error::InsufficientData(_)
            | Error::Io(_)
            | Error::Csv(_) => CONFIG,
            _ => NUMERIC,
        };
        CliError { code, source: e.into() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        config_error(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        config_error(e)
    }
}
