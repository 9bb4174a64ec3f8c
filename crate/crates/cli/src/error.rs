use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] realchip::Error),

    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON argument: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Usage(String),
}

pub const EXIT_DOMAIN: u8 = 1;
pub const EXIT_VIOLATED: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Domain(e) if e.is_budget() => EXIT_BUDGET,
            CliError::Domain(e) if e.is_counterexample() => EXIT_VIOLATED,
            _ => EXIT_DOMAIN,
        })
    }
}
