//! Configuration loading and the `speed`, `simulate`, `wave`, `verify` and
//! `sweep` commands behind the `propagate` binary.

pub mod commands;
pub mod config;

pub use commands::{cmd_simulate, cmd_speed, cmd_sweep, cmd_verify, cmd_wave, CommandOutcome};
pub use config::{parse_config, RawConfig, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numeric(_) => "numeric",
            CliError::Io(_) => "io",
        }
    }

    /// One-line JSON record for stderr.
    pub fn record(&self) -> String {
        let message = match self {
            CliError::Config(m) | CliError::Numeric(m) | CliError::Io(m) => m,
        };
        serde_json::json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": message,
        })
        .to_string()
    }
}

impl From<propagate_core::Error> for CliError {
    fn from(e: propagate_core::Error) -> Self {
        use propagate_core::Error as E;
        match e {
            E::Config(m) => CliError::Config(m),
            E::Hypotheses(_) => CliError::Config(e.to_string()),
            E::Numeric(_) | E::Blowup { .. } => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
