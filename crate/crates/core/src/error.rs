use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Bad parameters or inconsistent inputs (grid bounds, model constants, ...).
    #[error("configuration error: {0}")]
    Config(String),
    /// A numerical procedure failed to converge or produced a non-finite value.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// The simulation left its admissible range.
    #[error("blow-up at t = {t}: sup|u| = {value}")]
    Blowup { t: f64, value: f64 },
    /// A theorem premise needed to interpret a verdict does not hold.
    #[error("theorem hypotheses unmet: {0}")]
    Hypotheses(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
