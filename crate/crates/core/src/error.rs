use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Inputs disagree in shape or violate a constructor invariant.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("parameter `{param}` value {value} outside [{lo}, {hi}]")]
    Range {
        param: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("validation error: {0}")]
    Validation(String),

    /// Geometry without enough rank for the requested fit.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than runtime failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Range { .. }
                | Error::Validation(_)
                | Error::Data(_)
                | Error::Format(_)
                | Error::Json(_)
        )
    }
}
