use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    /// The requested computation exceeds a configured size budget.
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    Budget { what: String, needed: f64, budget: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn budget(what: impl Into<String>, needed: f64, budget: f64) -> Self {
        Error::Budget {
            what: what.into(),
            needed,
            budget,
        }
    }
}
