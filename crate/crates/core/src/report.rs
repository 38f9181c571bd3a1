use serde::{Deserialize, Serialize};

/// What a reported optimum certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// The value is the true optimum.
    Exact,
    /// The value is attained by an explicit witness; the optimum may be larger.
    LowerBound,
}

/// Outcome of a bound computation, serialized as
/// `{value, certificate, iterations, residual}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub value: f64,
    pub certificate: Certificate,
    pub iterations: u64,
    pub residual: f64,
}
