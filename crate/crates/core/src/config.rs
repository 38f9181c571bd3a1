use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by validation, LP and decomposition checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Per-(x, y) normalization residual.
    pub norm: f64,
    /// Non-signalling residual.
    pub ns: f64,
    /// Smallest admissible (negative) probability entry.
    pub nonneg: f64,
    /// LP feasibility, optimality and reconstruction.
    pub lp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            norm: 1e-9,
            ns: 1e-9,
            nonneg: 1e-12,
            lp: 1e-8,
        }
    }
}

/// Global knobs passed to every operation that needs tolerances or a budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub tol: Tolerances,
    /// Maximum number of strategy evaluations for exact enumerations.
    pub budget: u64,
}

pub const DEFAULT_BUDGET: u64 = 100_000_000;

impl Default for Settings {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            budget: DEFAULT_BUDGET,
        }
    }
}

impl Settings {
    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }
}
