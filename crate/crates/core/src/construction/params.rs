use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the Gaussian construction: `G` is `n×m`, the functional has
/// `m^n` inputs and `n` outputs per party, and `t = n/m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub n: usize,
    pub q: f64,
    pub m: usize,
    pub t: f64,
    pub sigma_threshold: f64,
    pub seed: u64,
}

impl ConstructionParams {
    /// `m = ⌈n^{q/2}⌉`, `σ_threshold = 1/2`.
    pub fn new(n: usize, q: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("n must be at least 1".into()));
        }
        if !(q > 2.0) || !q.is_finite() {
            return Err(Error::Invalid(format!("q = {q} must be a finite number above 2")));
        }
        let target = (n as f64).powf(q / 2.0);
        let m = target.ceil() as usize;
        Self::with_m(n, q, m, seed)
    }

    /// Explicit `m`, which must satisfy `n^{q/2} ≤ m ≤ 2n^{q/2}` and `n ≤ m`.
    pub fn with_m(n: usize, q: f64, m: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("n must be at least 1".into()));
        }
        if !(q > 2.0) || !q.is_finite() {
            return Err(Error::Invalid(format!("q = {q} must be a finite number above 2")));
        }
        let target = (n as f64).powf(q / 2.0);
        // Tolerate rounding in n^{q/2} for exact powers.
        let lo = target * (1.0 - 1e-12);
        let hi = 2.0 * target * (1.0 + 1e-12);
        if (m as f64) < lo || (m as f64) > hi || m < n {
            return Err(Error::Invalid(format!(
                "m = {m} outside the window [n^(q/2), 2n^(q/2)] = [{target:.4}, {:.4}]",
                2.0 * target
            )));
        }
        Ok(Self {
            n,
            q,
            m,
            t: n as f64 / m as f64,
            sigma_threshold: 0.5,
            seed,
        })
    }

    /// The `q = log₂ n` preset, under which `m = n^{q/2} = 2^{(log₂ n)²/2}`.
    pub fn log_preset(n: usize, seed: u64) -> Result<Self> {
        let q = (n as f64).log2();
        if q <= 2.0 {
            return Err(Error::Invalid(format!(
                "the q = log2(n) preset needs n > 4 (got n = {n}, q = {q})"
            )));
        }
        Self::new(n, q, seed)
    }

    pub fn with_threshold(mut self, sigma_threshold: f64) -> Result<Self> {
        if !(sigma_threshold > 0.0) {
            return Err(Error::Invalid(format!("σ threshold {sigma_threshold} must be positive")));
        }
        self.sigma_threshold = sigma_threshold;
        Ok(self)
    }

    /// Inputs per party, `m^n`, saturating.
    pub fn inputs(&self) -> u128 {
        (0..self.n).fold(1u128, |acc, _| acc.saturating_mul(self.m as u128))
    }

    /// `n^{1/2 − 2/q}`, the predicted growth of the violation.
    pub fn predicted_scale(&self) -> f64 {
        (self.n as f64).powf(0.5 - 2.0 / self.q)
    }
}
