use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use super::tensor::{Behavior, Provenance};
use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Vertex of the local polytope: Alice answers `alice[x]`, Bob `bob[y]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicLocalPoint {
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

impl DeterministicLocalPoint {
    pub fn check(&self, scenario: &Scenario) -> Result<()> {
        let k = scenario.effective_outputs();
        let n = scenario.inputs;
        if self.alice.len() != n || self.bob.len() != n {
            return Err(Error::Shape(format!(
                "deterministic point needs {n} answers per party"
            )));
        }
        if self.alice.iter().chain(&self.bob).any(|&o| o >= k) {
            return Err(Error::Invalid(format!("deterministic answer outside 0..{k}")));
        }
        Ok(())
    }

    /// `P(a, b | x, y) = δ_{a, alice[x]} δ_{b, bob[y]}`.
    pub fn behavior(&self, scenario: Scenario) -> Result<Behavior> {
        self.check(&scenario)?;
        Ok(Behavior::from_fn(scenario, Provenance::Local, |x, y, a, b| {
            if self.alice[x] == a && self.bob[y] == b {
                1.0
            } else {
                0.0
            }
        }))
    }
}

/// One party's extreme point of the signed ball `Σ_a |P(x, a)| ≤ 1`:
/// for each input an output and a sign.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedStrategy {
    pub choices: Vec<(usize, i8)>,
}

impl SignedStrategy {
    /// Dense `[input][output]` vector with a single `±1` per input.
    pub fn dense(&self, outputs: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.choices.len() * outputs];
        for (x, &(a, s)) in self.choices.iter().enumerate() {
            v[x * outputs + a] = f64::from(s);
        }
        v
    }
}

/// Affine combination `P = Σ α_i P_i` of deterministic local points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalDecomposition {
    pub scenario: Scenario,
    pub terms: Vec<(f64, DeterministicLocalPoint)>,
}

impl LocalDecomposition {
    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|(w, _)| w).sum()
    }

    /// `Σ |α_i|`.
    pub fn l1_weight(&self) -> f64 {
        self.terms.iter().map(|(w, _)| w.abs()).sum()
    }

    /// Checks `Σ α_i = 1` and that the decomposition reproduces `target`.
    pub fn certifies(&self, target: &Behavior, tol: &Tolerances) -> Result<f64> {
        let rebuilt = behavior_from_local(self)?;
        let err = rebuilt
            .as_slice()
            .iter()
            .zip(target.as_slice())
            .fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
        let affine = (self.weight_sum() - 1.0).abs();
        if err > tol.lp || affine > tol.lp {
            return Err(Error::Numerical(format!(
                "decomposition residual {err:.3e}, weight sum off by {affine:.3e}"
            )));
        }
        Ok(err)
    }
}

/// `Σ α_i · 1[point i]`.
pub fn behavior_from_local(d: &LocalDecomposition) -> Result<Behavior> {
    if d.terms.is_empty() {
        return Err(Error::Invalid("empty local decomposition".into()));
    }
    let s = d.scenario;
    let mut p = vec![0.0; s.tensor_len()];
    for (w, point) in &d.terms {
        point.check(&s)?;
        for x in 0..s.inputs {
            for y in 0..s.inputs {
                p[s.index(x, y, point.alice[x], point.bob[y])] += w;
            }
        }
    }
    Behavior::new(s, p, Provenance::Local)
}
