use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use super::tensor::{Behavior, Provenance};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::solvers::linalg::{max_eigenvalue, min_eigenvalue, Matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantumState {
    /// Unit vector on the `dA·dB` product space, index `i·dB + j`.
    Pure(Vec<f64>),
    Density(Matrix),
}

/// Shared state plus (possibly incomplete) measurements on each side.
///
/// `alice[x][a]` and `bob[y][b]` hold the POVM elements of the regular outputs.
/// When `complete` is false the missing mass `1 − Σ_a E_x^a` is the `⊥` outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumModel {
    pub dim_a: usize,
    pub dim_b: usize,
    pub state: QuantumState,
    pub alice: Vec<Vec<Matrix>>,
    pub bob: Vec<Vec<Matrix>>,
    pub complete: bool,
}

impl QuantumModel {
    pub fn inputs(&self) -> usize {
        self.alice.len()
    }

    pub fn outputs(&self) -> usize {
        self.alice.first().map_or(0, Vec::len)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::new(self.inputs(), self.outputs(), false)
    }

    pub fn density(&self) -> Matrix {
        match &self.state {
            QuantumState::Pure(psi) => Matrix::outer(psi, psi),
            QuantumState::Density(rho) => rho.clone(),
        }
    }

    /// Checks positivity, `Σ_a E_x^a ⪯ 1` (equality when complete) and the state.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let n = self.inputs();
        let k = self.outputs();
        if n == 0 || k == 0 || self.bob.len() != n {
            return Err(Error::Shape(format!(
                "model with {} Alice and {} Bob inputs",
                n,
                self.bob.len()
            )));
        }
        let tol_psd = tol.norm;
        for (party, dim, povms) in [("Alice", self.dim_a, &self.alice), ("Bob", self.dim_b, &self.bob)] {
            for (x, elems) in povms.iter().enumerate() {
                if elems.len() != k {
                    return Err(Error::Shape(format!("{party} input {x} has {} outputs, expected {k}", elems.len())));
                }
                let mut total = Matrix::zeros(dim, dim);
                for (a, e) in elems.iter().enumerate() {
                    if e.rows() != dim || e.cols() != dim {
                        return Err(Error::Shape(format!("{party} element ({x},{a}) is not {dim}x{dim}")));
                    }
                    let lo = min_eigenvalue(e)?;
                    if lo < -tol_psd {
                        return Err(Error::Invalid(format!(
                            "{party} element ({x},{a}) has eigenvalue {lo:.3e}"
                        )));
                    }
                    total = total.add(e);
                }
                if self.complete {
                    let dev = total.sub(&Matrix::identity(dim)).max_abs();
                    if dev > tol.norm {
                        return Err(Error::Invalid(format!(
                            "{party} input {x} is not complete (deviation {dev:.3e})"
                        )));
                    }
                } else {
                    let top = max_eigenvalue(&total)?;
                    if top > 1.0 + tol.norm {
                        return Err(Error::Invalid(format!(
                            "{party} input {x} sums above identity ({top:.6})"
                        )));
                    }
                }
            }
        }
        let d = self.dim_a * self.dim_b;
        match &self.state {
            QuantumState::Pure(psi) => {
                if psi.len() != d {
                    return Err(Error::Shape(format!("state vector of length {} for dimension {d}", psi.len())));
                }
                let norm: f64 = psi.iter().map(|v| v * v).sum();
                if (norm - 1.0).abs() > tol.norm {
                    return Err(Error::Invalid(format!("state norm² {norm}")));
                }
            }
            QuantumState::Density(rho) => {
                if rho.rows() != d || rho.cols() != d {
                    return Err(Error::Shape(format!("density matrix is not {d}x{d}")));
                }
                if (rho.trace() - 1.0).abs() > tol.norm {
                    return Err(Error::Invalid(format!("state trace {}", rho.trace())));
                }
                let lo = min_eigenvalue(rho)?;
                if lo < -tol_psd {
                    return Err(Error::Invalid(format!("state eigenvalue {lo:.3e}")));
                }
            }
        }
        Ok(())
    }

    /// The complete model obtained by adding `⊥` with element `1 − Σ_a E_x^a`.
    pub fn completed(&self) -> QuantumModel {
        let add_bottom = |povms: &Vec<Vec<Matrix>>, dim: usize| -> Vec<Vec<Matrix>> {
            povms
                .iter()
                .map(|elems| {
                    let mut rest = Matrix::identity(dim);
                    for e in elems {
                        rest = rest.sub(e);
                    }
                    let mut out = elems.clone();
                    out.push(rest.symmetrized());
                    out
                })
                .collect()
        };
        QuantumModel {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            state: self.state.clone(),
            alice: add_bottom(&self.alice, self.dim_a),
            bob: add_bottom(&self.bob, self.dim_b),
            complete: true,
        }
    }
}

/// `P(a, b | x, y) = tr(E_x^a ⊗ F_y^b ρ)`.
pub fn behavior_from_quantum(q: &QuantumModel, tol: &Tolerances) -> Result<Behavior> {
    q.validate(tol)?;
    let scenario = q.scenario()?;
    let (da, db) = (q.dim_a, q.dim_b);
    let rho = q.density();
    let n = scenario.inputs;
    let k = scenario.outputs;
    // Reduced operators σ_{x,a} = tr_A[(E_x^a ⊗ 1) ρ] on Bob's space.
    let mut p = vec![0.0; scenario.tensor_len()];
    for x in 0..n {
        for a in 0..k {
            let e = &q.alice[x][a];
            let mut sigma = Matrix::zeros(db, db);
            for i in 0..da {
                for i2 in 0..da {
                    let eii = e[(i, i2)];
                    if eii == 0.0 {
                        continue;
                    }
                    for j in 0..db {
                        for j2 in 0..db {
                            // (E ⊗ 1)_{(i,j),(i2,j2)} ρ_{(i2,j2),(i,j')} summed over i.
                            sigma[(j2, j)] += eii * rho[(i2 * db + j2, i * db + j)];
                        }
                    }
                }
            }
            for y in 0..n {
                for b in 0..k {
                    p[scenario.index(x, y, a, b)] = q.bob[y][b].frobenius_dot(&sigma.transpose());
                }
            }
        }
    }
    Behavior::new(scenario, p, Provenance::Quantum)
}

/// Maximally entangled state `Σ_i |ii⟩ / √d`.
pub fn maximally_entangled(d: usize) -> Vec<f64> {
    let mut psi = vec![0.0; d * d];
    let c = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        psi[i * d + i] = c;
    }
    psi
}

/// Rank-one projector onto the unit vector `v`.
pub fn projector(v: &[f64]) -> Matrix {
    Matrix::outer(v, v)
}
