//! Per-input measurement subproblem
//!
//! ```text
//! maximize Σ_a tr(E_a R_a)  s.t.  E_a ⪰ 0,  Σ_a E_a ⪯ 1   (= 1 when complete)
//! ```
//!
//! solved through its dual `min tr Y  s.t.  Y ⪰ R_a (and Y ⪰ 0 when
//! incomplete)` by a log-barrier Newton method in the symmetric-matrix
//! coordinates of `Y`. On the central path `E_a = μ (Y − R_a)⁻¹` is primal
//! feasible up to normalization, so every solve returns a feasible
//! measurement together with a dual certificate `Y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solvers::linalg::{cholesky, max_eigenvalue, solve, spd_inverse, sym_fn, Matrix};

/// Largest accepted `tr Y − value`.
pub const POVM_GAP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmSolution {
    /// One element per reward, in order. The no-click element of an
    /// incomplete measurement is `1 − Σ_a E_a` and is not listed.
    pub elements: Vec<Matrix>,
    pub value: f64,
    /// Dual certificate: `Y ⪰ R_a` for all `a`, and `Y ⪰ 0` when incomplete.
    pub dual: Matrix,
    /// `tr Y − value`, an upper bound on the suboptimality.
    pub gap: f64,
    pub newton_steps: u64,
}

/// Orthonormal basis of symmetric `d×d` matrices as sparse `(i, j, coef)` lists.
fn svec_basis(d: usize) -> Vec<Vec<(usize, usize, f64)>> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(d * (d + 1) / 2);
    for i in 0..d {
        for j in i..d {
            if i == j {
                basis.push(vec![(i, i, 1.0)]);
            } else {
                basis.push(vec![(i, j, r), (j, i, r)]);
            }
        }
    }
    basis
}

/// `μ Σ log det⁻¹(Y − R_l) + tr Y`, or `None` outside the domain; also returns
/// the inverses `(Y − R_l)⁻¹`.
fn barrier(y: &Matrix, rewards: &[Matrix], mu: f64) -> Option<(f64, Vec<Matrix>)> {
    let mut f = y.trace();
    let mut inverses = Vec::with_capacity(rewards.len());
    for r in rewards {
        let l = cholesky(&y.sub(r))?;
        let logdet: f64 = (0..l.rows()).map(|i| 2.0 * l[(i, i)].ln()).sum();
        f -= mu * logdet;
        inverses.push(spd_inverse(&l));
    }
    f.is_finite().then_some((f, inverses))
}

fn value_of(elements: &[Matrix], rewards: &[Matrix]) -> f64 {
    elements.iter().zip(rewards).map(|(e, r)| e.frobenius_dot(r)).sum()
}

/// Solves the subproblem. `warm`, when given, is a feasible measurement whose
/// value the result never falls below.
pub fn optimize_povm_input(rewards: &[Matrix], complete: bool, warm: Option<&[Matrix]>) -> Result<PovmSolution> {
    let Some(first) = rewards.first() else {
        return Err(Error::Shape("measurement subproblem without outcomes".into()));
    };
    let d = first.rows();
    for (a, r) in rewards.iter().enumerate() {
        if r.rows() != d || r.cols() != d {
            return Err(Error::Shape(format!("reward {a} is not {d}x{d}")));
        }
        if !r.is_symmetric(1e-12) {
            return Err(Error::Invalid(format!("reward {a} is not symmetric (asymmetry {:.3e})", r.asymmetry())));
        }
    }
    if let Some(w) = warm {
        if w.len() != rewards.len() {
            return Err(Error::Shape("warm start has the wrong number of elements".into()));
        }
    }
    let scale = rewards.iter().map(Matrix::max_abs).fold(0.0, f64::max);
    let solution = if scale == 0.0 {
        trivial(rewards.len(), d, complete)
    } else {
        barrier_solve(rewards, complete, scale)?
    };
    Ok(match warm {
        Some(w) => {
            let warm_value = value_of(w, rewards);
            if warm_value > solution.value {
                PovmSolution {
                    elements: w.to_vec(),
                    value: warm_value,
                    gap: (solution.dual.trace() - warm_value).max(0.0),
                    ..solution
                }
            } else {
                solution
            }
        }
        None => solution,
    })
}

fn trivial(count: usize, d: usize, complete: bool) -> PovmSolution {
    let mut elements = vec![Matrix::zeros(d, d); count];
    if complete {
        elements[0] = Matrix::identity(d);
    }
    PovmSolution {
        elements,
        value: 0.0,
        dual: Matrix::zeros(d, d),
        gap: 0.0,
        newton_steps: 0,
    }
}

fn barrier_solve(rewards: &[Matrix], complete: bool, scale: f64) -> Result<PovmSolution> {
    let d = rewards[0].rows();
    // Work with rewards of unit max-entry; an incomplete measurement is a
    // complete one with an extra zero-reward outcome.
    let mut scaled: Vec<Matrix> = rewards.iter().map(|r| r.scaled(1.0 / scale).symmetrized()).collect();
    if !complete {
        scaled.push(Matrix::zeros(d, d));
    }
    let count = scaled.len();
    let basis = svec_basis(d);
    let p = basis.len();

    let top = scaled
        .iter()
        .map(max_eigenvalue)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut y = Matrix::identity(d).scaled(top + 1.0);
    let mut mu = 1.0;
    let mu_final = 1e-11 / (d * count) as f64;
    let mut steps = 0u64;
    let (mut f, mut inverses) = barrier(&y, &scaled, mu).ok_or_else(|| Error::Numerical("infeasible start".into()))?;

    loop {
        // Newton iterations at fixed μ; only the last centering is tight.
        let centering = if mu <= mu_final { 1e-8 } else { 1e-3 };
        for _ in 0..100 {
            steps += 1;
            let mut grad = vec![0.0; p];
            let mut hess = Matrix::zeros(p, p);
            for w in &inverses {
                for (k, bk) in basis.iter().enumerate() {
                    for &(i, j, c) in bk {
                        grad[k] -= mu * c * w[(j, i)];
                    }
                    for (l, bl) in basis.iter().enumerate().skip(k) {
                        let mut h = 0.0;
                        for &(i, j, c) in bk {
                            for &(s, t, c2) in bl {
                                h += c * c2 * w[(j, s)] * w[(t, i)];
                            }
                        }
                        hess[(k, l)] += mu * h;
                    }
                }
            }
            for (k, bk) in basis.iter().enumerate() {
                if bk.len() == 1 {
                    grad[k] += 1.0;
                }
                for l in 0..k {
                    hess[(k, l)] = hess[(l, k)];
                }
            }
            let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
            let step = solve(&hess, &neg).ok_or_else(|| Error::Numerical("singular barrier Hessian".into()))?;
            let decrement: f64 = -grad.iter().zip(&step).map(|(g, s)| g * s).sum::<f64>();
            if decrement <= centering * mu || decrement < 1e-20 {
                break;
            }
            let mut direction = Matrix::zeros(d, d);
            for (bk, s) in basis.iter().zip(&step) {
                for &(i, j, c) in bk {
                    direction[(i, j)] += c * s;
                }
            }
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let mut trial = y.clone();
                trial.add_scaled(t, &direction);
                if let Some((ft, inv)) = barrier(&trial, &scaled, mu) {
                    if ft <= f - 0.25 * t * decrement {
                        y = trial;
                        f = ft;
                        inverses = inv;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if mu <= mu_final {
            break;
        }
        mu = (mu * 0.02).max(mu_final);
        let (fm, inv) = barrier(&y, &scaled, mu).expect("domain does not depend on μ");
        f = fm;
        inverses = inv;
    }

    // Primal recovery: E_l = μ (Y − R_l)⁻¹, renormalized to Σ_l E_l = 1.
    let raw: Vec<Matrix> = inverses.iter().map(|w| w.scaled(mu).symmetrized()).collect();
    let mut total = Matrix::zeros(d, d);
    for e in &raw {
        total = total.add(e);
    }
    let t_inv_sqrt = sym_fn(&total.symmetrized(), |v| 1.0 / v.max(f64::MIN_POSITIVE).sqrt())?;
    let mut elements: Vec<Matrix> = raw
        .iter()
        .map(|e| t_inv_sqrt.matmul(e).matmul(&t_inv_sqrt).symmetrized())
        .collect();
    if !complete {
        elements.pop();
    }
    let value = value_of(&elements, rewards);
    let dual = y.scaled(scale).symmetrized();
    let gap = dual.trace() - value;
    if gap > POVM_GAP.max(1e-9 * scale) || gap < -1e-9 * scale {
        return Err(Error::Numerical(format!("measurement subproblem gap {gap:.3e}")));
    }
    Ok(PovmSolution {
        elements,
        value,
        dual,
        gap: gap.max(0.0),
        newton_steps: steps,
    })
}
