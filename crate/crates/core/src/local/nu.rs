//! `ν(P)`: least `Σ|α_i|` over affine decompositions `P = Σ α_i P_i` into
//! deterministic local points, and the noise robustness `π(P)`: the largest
//! `λ` for which some local `P′` makes `λP + (1−λ)P′` local. They satisfy
//! `ν = 2/π − 1`.

use serde::{Deserialize, Serialize};

use crate::config::Settings;
use crate::error::{Error, Result};
use crate::model::{Behavior, DeterministicLocalPoint, LocalDecomposition, Scenario};
use crate::solvers::linalg::Matrix;
use crate::solvers::lp::{lp_solve, LpProblem, LpStatus};

/// All `K'^{2N}` deterministic points of a (complete) scenario, Alice-major.
pub fn local_points(scenario: &Scenario, budget: u64) -> Result<Vec<DeterministicLocalPoint>> {
    let k = scenario.effective_outputs();
    let n = scenario.inputs;
    let count = (0..2 * n).fold(1u128, |acc, _| acc.saturating_mul(k as u128));
    if count > u128::from(budget) {
        return Err(Error::budget("local points", count as f64, budget as f64));
    }
    let mut out = Vec::with_capacity(count as usize);
    for code in 0..count as usize {
        let mut c = code;
        let mut digits = vec![0; 2 * n];
        for d in digits.iter_mut().rev() {
            *d = c % k;
            c /= k;
        }
        out.push(DeterministicLocalPoint {
            alice: digits[..n].to_vec(),
            bob: digits[n..].to_vec(),
        });
    }
    Ok(out)
}

/// Tensor positions where each point's indicator equals one.
fn supports(scenario: &Scenario, points: &[DeterministicLocalPoint]) -> Vec<Vec<usize>> {
    let n = scenario.inputs;
    points
        .iter()
        .map(|pt| {
            let mut idx = Vec::with_capacity(n * n);
            for x in 0..n {
                for y in 0..n {
                    idx.push(scenario.index(x, y, pt.alice[x], pt.bob[y]));
                }
            }
            idx
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NuResult {
    pub nu: f64,
    pub decomposition: LocalDecomposition,
    /// Max reconstruction error of the decomposition.
    pub residual: f64,
    pub duality_gap: f64,
    pub iterations: u64,
}

pub fn nu_of_behavior(p: &Behavior, settings: &Settings) -> Result<NuResult> {
    let s = *p.scenario();
    let points = local_points(&s, settings.budget)?;
    let sup = supports(&s, &points);
    let np = points.len();
    let rows = s.tensor_len() + 1;
    // Columns: α⁺ then α⁻.
    let mut a = Matrix::zeros(rows, 2 * np);
    for (i, idx) in sup.iter().enumerate() {
        for &r in idx {
            a[(r, i)] = 1.0;
            a[(r, np + i)] = -1.0;
        }
        a[(rows - 1, i)] = 1.0;
        a[(rows - 1, np + i)] = -1.0;
    }
    let mut rhs = p.as_slice().to_vec();
    rhs.push(1.0);
    let lp = LpProblem::new(vec![1.0; 2 * np], a, rhs)?;
    let sol = lp_solve(&lp, settings.tol.lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(Error::Infeasible(
                "behavior lies outside the affine hull of local points".into(),
            ))
        }
        LpStatus::Unbounded => return Err(Error::Numerical("ν LP reported unbounded".into())),
    }
    let terms: Vec<(f64, DeterministicLocalPoint)> = (0..np)
        .filter_map(|i| {
            let w = sol.x[i] - sol.x[np + i];
            (w != 0.0).then(|| (w, points[i].clone()))
        })
        .collect();
    let decomposition = LocalDecomposition { scenario: s, terms };
    let residual = decomposition.certifies(p, &settings.tol)?;
    Ok(NuResult {
        nu: decomposition.l1_weight(),
        decomposition,
        residual,
        duality_gap: sol.gap,
        iterations: sol.iterations,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PiResult {
    pub pi: f64,
    /// Every `(λ, feasible)` pair tested, in order.
    pub probes: Vec<(f64, bool)>,
    /// All feasible probes lie below all infeasible ones.
    pub monotone: bool,
}

/// Bisection width for `π`.
pub const PI_RESOLUTION: f64 = 1e-9;

/// Is there local `P′, P″` with `λP + (1−λ)P′ = P″`?
pub fn pi_feasible(
    p: &Behavior,
    lambda: f64,
    sup: &[Vec<usize>],
    settings: &Settings,
) -> Result<bool> {
    let s = p.scenario();
    let np = sup.len();
    let rows = s.tensor_len() + 2;
    // Columns: γ (P″ weights) then β (P′ weights).
    let mut a = Matrix::zeros(rows, 2 * np);
    for (i, idx) in sup.iter().enumerate() {
        for &r in idx {
            a[(r, i)] = 1.0;
            a[(r, np + i)] = -(1.0 - lambda);
        }
        a[(rows - 2, i)] = 1.0;
        a[(rows - 1, np + i)] = 1.0;
    }
    let mut rhs: Vec<f64> = p.as_slice().iter().map(|v| lambda * v).collect();
    rhs.push(1.0);
    rhs.push(1.0);
    let lp = LpProblem::new(vec![0.0; 2 * np], a, rhs)?;
    Ok(lp_solve(&lp, settings.tol.lp)?.status == LpStatus::Optimal)
}

pub fn pi_robustness(p: &Behavior, settings: &Settings) -> Result<PiResult> {
    let s = *p.scenario();
    let points = local_points(&s, settings.budget)?;
    let sup = supports(&s, &points);
    let mut probes = Vec::new();
    let mut probe = |lambda: f64| -> Result<bool> {
        let ok = pi_feasible(p, lambda, &sup, settings)?;
        probes.push((lambda, ok));
        Ok(ok)
    };
    let pi = if probe(1.0)? {
        1.0
    } else {
        if !probe(0.0)? {
            return Err(Error::Infeasible(
                "no local point exists on this scenario (unreachable)".into(),
            ));
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        while hi - lo > PI_RESOLUTION {
            let mid = 0.5 * (lo + hi);
            if probe(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let max_feasible = probes.iter().filter(|p| p.1).map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let min_infeasible = probes.iter().filter(|p| !p.1).map(|p| p.0).fold(f64::INFINITY, f64::min);
    let monotone = max_feasible < min_infeasible;
    debug_assert!(monotone, "π feasibility is not monotone in λ");
    Ok(PiResult { pi, probes, monotone })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Equivalence {
    pub nu: NuResult,
    pub pi: PiResult,
    /// `|ν − (2/π − 1)|`.
    pub residual: f64,
}

pub fn check_equivalence(p: &Behavior, settings: &Settings) -> Result<Equivalence> {
    let nu = nu_of_behavior(p, settings)?;
    let pi = pi_robustness(p, settings)?;
    let residual = (nu.nu - (2.0 / pi.pi - 1.0)).abs();
    Ok(Equivalence { nu, pi, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tensor::{chsh_tsirelson_behavior, pr_box, uniform_behavior};

    #[test]
    fn deterministic_points_have_nu_one() {
        let s = Scenario::chsh();
        let settings = Settings::default();
        for pt in local_points(&s, 100).unwrap() {
            let p = pt.behavior(s).unwrap();
            let r = nu_of_behavior(&p, &settings).unwrap();
            assert!((r.nu - 1.0).abs() < 1e-12, "{}", r.nu);
            let e = check_equivalence(&p, &settings).unwrap();
            assert_eq!(e.pi.pi, 1.0);
            assert!(e.residual < 1e-12);
        }
    }

    #[test]
    fn tsirelson_behavior() {
        let settings = Settings::default();
        let p = chsh_tsirelson_behavior();
        let r = nu_of_behavior(&p, &settings).unwrap();
        assert!((r.nu - 2f64.sqrt()).abs() < 1e-6, "{}", r.nu);
        let pi = pi_robustness(&p, &settings).unwrap();
        assert!((pi.pi - 2.0 / (2f64.sqrt() + 1.0)).abs() < 1e-5, "{}", pi.pi);
        assert!(pi.monotone);
    }

    #[test]
    fn pr_box_value_from_lp() {
        // Frozen from the LP. Independent lower bound: CHSH takes 4 on the PR
        // box and lies in [−2, 2] on local points, so ν ≥ 2; π ≤ 2/3 likewise.
        let e = check_equivalence(&pr_box(), &Settings::default()).unwrap();
        assert!((e.nu.nu - 2.0).abs() < 1e-9, "{}", e.nu.nu);
        assert!((e.pi.pi - 2.0 / 3.0).abs() < 2e-9, "{}", e.pi.pi);
        assert!(e.residual < 1e-5);
    }

    #[test]
    fn signalling_input_is_outside_affine_hull() {
        let p = Behavior::from_fn(Scenario::chsh(), crate::model::Provenance::NonsignallingRaw, |_, y, a, b| {
            if a == y && b == 0 {
                1.0
            } else {
                0.0
            }
        });
        assert!(matches!(nu_of_behavior(&p, &Settings::default()), Err(Error::Infeasible(_))));
    }

    #[test]
    fn uniform_is_local() {
        let r = nu_of_behavior(&uniform_behavior(Scenario::chsh()), &Settings::default()).unwrap();
        assert!((r.nu - 1.0).abs() < 1e-12);
    }
}
