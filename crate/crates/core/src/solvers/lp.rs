//! Dense two-phase primal simplex with Bland's rule.
//!
//! Problems are `min cᵀx  s.t.  Ax = b`, with each variable either `x ≥ 0` or
//! free (split internally into a difference of two nonnegative columns).
//! Every optimal solution carries a dual vector `y` and the measured duality
//! gap `|cᵀx − bᵀy|`.

use serde::{Deserialize, Serialize};

use super::linalg::{solve, Matrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Matrix,
    pub rhs: Vec<f64>,
    /// `true` marks a free variable; all others are `≥ 0`.
    pub free: Vec<bool>,
}

impl LpProblem {
    /// All variables nonnegative.
    pub fn new(objective: Vec<f64>, constraints: Matrix, rhs: Vec<f64>) -> Result<Self> {
        let free = vec![false; objective.len()];
        Self::with_free(objective, constraints, rhs, free)
    }

    pub fn with_free(
        objective: Vec<f64>,
        constraints: Matrix,
        rhs: Vec<f64>,
        free: Vec<bool>,
    ) -> Result<Self> {
        let n = objective.len();
        if constraints.cols() != n || constraints.rows() != rhs.len() || free.len() != n {
            return Err(Error::Shape(format!(
                "LP with {n} variables, {}x{} constraints, {} right-hand sides",
                constraints.rows(),
                constraints.cols(),
                rhs.len()
            )));
        }
        let finite = objective.iter().chain(constraints.as_slice()).chain(&rhs);
        if !finite.into_iter().all(|v| v.is_finite()) {
            return Err(Error::Invalid("LP data must be finite".into()));
        }
        Ok(Self {
            objective,
            constraints,
            rhs,
            free,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: f64,
    pub x: Vec<f64>,
    /// Equality multipliers; empty unless optimal.
    pub y: Vec<f64>,
    /// `max(‖Ax − b‖∞, max(−x_j))` over nonnegative variables.
    pub primal_residual: f64,
    /// Largest violation of `c − Aᵀy ≥ 0` (or `= 0` on free variables).
    pub dual_infeasibility: f64,
    pub gap: f64,
    pub iterations: u64,
}

const PIVOT_EPS: f64 = 1e-9;
const COST_EPS: f64 = 1e-10;
const MAX_ITERATIONS: u64 = 200_000;

struct Tableau {
    rows: usize,
    /// Structural + artificial columns (rhs is stored separately).
    cols: usize,
    t: Vec<f64>,
    rhs: Vec<f64>,
    cost: Vec<f64>,
    obj: f64,
    basis: Vec<usize>,
    iterations: u64,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.cols + j]
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let w = self.cols;
        let p = self.t[r * w + s];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        self.rhs[r] /= p;
        let (pivot_row, pivot_rhs) = (self.t[r * w..(r + 1) * w].to_vec(), self.rhs[r]);
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + s];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            for (a, &b) in row.iter_mut().zip(&pivot_row) {
                *a -= f * b;
            }
            row[s] = 0.0;
            self.rhs[i] -= f * pivot_rhs;
        }
        let f = self.cost[s];
        if f != 0.0 {
            for (c, &b) in self.cost.iter_mut().zip(&pivot_row) {
                *c -= f * b;
            }
            self.cost[s] = 0.0;
            self.obj -= f * pivot_rhs;
        }
        self.basis[r] = s;
        self.iterations += 1;
    }

    /// Runs Bland-rule pivots over columns `< active_cols`. Returns `false` when
    /// the objective is unbounded below.
    fn optimize(&mut self, active_cols: usize) -> Result<bool> {
        loop {
            if self.iterations > MAX_ITERATIONS {
                return Err(Error::Numerical(format!(
                    "simplex stalled after {} pivots",
                    self.iterations
                )));
            }
            let Some(s) = (0..active_cols).find(|&j| self.cost[j] < -COST_EPS) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, s);
                if a <= PIVOT_EPS {
                    continue;
                }
                let ratio = self.rhs[i].max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        if ratio < best && !tie || tie && self.basis[i] < self.basis[r] {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, s),
            }
        }
    }
}

/// Solves `prob`; `tol` is the feasibility threshold for phase one.
pub fn lp_solve(prob: &LpProblem, tol: f64) -> Result<LpSolution> {
    let m = prob.constraints.rows();
    let n = prob.num_vars();
    // Expanded structural columns: originals, then negated copies of free ones.
    let free_idx: Vec<usize> = (0..n).filter(|&j| prob.free[j]).collect();
    let ns = n + free_idx.len();
    let cols = ns + m;
    let mut sign = vec![1.0; m];
    let mut t = vec![0.0; m * cols];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        if prob.rhs[i] < 0.0 {
            sign[i] = -1.0;
        }
        let row = prob.constraints.row(i);
        for j in 0..n {
            t[i * cols + j] = sign[i] * row[j];
        }
        for (k, &j) in free_idx.iter().enumerate() {
            t[i * cols + n + k] = -sign[i] * row[j];
        }
        t[i * cols + ns + i] = 1.0;
        rhs[i] = sign[i] * prob.rhs[i];
    }
    let mut cost_struct = prob.objective.clone();
    cost_struct.extend(free_idx.iter().map(|&j| -prob.objective[j]));

    // Phase one: minimize the sum of artificials.
    let mut cost = vec![0.0; cols];
    let mut obj = 0.0;
    for i in 0..m {
        for j in 0..ns {
            cost[j] -= t[i * cols + j];
        }
        obj -= rhs[i];
    }
    let mut tab = Tableau {
        rows: m,
        cols,
        t,
        rhs,
        cost,
        obj,
        basis: (ns..ns + m).collect(),
        iterations: 0,
    };
    tab.optimize(ns)?;
    let scale = 1.0 + prob.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let infeasibility = -tab.obj;
    if infeasibility > tol * scale {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            value: f64::NAN,
            x: vec![],
            y: vec![],
            primal_residual: infeasibility,
            dual_infeasibility: f64::NAN,
            gap: f64::NAN,
            iterations: tab.iterations,
        });
    }

    // Drive artificials out of the basis; rows where that is impossible are
    // linearly dependent on the others.
    let mut redundant = vec![false; m];
    for i in 0..m {
        if tab.basis[i] < ns {
            continue;
        }
        let best = (0..ns)
            .filter(|&j| !tab.basis.contains(&j))
            .max_by(|&a, &b| tab.at(i, a).abs().total_cmp(&tab.at(i, b).abs()));
        match best {
            Some(j) if tab.at(i, j).abs() > PIVOT_EPS => tab.pivot(i, j),
            _ => redundant[i] = true,
        }
    }

    // Phase two.
    tab.cost = vec![0.0; cols];
    tab.cost[..ns].copy_from_slice(&cost_struct);
    tab.obj = 0.0;
    for i in 0..m {
        let b = tab.basis[i];
        let cb = if b < ns { cost_struct[b] } else { 0.0 };
        if cb == 0.0 {
            continue;
        }
        for j in 0..cols {
            tab.cost[j] -= cb * tab.at(i, j);
        }
        tab.obj -= cb * tab.rhs[i];
    }
    if !tab.optimize(ns)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            value: f64::NEG_INFINITY,
            x: vec![],
            y: vec![],
            primal_residual: f64::NAN,
            dual_infeasibility: f64::NAN,
            gap: f64::NAN,
            iterations: tab.iterations,
        });
    }

    let mut xs = vec![0.0; ns];
    for i in 0..m {
        if tab.basis[i] < ns {
            xs[tab.basis[i]] = tab.rhs[i];
        }
    }
    let mut x = xs[..n].to_vec();
    for (k, &j) in free_idx.iter().enumerate() {
        x[j] -= xs[n + k];
    }
    let value: f64 = prob.objective.iter().zip(&x).map(|(c, v)| c * v).sum();

    // Dual from the final basis: B_ᵀ y = c_B over the non-redundant rows.
    let live: Vec<usize> = (0..m).filter(|&i| !redundant[i]).collect();
    let column = |j: usize, i: usize| -> f64 {
        if j < n {
            sign[i] * prob.constraints[(i, j)]
        } else {
            -sign[i] * prob.constraints[(i, free_idx[j - n])]
        }
    };
    let k = live.len();
    let bt = Matrix::from_fn(k, k, |r, c| column(tab.basis[live[r]], live[c]));
    let cb: Vec<f64> = live.iter().map(|&i| cost_struct[tab.basis[i]]).collect();
    let y_live = solve(&bt, &cb)
        .ok_or_else(|| Error::Numerical("singular final simplex basis".into()))?;
    let mut y = vec![0.0; m];
    for (r, &i) in live.iter().enumerate() {
        y[i] = sign[i] * y_live[r];
    }

    let ax = prob.constraints.matvec(&x);
    let mut primal_residual = ax
        .iter()
        .zip(&prob.rhs)
        .fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
    for j in 0..n {
        if !prob.free[j] {
            primal_residual = primal_residual.max(-x[j]);
        }
    }
    let aty = prob.constraints.tmatvec(&y);
    let mut dual_infeasibility = 0.0f64;
    for j in 0..n {
        let reduced = prob.objective[j] - aty[j];
        let viol = if prob.free[j] { reduced.abs() } else { -reduced };
        dual_infeasibility = dual_infeasibility.max(viol);
    }
    let dual_value: f64 = prob.rhs.iter().zip(&y).map(|(b, v)| b * v).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value,
        x,
        y,
        primal_residual,
        dual_infeasibility,
        gap: (value - dual_value).abs(),
        iterations: tab.iterations,
    })
}
