//! See-saw lower bounds on `B_Q(M) = sup |⟨M, P⟩|` over incomplete quantum
//! behaviors in fixed local dimensions.
//!
//! Each sweep maximizes over Alice's measurements, then Bob's, then the state,
//! with the other two fixed; every step is a certified optimum of a convex
//! problem, so the objective never decreases. Both `M` and `−M` are searched.
//! Every effective output of the functional (including a `⊥` column) is an
//! ordinary outcome, and "no click" is always available with reward zero,
//! matching the classical bound's vertex set.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::povm::{optimize_povm_input, POVM_GAP};
use crate::error::{Error, Result};
use crate::local::ClassicalBound;
use crate::model::{BellFunctional, QuantumModel, QuantumState};
use crate::report::{Certificate, SolveReport};
use crate::solvers::linalg::{orthonormal_columns, sym_eig, Matrix};
use crate::solvers::rng::{GaussianSampler, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeesawConfig {
    /// Local dimensions `(d_A, d_B)`.
    pub dims: (usize, usize),
    pub restarts: usize,
    pub max_sweeps: usize,
    /// Stop once a sweep improves the value by less than `tol·max(1, value)`.
    pub tol: f64,
    pub stream: RngStream,
}

impl SeesawConfig {
    pub fn new(dims: (usize, usize), stream: RngStream) -> Self {
        Self {
            dims,
            restarts: 20,
            max_sweeps: 500,
            tol: 1e-8,
            stream,
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.0 == 0 || self.dims.1 == 0 {
            return Err(Error::Invalid(format!("see-saw dimensions {:?} must be positive", self.dims)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Invalid(format!("see-saw tolerance {} must be positive", self.tol)));
        }
        Ok(())
    }
}

/// `B = Σ M_{xy}^{ab} E_x^a ⊗ F_y^b` on `C^{d_A} ⊗ C^{d_B}` (index `i·d_B + j`).
pub fn bell_operator(m: &BellFunctional, alice: &[Vec<Matrix>], bob: &[Vec<Matrix>]) -> Result<Matrix> {
    let s = m.scenario();
    let k = s.effective_outputs();
    let check = |party: &str, povms: &[Vec<Matrix>]| -> Result<usize> {
        if povms.len() != s.inputs || povms.iter().any(|e| e.len() != k) {
            return Err(Error::Shape(format!(
                "{party} measurements do not match {} inputs with {k} outputs",
                s.inputs
            )));
        }
        let d = povms[0][0].rows();
        if povms.iter().flatten().any(|e| e.rows() != d || e.cols() != d) {
            return Err(Error::Shape(format!("{party} elements have mixed dimensions")));
        }
        Ok(d)
    };
    let da = check("Alice", alice)?;
    let db = check("Bob", bob)?;
    let mut out = Matrix::zeros(da * db, da * db);
    for (x, elems) in alice.iter().enumerate() {
        for (a, e) in elems.iter().enumerate() {
            let w = bob_sum(m, x, a, bob, db, 1.0);
            out = out.add(&e.kron(&w));
        }
    }
    Ok(out.symmetrized())
}

/// `Σ_{y,b} c·M_{xy}^{ab} F_y^b`.
fn bob_sum(m: &BellFunctional, x: usize, a: usize, bob: &[Vec<Matrix>], db: usize, c: f64) -> Matrix {
    let mut w = Matrix::zeros(db, db);
    for (y, elems) in bob.iter().enumerate() {
        for (b, f) in elems.iter().enumerate() {
            let coef = m.get(x, y, a, b);
            if coef != 0.0 {
                w.add_scaled(c * coef, f);
            }
        }
    }
    w
}

/// Top eigenpair of `B`: the best pure state for fixed measurements.
pub fn optimize_state(b: &Matrix) -> Result<(Vec<f64>, f64)> {
    let eig = sym_eig(b)?;
    let mut v = eig.vector(0);
    // Fix the sign so results do not depend on eigensolver conventions.
    if let Some(&lead) = v.iter().find(|c| c.abs() > 1e-12) {
        if lead < 0.0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
    }
    Ok((v, eig.values[0]))
}

/// Best result of a see-saw search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeesawResult {
    /// `value` is the `B_Q` lower bound; `iterations` counts sweeps over all
    /// runs; `residual` is the largest measurement-subproblem gap.
    pub report: SolveReport,
    pub model: QuantumModel,
    /// `+1` when the model maximizes `⟨M, P⟩`, `−1` for `−⟨M, P⟩`.
    pub sign: f64,
    /// Every sweep of every run was non-decreasing.
    pub monotone: bool,
    pub runs: usize,
}

/// Starting points supplied by the caller in addition to random restarts.
#[derive(Debug, Clone, Copy)]
pub enum WarmStart<'a> {
    /// An optimal classical strategy, embedded in the first basis vector.
    Classical(&'a ClassicalBound),
    /// A model of smaller or equal dimensions, embedded by zero padding.
    Model(&'a QuantumModel, f64),
}

pub fn seesaw(m: &BellFunctional, cfg: &SeesawConfig) -> Result<SeesawResult> {
    seesaw_with(m, cfg, &[])
}

pub fn seesaw_with(m: &BellFunctional, cfg: &SeesawConfig, warm: &[WarmStart]) -> Result<SeesawResult> {
    cfg.validate()?;
    let (da, db) = cfg.dims;
    let scale = m.max_abs();
    let s = *m.scenario();
    let k = s.effective_outputs();
    if scale == 0.0 {
        return Ok(SeesawResult {
            report: SolveReport {
                value: 0.0,
                certificate: Certificate::LowerBound,
                iterations: 0,
                residual: 0.0,
            },
            model: silent_model(s.inputs, k, da, db),
            sign: 1.0,
            monotone: true,
            runs: 0,
        });
    }
    let problems = [Problem::new(m, scale, 1.0), Problem::new(m, scale, -1.0)];

    let mut jobs: Vec<(usize, Start)> = Vec::new();
    for w in warm {
        match *w {
            WarmStart::Classical(c) => {
                let sign_idx = usize::from(c.sign < 0.0);
                jobs.push((sign_idx, Start::Given(classical_start(&problems[sign_idx], c, da, db))));
            }
            WarmStart::Model(q, sign) => {
                let sign_idx = usize::from(sign < 0.0);
                jobs.push((sign_idx, Start::Given(embed_model(&problems[sign_idx], q, da, db)?)));
            }
        }
    }
    for r in 0..cfg.restarts {
        for sign_idx in 0..2 {
            let stream = cfg.stream.split((2 * r + sign_idx) as u64);
            jobs.push((sign_idx, Start::Random(stream)));
        }
    }
    if jobs.is_empty() {
        return Err(Error::Invalid("see-saw with no restarts and no warm start".into()));
    }

    let runs: Vec<Run> = jobs
        .into_par_iter()
        .map(|(sign_idx, start)| problems[sign_idx].run(start, da, db, cfg).map(|r| (sign_idx, r)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .map(|(sign_idx, mut r)| {
            r.sign_idx = sign_idx;
            r
        })
        .collect();

    let iterations: u64 = runs.iter().map(|r| r.sweeps).sum();
    let residual = runs.iter().map(|r| r.max_gap).fold(0.0, f64::max);
    let monotone = runs.iter().all(|r| r.monotone);
    let count = runs.len();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one run");
    let sign_idx = best.sign_idx;
    let sign = if sign_idx == 0 { 1.0 } else { -1.0 };
    let model = best.into_model(&problems[sign_idx], s.inputs, k, da, db);
    // Report the value of the returned model on the original functional.
    let b = bell_operator(m, &model.alice, &model.bob)?;
    let QuantumState::Pure(psi) = &model.state else { unreachable!("see-saw states are pure") };
    let value = (sign * b.quad_form(psi)).max(0.0);
    Ok(SeesawResult {
        report: SolveReport {
            value,
            certificate: Certificate::LowerBound,
            iterations,
            residual,
        },
        model,
        sign,
        monotone,
        runs: count,
    })
}

fn silent_model(n: usize, k: usize, da: usize, db: usize) -> QuantumModel {
    let mut psi = vec![0.0; da * db];
    psi[0] = 1.0;
    QuantumModel {
        dim_a: da,
        dim_b: db,
        state: QuantumState::Pure(psi),
        alice: vec![vec![Matrix::zeros(da, da); k]; n],
        bob: vec![vec![Matrix::zeros(db, db); k]; n],
        complete: false,
    }
}

/// Normalized, signed coefficients and the outputs that carry weight.
struct Problem {
    n: usize,
    k: usize,
    coef: Vec<f64>,
    alice_active: Vec<Vec<usize>>,
    bob_active: Vec<Vec<usize>>,
}

enum Start {
    Random(RngStream),
    /// Measurements on active outputs and a state.
    Given(Configuration),
}

#[derive(Clone)]
struct Configuration {
    alice: Vec<Vec<Matrix>>,
    bob: Vec<Vec<Matrix>>,
    psi: Vec<f64>,
}

struct Run {
    value: f64,
    config: Configuration,
    sweeps: u64,
    max_gap: f64,
    monotone: bool,
    sign_idx: usize,
}

impl Run {
    fn into_model(self, p: &Problem, n: usize, k: usize, da: usize, db: usize) -> QuantumModel {
        let mut model = silent_model(n, k, da, db);
        for x in 0..n {
            for (slot, &a) in p.alice_active[x].iter().enumerate() {
                model.alice[x][a] = self.config.alice[x][slot].clone();
            }
            for (slot, &b) in p.bob_active[x].iter().enumerate() {
                model.bob[x][b] = self.config.bob[x][slot].clone();
            }
        }
        model.state = QuantumState::Pure(self.config.psi);
        model
    }
}

impl Problem {
    fn new(m: &BellFunctional, scale: f64, sign: f64) -> Self {
        let s = m.scenario();
        let k = s.effective_outputs();
        let c = sign / scale;
        Self {
            n: s.inputs,
            k,
            coef: m.as_slice().iter().map(|v| c * v).collect(),
            alice_active: (0..s.inputs)
                .map(|x| (0..k).filter(|&a| !m.alice_output_is_null(x, a)).collect())
                .collect(),
            bob_active: (0..s.inputs)
                .map(|y| (0..k).filter(|&b| !m.bob_output_is_null(y, b)).collect())
                .collect(),
        }
    }

    #[inline]
    fn c(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.coef[((x * self.n + y) * self.k + a) * self.k + b]
    }

    /// Rewards for Alice's active outputs given Bob's elements and the state.
    fn alice_rewards(&self, cfg: &Configuration, psi: &Matrix) -> Vec<Vec<Matrix>> {
        let pt = psi.transpose();
        let phi: Vec<Vec<Matrix>> = cfg
            .bob
            .iter()
            .map(|elems| elems.iter().map(|f| psi.matmul(f).matmul(&pt)).collect())
            .collect();
        let da = psi.rows();
        (0..self.n)
            .map(|x| {
                self.alice_active[x]
                    .iter()
                    .map(|&a| {
                        let mut r = Matrix::zeros(da, da);
                        for y in 0..self.n {
                            for (slot, &b) in self.bob_active[y].iter().enumerate() {
                                let c = self.c(x, y, a, b);
                                if c != 0.0 {
                                    r.add_scaled(c, &phi[y][slot]);
                                }
                            }
                        }
                        r.symmetrized()
                    })
                    .collect()
            })
            .collect()
    }

    fn bob_rewards(&self, cfg: &Configuration, psi: &Matrix) -> Vec<Vec<Matrix>> {
        let pt = psi.transpose();
        let xi: Vec<Vec<Matrix>> = cfg
            .alice
            .iter()
            .map(|elems| elems.iter().map(|e| pt.matmul(e).matmul(psi)).collect())
            .collect();
        let db = psi.cols();
        (0..self.n)
            .map(|y| {
                self.bob_active[y]
                    .iter()
                    .map(|&b| {
                        let mut r = Matrix::zeros(db, db);
                        for x in 0..self.n {
                            for (slot, &a) in self.alice_active[x].iter().enumerate() {
                                let c = self.c(x, y, a, b);
                                if c != 0.0 {
                                    r.add_scaled(c, &xi[x][slot]);
                                }
                            }
                        }
                        r.symmetrized()
                    })
                    .collect()
            })
            .collect()
    }

    fn operator(&self, cfg: &Configuration, da: usize, db: usize) -> Matrix {
        let mut out = Matrix::zeros(da * db, da * db);
        for x in 0..self.n {
            for (slot, &a) in self.alice_active[x].iter().enumerate() {
                let mut w = Matrix::zeros(db, db);
                for y in 0..self.n {
                    for (sb, &b) in self.bob_active[y].iter().enumerate() {
                        let c = self.c(x, y, a, b);
                        if c != 0.0 {
                            w.add_scaled(c, &cfg.bob[y][sb]);
                        }
                    }
                }
                out = out.add(&cfg.alice[x][slot].kron(&w));
            }
        }
        out.symmetrized()
    }

    fn random_side(&self, g: &mut GaussianSampler, active: &[Vec<usize>], d: usize) -> Vec<Vec<Matrix>> {
        active
            .iter()
            .map(|outs| {
                let mut elems = vec![Matrix::zeros(d, d); outs.len()];
                if outs.is_empty() {
                    return elems;
                }
                // Spread the frame over the outputs so measurements start non-trivial.
                let frame = orthonormal_columns(&g.matrix(d, d));
                let offset = g.below(outs.len());
                for col in 0..d {
                    let v = frame.column(col);
                    let slot = (offset + col) % outs.len();
                    elems[slot] = elems[slot].add(&Matrix::outer(&v, &v));
                }
                elems
            })
            .collect()
    }

    fn run(&self, start: Start, da: usize, db: usize, cfg: &SeesawConfig) -> Result<Run> {
        let mut config = match start {
            Start::Given(c) => c,
            Start::Random(stream) => {
                let mut g = GaussianSampler::new(stream);
                let alice = self.random_side(&mut g, &self.alice_active, da);
                let bob = self.random_side(&mut g, &self.bob_active, db);
                let mut c = Configuration {
                    alice,
                    bob,
                    psi: vec![0.0; da * db],
                };
                c.psi = optimize_state(&self.operator(&c, da, db))?.0;
                c
            }
        };
        let op = self.operator(&config, da, db);
        let mut value = op.quad_form(&config.psi);
        // The state step alone can only improve a supplied configuration.
        let (psi, top) = optimize_state(&op)?;
        if top > value {
            config.psi = psi;
            value = top;
        }
        let mut monotone = true;
        let mut max_gap = 0.0f64;
        let mut sweeps = 0u64;
        let slack = |v: f64| 1e-12 * v.abs().max(1.0);
        while sweeps < cfg.max_sweeps as u64 {
            sweeps += 1;
            let start_value = value;
            let psi_m = Matrix::from_row_major(da, db, config.psi.clone())?;

            let rewards = self.alice_rewards(&config, &psi_m);
            let mut total = 0.0;
            for (x, r) in rewards.iter().enumerate() {
                if r.is_empty() {
                    continue;
                }
                let sol = optimize_povm_input(r, false, Some(&config.alice[x]))?;
                max_gap = max_gap.max(sol.gap);
                total += sol.value;
                config.alice[x] = sol.elements;
            }
            monotone &= total >= value - slack(value);
            value = total;

            let rewards = self.bob_rewards(&config, &psi_m);
            let mut total = 0.0;
            for (y, r) in rewards.iter().enumerate() {
                if r.is_empty() {
                    continue;
                }
                let sol = optimize_povm_input(r, false, Some(&config.bob[y]))?;
                max_gap = max_gap.max(sol.gap);
                total += sol.value;
                config.bob[y] = sol.elements;
            }
            monotone &= total >= value - slack(value);
            value = total;

            let (psi, top) = optimize_state(&self.operator(&config, da, db))?;
            monotone &= top >= value - slack(value);
            config.psi = psi;
            value = top;

            if value - start_value < cfg.tol * value.abs().max(1.0) {
                break;
            }
        }
        debug_assert!(monotone, "see-saw objective decreased");
        debug_assert!(max_gap <= POVM_GAP);
        Ok(Run {
            value,
            config,
            sweeps,
            max_gap,
            monotone,
            sign_idx: 0,
        })
    }
}

fn classical_start(p: &Problem, c: &ClassicalBound, da: usize, db: usize) -> Configuration {
    let side = |choices: &[Option<usize>], active: &[Vec<usize>], d: usize| -> Vec<Vec<Matrix>> {
        active
            .iter()
            .zip(choices)
            .map(|(outs, choice)| {
                outs.iter()
                    .map(|&o| {
                        let mut e = Matrix::zeros(d, d);
                        if *choice == Some(o) {
                            e[(0, 0)] = 1.0;
                        }
                        e
                    })
                    .collect()
            })
            .collect()
    };
    let mut psi = vec![0.0; da * db];
    psi[0] = 1.0;
    Configuration {
        alice: side(&c.alice, &p.alice_active, da),
        bob: side(&c.bob, &p.bob_active, db),
        psi,
    }
}

fn embed_model(p: &Problem, q: &QuantumModel, da: usize, db: usize) -> Result<Configuration> {
    if q.dim_a > da || q.dim_b > db || q.alice.len() != p.n || q.outputs() != p.k {
        return Err(Error::Shape("warm-start model does not fit the see-saw problem".into()));
    }
    let pad = |e: &Matrix, d: usize| Matrix::from_fn(d, d, |i, j| if i < e.rows() && j < e.cols() { e[(i, j)] } else { 0.0 });
    let side = |povms: &[Vec<Matrix>], active: &[Vec<usize>], d: usize| -> Vec<Vec<Matrix>> {
        active
            .iter()
            .zip(povms)
            .map(|(outs, elems)| outs.iter().map(|&o| pad(&elems[o], d)).collect())
            .collect()
    };
    let QuantumState::Pure(small) = &q.state else {
        return Err(Error::Invalid("warm-start model must have a pure state".into()));
    };
    let mut psi = vec![0.0; da * db];
    for i in 0..q.dim_a {
        for j in 0..q.dim_b {
            psi[i * db + j] = small[i * q.dim_b + j];
        }
    }
    Ok(Configuration {
        alice: side(&q.alice, &p.alice_active, da),
        bob: side(&q.bob, &p.bob_active, db),
        psi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerances;
    use crate::model::tensor::pad_functional;
    use crate::model::{behavior_from_quantum, pair, Scenario};

    #[test]
    fn identity_operator() {
        let s = Scenario::new(1, 1, false).unwrap();
        let m = BellFunctional::new(s, vec![1.0]).unwrap();
        let e = vec![vec![Matrix::identity(2)]];
        let b = bell_operator(&m, &e, &e).unwrap();
        assert_eq!(b, Matrix::identity(4));
        let z = bell_operator(&BellFunctional::zeros(s), &e, &e).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn optimize_state_diagonal() {
        let (v, val) = optimize_state(&Matrix::diag(&[3.0, 1.0])).unwrap();
        assert_eq!(val, 3.0);
        assert!((v[0] - 1.0).abs() < 1e-15 && v[1].abs() < 1e-15);
        assert_eq!(optimize_state(&Matrix::zeros(2, 2)).unwrap().1, 0.0);
    }

    #[test]
    fn chsh_reaches_tsirelson() {
        let cfg = SeesawConfig::new((2, 2), RngStream::new(1, 0));
        let r = seesaw(&BellFunctional::chsh(), &cfg).unwrap();
        assert!(r.report.value >= 2.0 * 2f64.sqrt() - 1e-4, "{}", r.report.value);
        assert!(r.report.value <= 2.0 * 2f64.sqrt() + 1e-9);
        assert!(r.monotone);
        assert!(r.report.residual <= POVM_GAP);
        let tol = Tolerances::default();
        let p = behavior_from_quantum(&r.model, &tol).unwrap();
        let v = r.sign * pair(&BellFunctional::chsh(), &p).unwrap();
        assert!((v - r.report.value).abs() < 1e-9);
    }

    #[test]
    fn zero_functional() {
        let cfg = SeesawConfig::new((2, 2), RngStream::new(1, 0)).with_restarts(2);
        let r = seesaw(&BellFunctional::zeros(Scenario::chsh()), &cfg).unwrap();
        assert_eq!(r.report.value, 0.0);
    }

    #[test]
    fn padding_gives_identical_values() {
        let cfg = SeesawConfig::new((2, 2), RngStream::new(5, 0)).with_restarts(3);
        let m = BellFunctional::chsh();
        let a = seesaw(&m, &cfg).unwrap();
        let b = seesaw(&pad_functional(&m), &cfg).unwrap();
        assert_eq!(a.report.value, b.report.value);
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = SeesawConfig::new((0, 2), RngStream::new(1, 0));
        assert!(seesaw(&BellFunctional::chsh(), &cfg).is_err());
        cfg.dims = (2, 2);
        cfg.tol = 0.0;
        assert!(seesaw(&BellFunctional::chsh(), &cfg).is_err());
    }
}
