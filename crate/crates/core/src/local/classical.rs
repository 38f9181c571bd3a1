//! Classical bound `B_C(M) = sup |⟨M, P⟩|` over incomplete local behaviors.
//!
//! The sup of `|⟨M, p ⊗ q⟩|` over a product of polytopes is attained at
//! vertices: every input either answers one output or stays silent (`⊥`).
//! For a fixed vertex of one party the other party's best answer is
//! closed form (pick the largest positive or most negative score per input),
//! so only one side is enumerated. Outputs whose coefficient slice vanishes
//! are equivalent to silence and are dropped from the enumeration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Settings;
use crate::error::{Error, Result};
use crate::model::BellFunctional;
use crate::report::{Certificate, SolveReport};
use crate::solvers::rng::{GaussianSampler, RngStream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundMode {
    Exact,
    /// Alternating best responses from `restarts` random vertices.
    Heuristic { restarts: usize, stream: RngStream },
}

/// Classical optimum with an optimal deterministic strategy pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalBound {
    pub report: SolveReport,
    /// Alice's answer per input; `None` means no click (`⊥`).
    pub alice: Vec<Option<usize>>,
    pub bob: Vec<Option<usize>>,
    /// `+1` when the optimum is `⟨M, P⟩`, `−1` when it is `−⟨M, P⟩`.
    pub sign: f64,
}

pub fn classical_bound(m: &BellFunctional, mode: BoundMode, settings: &Settings) -> Result<ClassicalBound> {
    match mode {
        BoundMode::Exact => exact_bound(m, settings.budget),
        BoundMode::Heuristic { restarts, stream } => Ok(heuristic_bound(m, restarts, stream)),
    }
}

/// Exact when the enumeration fits the budget, otherwise the heuristic with a
/// lower-bound certificate.
pub fn classical_bound_auto(
    m: &BellFunctional,
    settings: &Settings,
    restarts: usize,
    stream: RngStream,
) -> Result<ClassicalBound> {
    match exact_bound(m, settings.budget) {
        Err(Error::Budget { needed, budget, .. }) => {
            log::info!("exact classical bound needs {needed:.3e} > budget {budget:.3e}; using heuristic");
            Ok(heuristic_bound(m, restarts, stream))
        }
        other => other,
    }
}

/// Non-null outputs per input for each party.
struct Supports {
    alice: Vec<Vec<usize>>,
    bob: Vec<Vec<usize>>,
}

fn supports(m: &BellFunctional) -> Supports {
    let s = m.scenario();
    let k = s.effective_outputs();
    let alice = (0..s.inputs)
        .map(|x| (0..k).filter(|&a| !m.alice_output_is_null(x, a)).collect())
        .collect();
    let bob = (0..s.inputs)
        .map(|y| (0..k).filter(|&b| !m.bob_output_is_null(y, b)).collect())
        .collect();
    Supports { alice, bob }
}

fn product(radices: impl Iterator<Item = usize>) -> u128 {
    radices.fold(1u128, |acc, r| acc.saturating_mul(r as u128))
}

/// `⟨M, P⟩` for a deterministic incomplete strategy pair.
pub fn strategy_value(m: &BellFunctional, alice: &[Option<usize>], bob: &[Option<usize>]) -> f64 {
    let mut v = 0.0;
    for (x, a) in alice.iter().enumerate() {
        let Some(a) = a else { continue };
        for (y, b) in bob.iter().enumerate() {
            if let Some(b) = b {
                v += m.get(x, y, *a, *b);
            }
        }
    }
    v
}

/// Alice's best answers against a fixed Bob vertex, for the given sign.
fn alice_response(m: &BellFunctional, bob: &[Option<usize>], sign: f64, support: &[Vec<usize>]) -> Vec<Option<usize>> {
    support
        .iter()
        .enumerate()
        .map(|(x, outs)| {
            let mut best: Option<(usize, f64)> = None;
            for &a in outs {
                let mut r = 0.0;
                for (y, b) in bob.iter().enumerate() {
                    if let Some(b) = b {
                        r += m.get(x, y, a, *b);
                    }
                }
                let r = sign * r;
                if r > 0.0 && best.map_or(true, |(_, v)| r > v) {
                    best = Some((a, r));
                }
            }
            best.map(|(a, _)| a)
        })
        .collect()
}

fn exact_bound(m: &BellFunctional, budget: u64) -> Result<ClassicalBound> {
    let sup = supports(m);
    let alice_count = product(sup.alice.iter().map(|v| v.len() + 1));
    let bob_count = product(sup.bob.iter().map(|v| v.len() + 1));
    // Enumerate the cheaper side; the other answers in closed form.
    if alice_count < bob_count {
        let mut swapped = exact_bound(&m.swapped(), budget)?;
        std::mem::swap(&mut swapped.alice, &mut swapped.bob);
        return Ok(swapped);
    }
    if bob_count > u128::from(budget) {
        return Err(Error::budget("exact classical bound", bob_count as f64, budget as f64));
    }
    let s = m.scenario();
    let n = s.inputs;
    // Score vector layout: concatenation over x of Alice's supported outputs.
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    for outs in &sup.alice {
        offsets.push(offsets.last().unwrap() + outs.len());
    }
    let width = *offsets.last().unwrap();
    // columns[y][c]: score contribution of Bob's choice c (0 = silent).
    let columns: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|y| {
            let mut cols = vec![vec![0.0; width]];
            for &b in &sup.bob[y] {
                let mut col = Vec::with_capacity(width);
                for (x, outs) in sup.alice.iter().enumerate() {
                    col.extend(outs.iter().map(|&a| m.get(x, y, a, b)));
                }
                cols.push(col);
            }
            cols
        })
        .collect();
    let radices: Vec<usize> = columns.iter().map(Vec::len).collect();

    // Split the digit string into a parallel prefix and a Gray-coded suffix.
    const SUFFIX_TARGET: u128 = 1 << 17;
    let mut split = n;
    let mut suffix_size = 1u128;
    while split > 0 && suffix_size * radices[split - 1] as u128 <= SUFFIX_TARGET {
        split -= 1;
        suffix_size *= radices[split] as u128;
    }
    let prefix_radices = &radices[..split];
    let prefix_count = product(prefix_radices.iter().copied()) as u64;

    let engine = Engine {
        columns: &columns,
        offsets: &offsets,
        radices: &radices,
        split,
        uniform: {
            let w = offsets.get(1).copied().unwrap_or(0);
            offsets.windows(2).all(|o| o[1] - o[0] == w).then_some(w)
        },
    };
    let best = (0..prefix_count)
        .into_par_iter()
        .map(|code| {
            let mut prefix = vec![0usize; split];
            let mut c = code;
            for i in (0..split).rev() {
                prefix[i] = (c % prefix_radices[i] as u64) as usize;
                c /= prefix_radices[i] as u64;
            }
            engine.run_chunk(&prefix)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(None::<ChunkBest>, |acc, cur| match acc {
            Some(a) if a.score >= cur.score => Some(a),
            _ => Some(cur),
        })
        .expect("at least one chunk");

    let bob: Vec<Option<usize>> = best
        .digits
        .iter()
        .enumerate()
        .map(|(y, &c)| if c == 0 { None } else { Some(sup.bob[y][c - 1]) })
        .collect();
    // Recompute the optimum exactly from the winning vertex.
    let plus = alice_response(m, &bob, 1.0, &sup.alice);
    let minus = alice_response(m, &bob, -1.0, &sup.alice);
    let vp = strategy_value(m, &plus, &bob);
    let vm = -strategy_value(m, &minus, &bob);
    let (value, alice, sign) = if vp >= vm { (vp, plus, 1.0) } else { (vm, minus, -1.0) };
    let value = value.max(0.0);
    Ok(ClassicalBound {
        report: SolveReport {
            value,
            certificate: Certificate::Exact,
            iterations: bob_count as u64,
            residual: (value - best.score).abs(),
        },
        alice,
        bob,
        sign,
    })
}

struct ChunkBest {
    score: f64,
    digits: Vec<usize>,
}

struct Engine<'a> {
    columns: &'a [Vec<Vec<f64>>],
    offsets: &'a [usize],
    radices: &'a [usize],
    split: usize,
    /// Common block width, when every input has the same number of outputs.
    uniform: Option<usize>,
}

impl Engine<'_> {
    #[inline]
    fn score(&self, r: &[f64]) -> f64 {
        #[inline(always)]
        fn mx(a: f64, b: f64) -> f64 {
            if a > b { a } else { b }
        }
        #[inline(always)]
        fn mn(a: f64, b: f64) -> f64 {
            if a < b { a } else { b }
        }
        let mut pos = 0.0;
        let mut neg = 0.0;
        match self.uniform {
            // Two outputs per input is the common case; keep it branch-free.
            Some(2) => {
                for c in r.chunks_exact(2) {
                    pos += mx(mx(c[0], c[1]), 0.0);
                    neg += mn(mn(c[0], c[1]), 0.0);
                }
            }
            Some(w) if w > 0 => {
                for c in r.chunks_exact(w) {
                    let (mut hi, mut lo) = (0.0, 0.0);
                    for &v in c {
                        hi = mx(hi, v);
                        lo = mn(lo, v);
                    }
                    pos += hi;
                    neg += lo;
                }
            }
            _ => {
                for w in self.offsets.windows(2) {
                    let (mut hi, mut lo) = (0.0, 0.0);
                    for &v in &r[w[0]..w[1]] {
                        hi = mx(hi, v);
                        lo = mn(lo, v);
                    }
                    pos += hi;
                    neg += lo;
                }
            }
        }
        mx(pos, -neg)
    }

    /// Reflected mixed-radix Gray code over the suffix digits (Knuth's
    /// loopless algorithm H); one column update per visited vertex.
    fn run_chunk(&self, prefix: &[usize]) -> ChunkBest {
        let n = self.radices.len();
        let mut digits = vec![0usize; n];
        digits[..self.split].copy_from_slice(prefix);
        let width = self.offsets[self.offsets.len() - 1];
        let mut r = vec![0.0; width];
        for (y, &c) in digits.iter().enumerate() {
            for (acc, v) in r.iter_mut().zip(&self.columns[y][c]) {
                *acc += v;
            }
        }
        let mut best = ChunkBest {
            score: self.score(&r),
            digits: digits.clone(),
        };
        let active: Vec<usize> = (self.split..n).filter(|&y| self.radices[y] > 1).collect();
        let len = active.len();
        let mut focus: Vec<usize> = (0..=len).collect();
        let mut dir = vec![1isize; len];
        loop {
            let j = focus[0];
            focus[0] = 0;
            if j == len {
                break;
            }
            let y = active[j];
            let old = digits[y];
            let new = (old as isize + dir[j]) as usize;
            digits[y] = new;
            let (co, cn) = (&self.columns[y][old], &self.columns[y][new]);
            for ((acc, o), nv) in r.iter_mut().zip(co).zip(cn) {
                *acc += nv - o;
            }
            if new == 0 || new == self.radices[y] - 1 {
                dir[j] = -dir[j];
                focus[j] = focus[j + 1];
                focus[j + 1] = j + 1;
            }
            let s = self.score(&r);
            if s > best.score {
                best.score = s;
                best.digits.copy_from_slice(&digits);
            }
        }
        best
    }
}

fn heuristic_bound(m: &BellFunctional, restarts: usize, stream: RngStream) -> ClassicalBound {
    let sup = supports(m);
    let restarts = restarts.max(1);
    let runs: Vec<(f64, Vec<Option<usize>>, Vec<Option<usize>>, f64, u64)> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let mut g = GaussianSampler::new(stream.split(i as u64));
            let start: Vec<Option<usize>> = sup
                .bob
                .iter()
                .map(|outs| {
                    let c = g.below(outs.len() + 1);
                    (c > 0).then(|| outs[c - 1])
                })
                .collect();
            let mut best = (f64::NEG_INFINITY, vec![], vec![], 1.0, 0u64);
            for sign in [1.0, -1.0] {
                let (v, a, b, it) = alternate(m, &sup, start.clone(), sign);
                best.4 += it;
                if v > best.0 {
                    best = (v, a, b, sign, best.4);
                }
            }
            best
        })
        .collect();
    let iterations = runs.iter().map(|r| r.4).sum();
    let (value, alice, bob, sign, _) = runs
        .into_iter()
        .fold(None, |acc: Option<(f64, _, _, f64, u64)>, cur| match acc {
            Some(a) if a.0 >= cur.0 => Some(a),
            _ => Some(cur),
        })
        .expect("at least one restart");
    ClassicalBound {
        report: SolveReport {
            value: value.max(0.0),
            certificate: Certificate::LowerBound,
            iterations,
            residual: 0.0,
        },
        alice,
        bob,
        sign,
    }
}

/// Best-response iteration for `sign · ⟨M, P⟩`; returns the value reached.
fn alternate(
    m: &BellFunctional,
    sup: &Supports,
    mut bob: Vec<Option<usize>>,
    sign: f64,
) -> (f64, Vec<Option<usize>>, Vec<Option<usize>>, u64) {
    let mswap = m.swapped();
    let mut value = f64::NEG_INFINITY;
    let mut alice = vec![None; bob.len()];
    let mut iterations = 0;
    loop {
        iterations += 1;
        alice = alice_response(m, &bob, sign, &sup.alice);
        bob = alice_response(&mswap, &alice, sign, &sup.bob);
        let v = sign * strategy_value(m, &alice, &bob);
        if v <= value + 1e-15 * value.abs().max(1.0) || iterations > 10_000 {
            value = value.max(v);
            break;
        }
        value = v;
    }
    (value, alice, bob, iterations)
}

/// `‖M‖_ε` over products of signed strategies (`Σ_a |P(x,a)| ≤ 1`), which
/// satisfies `B_C ≤ ‖M‖_ε ≤ 4 B_C`. Enumerates Bob's `(2K')^N` signed vertices.
pub fn signed_bound(m: &BellFunctional, budget: u64) -> Result<SolveReport> {
    let s = m.scenario();
    let k = s.effective_outputs();
    let n = s.inputs;
    let count = product((0..n).map(|_| 2 * k));
    if count > u128::from(budget) {
        return Err(Error::budget("signed strategy enumeration", count as f64, budget as f64));
    }
    let strategies = super::enumerate::enumerate_deterministic(s, true, budget)?;
    let mut best = 0.0f64;
    for q in strategies {
        let mut total = 0.0;
        for x in 0..n {
            let mut top = 0.0f64;
            for a in 0..k {
                let r: f64 = q
                    .choices
                    .iter()
                    .enumerate()
                    .map(|(y, &(b, sg))| f64::from(sg) * m.get(x, y, a, b))
                    .sum();
                top = top.max(r.abs());
            }
            total += top;
        }
        best = best.max(total);
    }
    Ok(SolveReport {
        value: best,
        certificate: Certificate::Exact,
        iterations: count as u64,
        residual: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{pad_functional, Scenario};

    /// Brute force over both parties' incomplete vertices.
    fn brute_force(m: &BellFunctional) -> f64 {
        let s = m.scenario();
        let k = s.effective_outputs();
        let n = s.inputs;
        let count = (k + 1).pow(n as u32);
        let decode = |mut c: usize| -> Vec<Option<usize>> {
            (0..n)
                .map(|_| {
                    let d = c % (k + 1);
                    c /= k + 1;
                    (d > 0).then(|| d - 1)
                })
                .collect()
        };
        let mut best = 0.0f64;
        for i in 0..count {
            for j in 0..count {
                best = best.max(strategy_value(m, &decode(i), &decode(j)).abs());
            }
        }
        best
    }

    pub(crate) fn random_functional(s: Scenario, seed: u64) -> BellFunctional {
        let mut g = GaussianSampler::new(RngStream::new(seed, 77));
        BellFunctional::from_fn(s, |_, _, _, _| g.sample())
    }

    #[test]
    fn zero_functional() {
        let r = classical_bound(&BellFunctional::zeros(Scenario::chsh()), BoundMode::Exact, &Settings::default())
            .unwrap();
        assert_eq!(r.report.value, 0.0);
    }

    #[test]
    fn chsh_is_two() {
        let r = classical_bound(&BellFunctional::chsh(), BoundMode::Exact, &Settings::default()).unwrap();
        assert_eq!(r.report.value, 2.0);
        assert_eq!(r.report.certificate, Certificate::Exact);
        let v = r.sign * strategy_value(&BellFunctional::chsh(), &r.alice, &r.bob);
        assert_eq!(v, 2.0);
    }

    #[test]
    fn exact_matches_brute_force() {
        for (i, (n, k)) in [(1, 1), (2, 2), (3, 2), (2, 3), (4, 2), (3, 3)].into_iter().enumerate() {
            for bottom in [false, true] {
                let s = Scenario::new(n, k, bottom).unwrap();
                let m = random_functional(s, i as u64 * 2 + u64::from(bottom));
                let exact = classical_bound(&m, BoundMode::Exact, &Settings::default()).unwrap();
                let brute = brute_force(&m);
                assert!((exact.report.value - brute).abs() <= 1e-12 * brute.max(1.0), "{n} {k}");
            }
        }
    }

    #[test]
    fn large_enumeration_uses_gray_code_chunks() {
        // 3^12 Bob vertices: more than one chunk and a long Gray-coded suffix.
        let s = Scenario::new(12, 2, false).unwrap();
        let m = random_functional(s, 5);
        let exact = classical_bound(&m, BoundMode::Exact, &Settings::default()).unwrap();
        let heur = classical_bound(
            &m,
            BoundMode::Heuristic { restarts: 200, stream: RngStream::new(1, 1) },
            &Settings::default(),
        )
        .unwrap();
        assert!(heur.report.value <= exact.report.value + 1e-12);
        assert!(exact.report.residual < 1e-9);
        let v = exact.sign * strategy_value(&m, &exact.alice, &exact.bob);
        assert_eq!(v, exact.report.value);
    }

    #[test]
    fn padding_does_not_change_cost_or_value() {
        let m = random_functional(Scenario::new(3, 2, false).unwrap(), 9);
        let a = classical_bound(&m, BoundMode::Exact, &Settings::default()).unwrap();
        let b = classical_bound(&pad_functional(&m), BoundMode::Exact, &Settings::default()).unwrap();
        assert_eq!(a.report.value, b.report.value);
        assert_eq!(a.report.iterations, b.report.iterations);
    }

    #[test]
    fn party_swap_symmetry() {
        let m = random_functional(Scenario::new(3, 2, false).unwrap(), 11);
        let sym = BellFunctional::combine(1.0, &m, 1.0, &m.swapped()).unwrap();
        let a = classical_bound(&sym, BoundMode::Exact, &Settings::default()).unwrap();
        let b = classical_bound(&sym.swapped(), BoundMode::Exact, &Settings::default()).unwrap();
        assert!((a.report.value - b.report.value).abs() <= 1e-10);
    }

    #[test]
    fn budget_is_enforced() {
        let m = random_functional(Scenario::new(8, 2, false).unwrap(), 3);
        let tight = Settings::default().with_budget(100);
        assert!(matches!(
            classical_bound(&m, BoundMode::Exact, &tight),
            Err(Error::Budget { .. })
        ));
        let auto = classical_bound_auto(&m, &tight, 10, RngStream::new(0, 0)).unwrap();
        assert_eq!(auto.report.certificate, Certificate::LowerBound);
    }

    #[test]
    fn signed_bound_within_factor_four() {
        for seed in 0..10 {
            let m = random_functional(Scenario::new(3, 2, false).unwrap(), 100 + seed);
            let bc = classical_bound(&m, BoundMode::Exact, &Settings::default()).unwrap().report.value;
            let eps = signed_bound(&m, 1_000_000).unwrap().value;
            assert!(bc <= eps + 1e-12 && eps <= 4.0 * bc + 1e-12, "{bc} {eps}");
        }
        assert_eq!(signed_bound(&BellFunctional::chsh(), 100).unwrap().value, 2.0);
    }
}
