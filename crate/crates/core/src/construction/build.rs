use serde::{Deserialize, Serialize};

use super::params::ConstructionParams;
use crate::error::{Error, Result};
use crate::model::{BellFunctional, Scenario};
use crate::solvers::linalg::{svd, Matrix};
use crate::solvers::rng::{gaussian_matrix, RngStream};

/// Largest admissible `m^n`.
pub const MAX_INPUTS: u128 = 100_000;
/// Largest admissible tensor, `(m^n)²·n²` entries.
pub const MAX_TENSOR_ENTRIES: u128 = 200_000_000;

/// Singular data of `G/√m` and the retained subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceData {
    /// All `n` singular values of `G/√m`, descending.
    pub singular_values: Vec<f64>,
    /// Retained unit vectors `v_l ∈ R^n`, one per singular value `≥ σ_threshold`.
    pub vectors: Vec<Vec<f64>>,
    pub k: usize,
    /// Inversion weights `1/s_l²` of the retained directions (each `≤ 1/σ_threshold²`).
    pub weights: Vec<f64>,
}

/// The Gaussian sample of a parameter set: stream `(seed, 0)`, `n×m`, row-major draws.
pub fn sample_gaussian(params: &ConstructionParams) -> Matrix {
    gaussian_matrix(params.n, params.m, RngStream::new(params.seed, 0))
}

/// Singular subspace of `G/√m` viewed as a map `R^n → R^m`; directions whose
/// singular value reaches the threshold are retained.
pub fn singular_subspace(g: &Matrix, params: &ConstructionParams) -> Result<SubspaceData> {
    if g.rows() != params.n || g.cols() != params.m {
        return Err(Error::Shape(format!(
            "G is {}x{}, expected {}x{}",
            g.rows(),
            g.cols(),
            params.n,
            params.m
        )));
    }
    let scaled = g.scaled(1.0 / (params.m as f64).sqrt());
    let d = svd(&scaled);
    let singular_values: Vec<f64> = d.singular_values[..params.n].to_vec();
    let mut vectors = Vec::new();
    let mut weights = Vec::new();
    for (l, &s) in singular_values.iter().enumerate() {
        if s >= params.sigma_threshold {
            vectors.push(d.u.column(l));
            weights.push(1.0 / (s * s));
        }
    }
    Ok(SubspaceData {
        singular_values,
        k: vectors.len(),
        vectors,
        weights,
    })
}

/// Input `ω ∈ [m]^n` ↔ index `Σ_k ω_k m^{n−1−k}` (first coordinate most significant).
pub fn decode_input(index: usize, n: usize, m: usize) -> Vec<usize> {
    let mut omega = vec![0; n];
    let mut c = index;
    for slot in omega.iter_mut().rev() {
        *slot = c % m;
        c /= m;
    }
    omega
}

/// The constructed functional `M_{ω,ω'}^{k,k'} = Σ_l u_l(ω_k) u_l(ω'_{k'})`
/// with `u_l(j) = Σ_i v_{l,i} g_{ij}`, on `m^n` inputs and `n` outputs.
pub fn build_bell_functional(params: &ConstructionParams) -> Result<(BellFunctional, SubspaceData)> {
    let inputs = params.inputs();
    if inputs > MAX_INPUTS {
        return Err(Error::budget("constructed functional inputs m^n", inputs as f64, MAX_INPUTS as f64));
    }
    let entries = inputs
        .saturating_mul(inputs)
        .saturating_mul((params.n * params.n) as u128);
    if entries > MAX_TENSOR_ENTRIES {
        return Err(Error::budget("constructed tensor entries", entries as f64, MAX_TENSOR_ENTRIES as f64));
    }
    let g = sample_gaussian(params);
    let sub = singular_subspace(&g, params)?;
    if sub.k == 0 {
        return Err(Error::Infeasible(format!(
            "no singular value of G/sqrt(m) reaches {} (largest {:.4})",
            params.sigma_threshold,
            sub.singular_values.first().copied().unwrap_or(0.0)
        )));
    }
    let (n, m) = (params.n, params.m);
    // u_l(j) for every retained l, then the symmetric m×m kernel A = Σ_l u_l u_lᵀ.
    let u: Vec<Vec<f64>> = sub.vectors.iter().map(|v| g.tmatvec(v)).collect();
    let kernel = Matrix::from_fn(m, m, |j, j2| {
        let mut s = 0.0;
        for ul in &u {
            s += ul[j] * ul[j2];
        }
        s
    });
    let big_n = inputs as usize;
    let scenario = Scenario::new(big_n, n, false)?;
    let omegas: Vec<Vec<usize>> = (0..big_n).map(|i| decode_input(i, n, m)).collect();
    let mut data = vec![0.0; scenario.tensor_len()];
    for (x, wx) in omegas.iter().enumerate() {
        for (y, wy) in omegas.iter().enumerate() {
            for (a, &ja) in wx.iter().enumerate() {
                for (b, &jb) in wy.iter().enumerate() {
                    data[scenario.index(x, y, a, b)] = kernel[(ja, jb)];
                }
            }
        }
    }
    Ok((BellFunctional::new(scenario, data)?, sub))
}

/// Largest deviation from `M_{x,y}^{a,b} = M_{y,x}^{b,a}`.
pub fn swap_asymmetry(m: &BellFunctional) -> f64 {
    let s = m.scenario();
    let k = s.effective_outputs();
    let mut worst = 0.0f64;
    for x in 0..s.inputs {
        for y in 0..s.inputs {
            for a in 0..k {
                for b in 0..k {
                    worst = worst.max((m.get(x, y, a, b) - m.get(y, x, b, a)).abs());
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_sample_keeps_everything() {
        let p = ConstructionParams::with_m(2, 4.0, 4, 0).unwrap();
        // G Gᵀ = m·I, so every singular value of G/√m is 1.
        let g = Matrix::from_fn(2, 4, |i, j| if j % 2 == i { 2f64.sqrt() } else { 0.0 });
        let s = singular_subspace(&g, &p).unwrap();
        assert_eq!(s.k, 2);
        for v in &s.singular_values {
            assert!((v - 1.0).abs() < 1e-12);
        }
        assert!(s.weights.iter().all(|w| (w - 1.0).abs() < 1e-12));
    }

    #[test]
    fn zero_sample_keeps_nothing() {
        let p = ConstructionParams::with_m(2, 4.0, 4, 0).unwrap();
        let s = singular_subspace(&Matrix::zeros(2, 4), &p).unwrap();
        assert_eq!(s.k, 0);
    }

    #[test]
    fn frobenius_identity() {
        let p = ConstructionParams::new(3, 3.0, 9).unwrap();
        let g = sample_gaussian(&p);
        let s = singular_subspace(&g, &p).unwrap();
        let lhs: f64 = s.singular_values.iter().map(|v| v * v).sum();
        let rhs = g.frobenius_norm().powi(2) / p.m as f64;
        assert!((lhs - rhs).abs() < 1e-8 * rhs.max(1.0));
    }

    #[test]
    fn n2_q4_shape_symmetry_and_determinism() {
        let p = ConstructionParams::new(2, 4.0, 7).unwrap();
        let (m, sub) = build_bell_functional(&p).unwrap();
        assert_eq!(*m.scenario(), Scenario::new(16, 2, false).unwrap());
        assert_eq!(m.as_slice().len(), 16 * 16 * 2 * 2);
        assert!(sub.k >= 1);
        assert_eq!(swap_asymmetry(&m), 0.0);
        let (again, _) = build_bell_functional(&p).unwrap();
        assert_eq!(m.as_slice(), again.as_slice());
    }

    #[test]
    fn degenerate_n1() {
        let p = ConstructionParams::new(1, 3.0, 3).unwrap();
        let g = sample_gaussian(&p);
        match build_bell_functional(&p) {
            Ok((m, _)) => assert!((m.as_slice()[0] - g[(0, 0)].powi(2)).abs() < 1e-12),
            Err(e) => assert!(g[(0, 0)].abs() < 0.5, "{e}"),
        }
    }

    #[test]
    fn refuses_oversized_instances() {
        let p = ConstructionParams::new(5, 4.0, 0).unwrap();
        assert!(matches!(build_bell_functional(&p), Err(Error::Budget { .. })));
    }

    #[test]
    fn input_decoding() {
        assert_eq!(decode_input(0, 2, 4), vec![0, 0]);
        assert_eq!(decode_input(6, 2, 4), vec![1, 2]);
        assert_eq!(decode_input(15, 2, 4), vec![3, 3]);
    }
}
