//! Monte Carlo and identity checks for the probabilistic ingredients of the
//! construction. Every verifier reports the statistic, the threshold it is
//! compared against and the number of trials.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::params::ConstructionParams;
use crate::error::{Error, Result};
use crate::solvers::knorm::k_norm;
use crate::solvers::linalg::{min_eigenvalue, norm2, psd_sqrt, svd, sym_eig, Matrix};
use crate::solvers::rng::{gaussian_matrix, GaussianSampler, RngStream};

/// Largest sign enumeration the exact injective norms accept.
pub const SIGN_ENUMERATION_LIMIT: u32 = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifierStat {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub trials: usize,
    pub pass: bool,
    /// Scalar-level stand-in for a matrix-level quantity.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub proxy: bool,
}

impl VerifierStat {
    fn new(name: impl Into<String>, statistic: f64, threshold: f64, trials: usize, pass: bool) -> Self {
        Self {
            name: name.into(),
            statistic,
            threshold,
            trials,
            pass,
            proxy: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    L1,
    L2,
    Linf,
}

impl Space {
    pub fn norm(self, v: &[f64]) -> f64 {
        match self {
            Space::L1 => v.iter().map(|x| x.abs()).sum(),
            Space::L2 => norm2(v),
            Space::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    /// `w₂` of the unit vector basis: `sup {‖ξ‖₂ : ‖ξ‖_{X*} ≤ 1}` in dimension `d`.
    pub fn weak_two(self, d: usize) -> f64 {
        match self {
            Space::L1 => (d as f64).sqrt(),
            Space::L2 | Space::Linf => 1.0,
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::L1 => "l1",
            Space::L2 => "l2",
            Space::Linf => "linf",
        })
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(Space::L1),
            "l2" => Ok(Space::L2),
            "linf" | "l∞" => Ok(Space::Linf),
            other => Err(Error::Invalid(format!("unknown space `{other}` (expected l1, l2 or linf)"))),
        }
    }
}

/// All sign vectors of length `d` with first entry `+1` (the norms below are even).
fn sign_vectors(d: usize) -> impl Iterator<Item = Vec<f64>> {
    let count = 1u64 << d.saturating_sub(1);
    (0..count).map(move |code| {
        (0..d)
            .map(|i| if i == 0 || (code >> (i - 1)) & 1 == 0 { 1.0 } else { -1.0 })
            .collect()
    })
}

/// Injective norm of `G ∈ X ⊗ Y` (`G` is `n×m`, `X = ℓ_p^n`, `Y = ℓ_r^m`):
/// `sup {xᵀ G y : x ∈ B_{X*}, y ∈ B_{Y*}}`, by enumerating the extreme points
/// of a polyhedral dual ball.
pub fn injective_norm(g: &Matrix, x: Space, y: Space) -> Result<f64> {
    let (n, m) = (g.rows(), g.cols());
    let gt = g.transpose();
    let columns = || (0..m).map(|j| g.column(j));
    let rows = || (0..n).map(|i| g.row(i).to_vec());
    // Extreme points of B_{ℓ1} are ±e_i: the sup is a max over rows/columns.
    match (x, y) {
        (Space::L2, Space::L2) => Ok(svd(g).singular_values[0]),
        (Space::Linf, _) => Ok(rows().map(|r| y.norm(&r)).fold(0.0, f64::max)),
        (_, Space::Linf) => Ok(columns().map(|c| x.norm(&c)).fold(0.0, f64::max)),
        (Space::L1, _) if n <= m || y == Space::L2 => {
            check_signs(n)?;
            Ok(sign_vectors(n).map(|s| y.norm(&gt.matvec(&s))).fold(0.0, f64::max))
        }
        (_, Space::L1) => {
            check_signs(m)?;
            Ok(sign_vectors(m).map(|s| x.norm(&g.matvec(&s))).fold(0.0, f64::max))
        }
        _ => unreachable!("all pairs covered"),
    }
}

fn check_signs(d: usize) -> Result<()> {
    if d as u32 > SIGN_ENUMERATION_LIMIT {
        return Err(Error::budget(
            "sign enumeration",
            2f64.powi(d as i32 - 1),
            2f64.powi(SIGN_ENUMERATION_LIMIT as i32 - 1),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChevetReport {
    pub pair: (Space, Space),
    pub n: usize,
    pub m: usize,
    /// Mean injective norm over trials.
    pub mean: f64,
    /// `w₂(X)·E‖g‖_Y + w₂(Y)·E‖g‖_X`, expectations from the rows and
    /// columns of the same samples.
    pub bound: f64,
    pub stat: VerifierStat,
}

/// Chevet's inequality with constant `1`: `E‖Σ g_{st} e_s⊗e_t‖_ε ≤ w₂(X) E‖g‖_Y + w₂(Y) E‖g‖_X`;
/// passes when the mean is within 5% of the bound.
pub fn chevet_monte_carlo(
    pair: (Space, Space),
    n: usize,
    m: usize,
    trials: usize,
    stream: RngStream,
) -> Result<ChevetReport> {
    if n == 0 || m == 0 || trials == 0 {
        return Err(Error::Invalid("Chevet verifier needs n, m, trials ≥ 1".into()));
    }
    let (x, y) = pair;
    let samples: Vec<(f64, f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let g = gaussian_matrix(n, m, stream.split(i as u64));
            let eps = injective_norm(&g, x, y)?;
            // Rows are Gaussian vectors in R^m, columns in R^n.
            let ey = (0..n).map(|r| y.norm(g.row(r))).sum::<f64>() / n as f64;
            let ex = (0..m).map(|c| x.norm(&g.column(c))).sum::<f64>() / m as f64;
            Ok((eps, ey, ex))
        })
        .collect::<Result<Vec<_>>>()?;
    let t = trials as f64;
    let mean = samples.iter().map(|s| s.0).sum::<f64>() / t;
    let ey = samples.iter().map(|s| s.1).sum::<f64>() / t;
    let ex = samples.iter().map(|s| s.2).sum::<f64>() / t;
    let bound = x.weak_two(n) * ey + y.weak_two(m) * ex;
    let threshold = bound * 1.05;
    Ok(ChevetReport {
        pair,
        n,
        m,
        mean,
        bound,
        stat: VerifierStat::new(format!("chevet({x},{y})"), mean, threshold, trials, mean <= threshold),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianLemmaReport {
    pub n: usize,
    pub m: usize,
    /// Index (1-based) of the monitored singular value, `⌈δn⌉`.
    pub index: usize,
    /// Monitored singular value of `G/√m` per seed.
    pub values: Vec<f64>,
    pub fraction: f64,
    pub stat: VerifierStat,
}

/// Fraction of seeds with `s_{⌈δn⌉}(G/√m) ≥ 1/2`; passes at `≥ 0.95`.
pub fn gaussian_lemma_statistic(n: usize, m: usize, delta: f64, seeds: usize, stream: RngStream) -> Result<GaussianLemmaReport> {
    if n == 0 || m == 0 || seeds == 0 || !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Invalid("Gaussian singular-value statistic needs n, m, seeds ≥ 1 and δ ∈ (0, 1]".into()));
    }
    let index = ((delta * n as f64).ceil() as usize).clamp(1, n.min(m));
    let values: Vec<f64> = (0..seeds)
        .into_par_iter()
        .map(|i| {
            let g = gaussian_matrix(n, m, stream.split(i as u64));
            // Singular values of G/√m from the eigenvalues of G Gᵀ/m.
            let gram = g.matmul(&g.transpose()).scaled(1.0 / m as f64).symmetrized();
            let eig = sym_eig(&gram)?;
            Ok(eig.values[index - 1].max(0.0).sqrt())
        })
        .collect::<Result<Vec<_>>>()?;
    let hits = values.iter().filter(|&&v| v >= 0.5).count();
    let fraction = hits as f64 / seeds as f64;
    Ok(GaussianLemmaReport {
        n,
        m,
        index,
        values,
        fraction,
        stat: VerifierStat::new("gaussian_singular_value", fraction, 0.95, seeds, fraction >= 0.95),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonMonitor {
    pub n: usize,
    pub q: f64,
    /// Best value over random unit probes, per seed.
    pub probe: Vec<f64>,
    /// Value after ascent from the best probe, per seed (`≥ probe`).
    pub ascent: Vec<f64>,
    /// `ascent / √q` per seed.
    pub ratios: Vec<f64>,
    pub p95: f64,
    pub stat: VerifierStat,
}

/// `t^{−1/q} K(m^{−1/q} Gᵀ x, t)`: the norm of the image of `x ∈ ℓ2^n` in `X_t^q`.
fn epsilon_objective(g: &Matrix, x: &[f64], params: &ConstructionParams) -> Result<(f64, Vec<f64>)> {
    let c = (params.m as f64).powf(-1.0 / params.q);
    let image: Vec<f64> = g.tmatvec(x).iter().map(|v| c * v).collect();
    let k = k_norm(&image, params.t)?;
    let pre = params.t.powf(-1.0 / params.q);
    // Ascent direction: G a*, where a* attains the K-norm.
    let dir = g.matvec(&k.dual_vector);
    Ok((pre * k.value, dir))
}

/// Lower bounds on `‖m^{−1/q} Σ g_ij e_i⊗e_j : ℓ2^n → X_t^q‖` per seed, by
/// random probing followed by a monotone power-type ascent. Passes when every
/// ascent value dominates its probe value (both are valid lower bounds).
pub fn lemma_epsilon_monitor(params: &ConstructionParams, trials: usize, probes: usize, stream: RngStream) -> Result<EpsilonMonitor> {
    if trials == 0 || probes == 0 {
        return Err(Error::Invalid("epsilon monitor needs trials and probes ≥ 1".into()));
    }
    let results: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = stream.split(i as u64);
            let g = gaussian_matrix(params.n, params.m, s.split(0));
            let mut sampler = GaussianSampler::new(s.split(1));
            let mut best = (f64::NEG_INFINITY, Vec::new(), Vec::new());
            for _ in 0..probes {
                let x = sampler.unit_vector(params.n);
                let (v, dir) = epsilon_objective(&g, &x, params)?;
                if v > best.0 {
                    best = (v, x, dir);
                }
            }
            let probe = best.0;
            let (mut value, mut dir) = (best.0, best.2);
            for _ in 0..200 {
                let nrm = norm2(&dir);
                if nrm == 0.0 {
                    break;
                }
                let x: Vec<f64> = dir.iter().map(|d| d / nrm).collect();
                let (v, d) = epsilon_objective(&g, &x, params)?;
                if v <= value * (1.0 + 1e-12) {
                    value = value.max(v);
                    break;
                }
                value = v;
                dir = d;
            }
            Ok((probe, value))
        })
        .collect::<Result<Vec<_>>>()?;
    let probe: Vec<f64> = results.iter().map(|r| r.0).collect();
    let ascent: Vec<f64> = results.iter().map(|r| r.1).collect();
    let sq = params.q.sqrt();
    let ratios: Vec<f64> = ascent.iter().map(|v| v / sq).collect();
    let p95 = quantile(&ratios, 0.95);
    let valid = probe.iter().zip(&ascent).all(|(p, a)| p <= a);
    Ok(EpsilonMonitor {
        n: params.n,
        q: params.q,
        probe,
        ascent,
        ratios,
        p95,
        stat: VerifierStat::new("epsilon_lemma_p95_ratio", p95, f64::INFINITY, trials, valid),
    })
}

/// Flags growth of the 95th-percentile ratio across increasing `n`: passes
/// when no later percentile exceeds `factor` times the first.
pub fn epsilon_trend(monitors: &[EpsilonMonitor], factor: f64) -> VerifierStat {
    let first = monitors.first().map_or(0.0, |m| m.p95);
    let worst = monitors.iter().map(|m| m.p95).fold(0.0, f64::max);
    let trials = monitors.iter().map(|m| m.ratios.len()).sum();
    VerifierStat::new("epsilon_lemma_trend", worst, factor * first, trials, worst <= factor * first)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMonitor {
    /// Mean of `‖G : ℓ∞^m → ℓ2^n‖`.
    pub op_linf_l2: f64,
    /// Mean Frobenius norm, and its ratio to `√(nm)`.
    pub frobenius: f64,
    pub frobenius_ratio: f64,
    /// Mean of the largest column ℓ2 norm.
    pub max_column: f64,
    /// `t^{1/q}(T₁ + t^{−1/2} T₂ + t^{−1} T₃)` divided by `m^{1−1/q} n^{1/q}`.
    pub combined_ratio: f64,
    pub stats: Vec<VerifierStat>,
}

/// Scalar proxies of the three terms bounding the min-norm; report-only.
pub fn lemma_min_monitor(params: &ConstructionParams, trials: usize, stream: RngStream) -> Result<MinMonitor> {
    check_signs(params.m)?;
    if trials == 0 {
        return Err(Error::Invalid("min monitor needs trials ≥ 1".into()));
    }
    let (n, m) = (params.n, params.m);
    let terms: Vec<(f64, f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let g = gaussian_matrix(n, m, stream.split(i as u64));
            min_terms(&g)
        })
        .collect::<Result<Vec<_>>>()?;
    let t = trials as f64;
    let op = terms.iter().map(|v| v.0).sum::<f64>() / t;
    let fro = terms.iter().map(|v| v.1).sum::<f64>() / t;
    let col = terms.iter().map(|v| v.2).sum::<f64>() / t;
    let tt = params.t;
    let combined = tt.powf(1.0 / params.q) * (op + fro / tt.sqrt() + col / tt);
    let scale = (m as f64).powf(1.0 - 1.0 / params.q) * (n as f64).powf(1.0 / params.q);
    let frobenius_ratio = fro / ((n * m) as f64).sqrt();
    let proxy = |name: &str, v: f64| VerifierStat {
        proxy: true,
        ..VerifierStat::new(name, v, f64::INFINITY, trials, v.is_finite())
    };
    Ok(MinMonitor {
        op_linf_l2: op,
        frobenius: fro,
        frobenius_ratio,
        max_column: col,
        combined_ratio: combined / scale,
        stats: vec![
            proxy("min_lemma_frobenius_ratio", frobenius_ratio),
            proxy("min_lemma_combined_ratio", combined / scale),
        ],
    })
}

/// `(‖G : ℓ∞^m → ℓ2^n‖, ‖G‖_F, max_j ‖G e_j‖₂)`.
pub fn min_terms(g: &Matrix) -> Result<(f64, f64, f64)> {
    check_signs(g.cols())?;
    let op = sign_vectors(g.cols()).map(|s| norm2(&g.matvec(&s))).fold(0.0, f64::max);
    let col = (0..g.cols()).map(|j| norm2(&g.column(j))).fold(0.0, f64::max);
    Ok((op, g.frobenius_norm(), col))
}

/// Compares `‖Σ T_i‖` with `‖Σ b_i b_iᵀ‖^{1/2} ‖Σ c_iᵀ c_i‖^{1/2}` for
/// `b_i = c_i = T_i^{1/2}`; returns the absolute residual.
pub fn positive_sum_identity(ts: &[Matrix]) -> Result<f64> {
    let Some(first) = ts.first() else {
        return Ok(0.0);
    };
    let d = first.rows();
    let mut sum = Matrix::zeros(d, d);
    let mut bb = Matrix::zeros(d, d);
    let mut cc = Matrix::zeros(d, d);
    for (i, t) in ts.iter().enumerate() {
        if t.rows() != d || t.cols() != d {
            return Err(Error::Shape(format!("T_{i} is not {d}x{d}")));
        }
        let lo = min_eigenvalue(t)?;
        if lo < -1e-12 * t.max_abs().max(1.0) {
            return Err(Error::Invalid(format!("T_{i} is not PSD (eigenvalue {lo:.3e})")));
        }
        let root = psd_sqrt(t)?;
        sum = sum.add(t);
        bb = bb.add(&root.matmul(&root.transpose()));
        cc = cc.add(&root.transpose().matmul(&root));
    }
    let lhs = sum.operator_norm();
    let rhs = (bb.symmetrized().operator_norm() * cc.symmetrized().operator_norm()).sqrt();
    Ok((lhs - rhs).abs())
}

/// Linear-interpolation quantile of unsorted data.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = p.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn injective_norms_of_small_matrices() {
        let g = Matrix::from_row_major(2, 2, vec![1.0, 2.0, -3.0, 4.0]).unwrap();
        // (ℓ∞, ℓ∞): max entry; (ℓ1, ℓ1): max of sᵀGt over sign vectors.
        assert_eq!(injective_norm(&g, Space::Linf, Space::Linf).unwrap(), 4.0);
        assert_eq!(injective_norm(&g, Space::L1, Space::L1).unwrap(), 8.0);
        // (ℓ2, ℓ∞): largest column norm = ‖(2,4)‖₂.
        assert!((injective_norm(&g, Space::L2, Space::Linf).unwrap() - 20f64.sqrt()).abs() < 1e-15);
        // (ℓ1, ℓ2) over signs: max(‖(1−3, 2+4)‖, ‖(1+3, 2−4)‖) = √40.
        assert!((injective_norm(&g, Space::L1, Space::L2).unwrap() - 40f64.sqrt()).abs() < 1e-12);
        let op = injective_norm(&g, Space::L2, Space::L2).unwrap();
        assert!((op - g.operator_norm()).abs() < 1e-10);
    }

    #[test]
    fn chevet_scalar_case() {
        let r = chevet_monte_carlo((Space::L2, Space::L2), 1, 1, 50, RngStream::new(1, 0)).unwrap();
        // |g| on both sides: mean ≤ 2·mean.
        assert!((r.bound - 2.0 * r.mean).abs() < 1e-12);
        assert!(r.stat.pass);
    }

    #[test]
    fn space_parsing() {
        assert_eq!("linf".parse::<Space>().unwrap(), Space::Linf);
        assert!("l3".parse::<Space>().is_err());
        assert_eq!(Space::L1.to_string(), "l1");
    }

    #[test]
    fn min_terms_zero() {
        assert_eq!(min_terms(&Matrix::zeros(2, 3)).unwrap(), (0.0, 0.0, 0.0));
    }

    #[test]
    fn positive_identity() {
        let t = Matrix::diag(&[1.0, 2.0]);
        assert!(positive_sum_identity(&[t.clone()]).unwrap() < 1e-12);
        assert!(positive_sum_identity(&[t, Matrix::diag(&[3.0, 0.5])]).unwrap() < 1e-12);
        assert!(positive_sum_identity(&[Matrix::diag(&[1.0, -1.0])]).is_err());
    }

    #[test]
    fn quantiles() {
        assert_eq!(quantile(&[3.0, 1.0, 2.0], 0.5), 2.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.25), 1.25);
    }
}
