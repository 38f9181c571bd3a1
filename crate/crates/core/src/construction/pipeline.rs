use serde::{Deserialize, Serialize};

use super::build::{build_bell_functional, sample_gaussian, swap_asymmetry};
use super::params::ConstructionParams;
use super::verify::{quantile, VerifierStat};
use crate::config::Settings;
use crate::error::Result;
use crate::quantum::{violation_report, SeesawConfig};
use crate::report::Certificate;

/// Scale factors of the embedding, dropped from the functional (`c = 1`)
/// because the violation ratio is scale invariant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prefactors {
    /// `t^{−1/q}`.
    pub t_factor: f64,
    /// `m^{−1/q}`.
    pub m_factor: f64,
    /// `n^{−n}`.
    pub n_factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificates {
    pub classical: Certificate,
    pub quantum: Certificate,
}

/// The `construction-report.json` document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionReport {
    pub params: ConstructionParams,
    pub k: usize,
    /// `k/n`.
    pub observed_delta: f64,
    pub singular_values: Vec<f64>,
    #[serde(rename = "B_C")]
    pub b_c: f64,
    #[serde(rename = "B_Q")]
    pub b_q: f64,
    #[serde(rename = "LV")]
    pub lv: f64,
    /// `LV / n^{1/2 − 2/q}`, logged only.
    #[serde(rename = "D_hat")]
    pub d_hat: f64,
    pub verifier_stats: Vec<VerifierStat>,
    pub certificates: Certificates,
    pub prefactors: Prefactors,
    pub seesaw: SeesawConfig,
}

/// Builds the functional, bounds it classically (exactly when the budget
/// allows) and quantumly at `d_A = d_B = n`, and checks the structural
/// invariants of the instance.
pub fn pipeline(params: &ConstructionParams, cfg: &SeesawConfig, settings: &Settings) -> Result<ConstructionReport> {
    let (functional, sub) = build_bell_functional(params)?;
    let cfg = SeesawConfig {
        dims: (params.n, params.n),
        ..*cfg
    };
    log::info!(
        "construction n={} q={} m={} seed={}: {} inputs, k={}",
        params.n,
        params.q,
        params.m,
        params.seed,
        functional.scenario().inputs,
        sub.k
    );
    let v = violation_report(&functional, &cfg, settings)?;
    log::info!("B_C={:.6} ({:?}), B_Q≥{:.6}, LV≥{:.6}", v.classical.value, v.classical.certificate, v.quantum.value, v.ratio);

    let g = sample_gaussian(params);
    let frob = g.frobenius_norm().powi(2) / params.m as f64;
    let sum_sq: f64 = sub.singular_values.iter().map(|s| s * s).sum();
    let asym = swap_asymmetry(&functional);
    let max_weight = sub.weights.iter().copied().fold(0.0, f64::max);
    let weight_cap = 1.0 / (params.sigma_threshold * params.sigma_threshold);
    let stat = |name: &str, statistic: f64, threshold: f64, pass: bool| VerifierStat {
        name: name.into(),
        statistic,
        threshold,
        trials: 1,
        pass,
        proxy: false,
    };
    let verifier_stats = vec![
        stat("swap_asymmetry", asym, 0.0, asym == 0.0),
        stat("frobenius_identity_residual", (sum_sq - frob).abs(), 1e-8 * frob.max(1.0), (sum_sq - frob).abs() <= 1e-8 * frob.max(1.0)),
        stat("max_inversion_weight", max_weight, weight_cap, max_weight <= weight_cap),
        stat("violation_ratio", v.ratio, 1.0 - 1e-9, v.ratio >= 1.0 - 1e-9),
        stat("classical_exact", f64::from(u8::from(v.confirmed)), 1.0, v.confirmed),
        stat("seesaw_max_gap", v.quantum.residual, 1e-6 * functional.max_abs().max(1.0), v.quantum.residual <= 1e-6 * functional.max_abs().max(1.0)),
    ];
    let n = params.n as f64;
    Ok(ConstructionReport {
        params: *params,
        k: sub.k,
        observed_delta: sub.k as f64 / n,
        singular_values: sub.singular_values,
        b_c: v.classical.value,
        b_q: v.quantum.value,
        lv: v.ratio,
        d_hat: v.ratio / params.predicted_scale(),
        verifier_stats,
        certificates: Certificates {
            classical: v.classical.certificate,
            quantum: v.quantum.certificate,
        },
        prefactors: Prefactors {
            t_factor: params.t.powf(-1.0 / params.q),
            m_factor: (params.m as f64).powf(-1.0 / params.q),
            n_factor: n.powf(-n),
        },
        seesaw: cfg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        Self {
            median: quantile(values, 0.5),
            q1: quantile(values, 0.25),
            q3: quantile(values, 0.75),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub runs: Vec<ConstructionReport>,
    #[serde(rename = "LV")]
    pub lv: Summary,
    #[serde(rename = "D_hat")]
    pub d_hat: Summary,
    /// Every run passed every verifier.
    pub all_pass: bool,
}

/// The pipeline over several seeds (the seesaw stream is re-keyed per seed).
pub fn seed_sweep(base: &ConstructionParams, seeds: &[u64], cfg: &SeesawConfig, settings: &Settings) -> Result<SweepReport> {
    let mut runs = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let params = ConstructionParams { seed, ..*base };
        let c = SeesawConfig {
            stream: cfg.stream.split(seed),
            ..*cfg
        };
        runs.push(pipeline(&params, &c, settings)?);
    }
    let lvs: Vec<f64> = runs.iter().map(|r| r.lv).collect();
    let ds: Vec<f64> = runs.iter().map(|r| r.d_hat).collect();
    let all_pass = runs.iter().all(|r| r.verifier_stats.iter().all(|s| s.pass));
    Ok(SweepReport {
        lv: Summary::of(&lvs),
        d_hat: Summary::of(&ds),
        runs,
        all_pass,
    })
}
