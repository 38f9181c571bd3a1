use serde::{Deserialize, Serialize};

use super::seesaw::{seesaw_with, SeesawConfig, WarmStart};
use crate::config::Settings;
use crate::error::{Error, Result};
use crate::local::{classical_bound_auto, nu_of_behavior};
use crate::model::{BellFunctional, Behavior, QuantumModel};
use crate::report::{Certificate, SolveReport};

/// Violation ratio `LV ≥ B_Q / B_C` with both certificates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub classical: SolveReport,
    pub quantum: SolveReport,
    pub ratio: f64,
    /// False when the classical bound is only a heuristic lower bound, in
    /// which case the ratio may overstate the violation.
    pub confirmed: bool,
    pub sign: f64,
    pub model: QuantumModel,
}

/// Both bounds are computed on `M / max|M|` and reported at the original
/// scale, so `LV(cM) = LV(M)`.
pub fn violation_report(m: &BellFunctional, cfg: &SeesawConfig, settings: &Settings) -> Result<ViolationReport> {
    let scale = m.max_abs();
    if scale == 0.0 {
        return Err(Error::Invalid("functional is zero: B_C = 0, ratio undefined".into()));
    }
    let unit = m.scaled(1.0 / scale);
    let classical = classical_bound_auto(&unit, settings, cfg.restarts.max(1), cfg.stream.split(u64::MAX))?;
    if classical.report.value <= settings.tol.norm {
        return Err(Error::Invalid(format!(
            "degenerate functional: B_C = {:.3e} is below tolerance",
            classical.report.value * scale
        )));
    }
    let quantum = seesaw_with(&unit, cfg, &[WarmStart::Classical(&classical)])?;
    let ratio = quantum.report.value / classical.report.value;
    let rescale = |r: &SolveReport| SolveReport {
        value: r.value * scale,
        residual: r.residual * scale,
        ..r.clone()
    };
    Ok(ViolationReport {
        classical: rescale(&classical.report),
        quantum: rescale(&quantum.report),
        ratio,
        confirmed: classical.report.certificate == Certificate::Exact,
        sign: quantum.sign,
        model: quantum.model,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimRow {
    pub dim: usize,
    pub value: f64,
    /// Value divided by the previous row's value.
    pub ratio_to_previous: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub rows: Vec<DimRow>,
    pub nondecreasing: bool,
}

/// See-saw values at `d_A = d_B = d` for each listed `d`. Every dimension
/// is warm-started from the best model of the previous one, and the first
/// from the classical optimum, so the table can only grow.
pub fn dimension_witness_report(
    m: &BellFunctional,
    dims: &[usize],
    cfg: &SeesawConfig,
    settings: &Settings,
) -> Result<WitnessReport> {
    if dims.is_empty() || dims.windows(2).any(|w| w[0] >= w[1]) || dims[0] == 0 {
        return Err(Error::Invalid(format!("dimensions {dims:?} must be positive and strictly ascending")));
    }
    let classical = classical_bound_auto(m, settings, cfg.restarts.max(1), cfg.stream.split(u64::MAX))?;
    let mut rows: Vec<DimRow> = Vec::with_capacity(dims.len());
    let mut previous: Option<(QuantumModel, f64)> = None;
    for (i, &d) in dims.iter().enumerate() {
        let c = SeesawConfig {
            dims: (d, d),
            stream: cfg.stream.split(i as u64),
            ..*cfg
        };
        let warm = match &previous {
            None => WarmStart::Classical(&classical),
            Some((q, sign)) => WarmStart::Model(q, *sign),
        };
        let r = seesaw_with(m, &c, &[warm])?;
        let ratio_to_previous = rows.last().map(|p| r.report.value / p.value);
        rows.push(DimRow {
            dim: d,
            value: r.report.value,
            ratio_to_previous,
        });
        previous = Some((r.model, r.sign));
    }
    let nondecreasing = rows.windows(2).all(|w| w[1].value >= w[0].value - 1e-9 * w[0].value.max(1.0));
    if !nondecreasing {
        log::warn!("dimension table is not nondecreasing: {rows:?}");
    }
    Ok(WitnessReport { rows, nondecreasing })
}

/// Declared constant of the `ν = O(min(d, k²))` monitors.
pub const MONITOR_CONSTANT: f64 = 16.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub nu: f64,
    pub dim: usize,
    pub outputs: usize,
    pub nu_over_dim: f64,
    pub nu_over_outputs_sq: f64,
    /// `16 · min(d, k²)`.
    pub threshold: f64,
    pub pass: bool,
}

/// Checks `ν(P) ≤ 16·min(d, k²)` for a behavior from local dimension `d`
/// with `k` outputs.
pub fn upper_bound_monitor(p: &Behavior, dim: usize, outputs: usize, settings: &Settings) -> Result<MonitorReport> {
    if dim == 0 || outputs == 0 {
        return Err(Error::Invalid("monitor needs positive dimension and output count".into()));
    }
    let nu = nu_of_behavior(p, settings)?.nu;
    let d = dim as f64;
    let k2 = (outputs * outputs) as f64;
    let threshold = MONITOR_CONSTANT * d.min(k2);
    let report = MonitorReport {
        nu,
        dim,
        outputs,
        nu_over_dim: nu / d,
        nu_over_outputs_sq: nu / k2,
        threshold,
        pass: nu <= threshold,
    };
    log::info!(
        "monitor: ν = {nu:.6}, ν/d = {:.6}, ν/k² = {:.6}, threshold {threshold}",
        report.nu_over_dim,
        report.nu_over_outputs_sq
    );
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificates {
    pub classical: Certificate,
    pub quantum: Certificate,
}

/// The quantum report document `{value, ratio, certificates, per_dim_table, monitor_flags}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumReport {
    pub value: f64,
    pub ratio: f64,
    pub certificates: Certificates,
    pub per_dim_table: Vec<DimRow>,
    pub monitor_flags: Vec<String>,
}

impl QuantumReport {
    pub fn new(violation: &ViolationReport, witness: Option<&WitnessReport>, monitors: &[MonitorReport]) -> Self {
        let mut flags = Vec::new();
        if !violation.confirmed {
            flags.push("unconfirmed: classical bound is heuristic".to_string());
        }
        if let Some(w) = witness {
            if !w.nondecreasing {
                flags.push("dimension table decreases".to_string());
            }
        }
        for m in monitors.iter().filter(|m| !m.pass) {
            flags.push(format!(
                "nu {:.6} exceeds 16*min(d, k^2) = {} (d = {}, k = {})",
                m.nu, m.threshold, m.dim, m.outputs
            ));
        }
        Self {
            value: violation.quantum.value,
            ratio: violation.ratio,
            certificates: Certificates {
                classical: violation.classical.certificate,
                quantum: violation.quantum.certificate,
            },
            per_dim_table: witness.map(|w| w.rows.clone()).unwrap_or_default(),
            monitor_flags: flags,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tensor::{chsh_tsirelson_behavior, uniform_behavior};
    use crate::model::Scenario;
    use crate::solvers::rng::RngStream;

    #[test]
    fn chsh_ratio() {
        let cfg = SeesawConfig::new((2, 2), RngStream::new(11, 0));
        let r = violation_report(&BellFunctional::chsh(), &cfg, &Settings::default()).unwrap();
        assert_eq!(r.classical.value, 2.0);
        assert!(r.confirmed);
        assert!((r.ratio - 2f64.sqrt()).abs() < 1e-3, "{}", r.ratio);
    }

    #[test]
    fn zero_functional_rejected() {
        let cfg = SeesawConfig::new((2, 2), RngStream::new(1, 0));
        let z = BellFunctional::zeros(Scenario::chsh());
        assert!(matches!(violation_report(&z, &cfg, &Settings::default()), Err(Error::Invalid(_))));
    }

    #[test]
    fn chsh_dimension_table() {
        let cfg = SeesawConfig::new((1, 1), RngStream::new(2, 0)).with_restarts(5);
        let w = dimension_witness_report(&BellFunctional::chsh(), &[1, 2], &cfg, &Settings::default()).unwrap();
        assert!((w.rows[0].value - 2.0).abs() < 1e-12);
        assert!((w.rows[1].value - 2.0 * 2f64.sqrt()).abs() < 1e-4);
        assert!((w.rows[1].ratio_to_previous.unwrap() - 2f64.sqrt()).abs() < 1e-4);
        assert!(w.nondecreasing);
        assert!(dimension_witness_report(&BellFunctional::chsh(), &[2, 1], &cfg, &Settings::default()).is_err());
    }

    #[test]
    fn monitors_pass_on_known_behaviors() {
        let s = Settings::default();
        let m = upper_bound_monitor(&chsh_tsirelson_behavior(), 2, 2, &s).unwrap();
        assert!((m.nu - 2f64.sqrt()).abs() < 1e-6 && m.pass && m.threshold == 32.0);
        let l = upper_bound_monitor(&uniform_behavior(Scenario::chsh()), 1, 2, &s).unwrap();
        assert!((l.nu - 1.0).abs() < 1e-12 && l.pass);
    }
}
