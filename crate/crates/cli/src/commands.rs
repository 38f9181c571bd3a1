use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde::Serialize;

use nonlocal_core::construction::{
    build_bell_functional, chevet_monte_carlo, gaussian_lemma_statistic, lemma_epsilon_monitor, lemma_min_monitor,
    pipeline, positive_sum_identity, seed_sweep, ConstructionParams, Space,
};
use nonlocal_core::local::{check_equivalence, classical_bound, nu_of_behavior, signed_bound, BoundMode, ClassicalBound};
use nonlocal_core::model::tensor::{chsh_tsirelson_behavior, pr_box};
use nonlocal_core::model::{behavior_from_quantum, mix_detector_noise, BellFunctional, Behavior, TensorFile};
use nonlocal_core::quantum::{
    dimension_witness_report, upper_bound_monitor, violation_report, MonitorReport, QuantumReport, SeesawConfig,
    ViolationReport, WitnessReport,
};
use nonlocal_core::solvers::{GaussianSampler, RngStream};
use nonlocal_core::{Settings, SolveReport};

use crate::output::{emit, emit_raw, read_input, CliError, CliResult};
use crate::{Cli, Command, Global};

/// Stream identifiers, so every command draws from its own stream of `--seed`.
mod streams {
    pub const CLASSICAL: u64 = 1;
    pub const SEESAW: u64 = 2;
    pub const VERIFY: u64 = 3;
}

fn settings(g: &Global) -> CliResult<Settings> {
    let mut s = Settings::default().with_budget(g.budget);
    if let Some(t) = g.tol {
        if !(t > 0.0) {
            return Err(CliError::Input(format!("--tol {t} must be positive")));
        }
        s.tol.norm = t;
        s.tol.ns = t;
        s.tol.lp = t;
    }
    Ok(s)
}

fn load_functional(path: &PathBuf) -> CliResult<BellFunctional> {
    Ok(TensorFile::parse(&read_input(path)?)?.into_functional()?)
}

fn load_behavior(path: &PathBuf) -> CliResult<Behavior> {
    Ok(TensorFile::parse(&read_input(path)?)?.into_behavior()?)
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// The CHSH functional `(−1)^{a+b+xy}`.
    Chsh,
    /// The behavior attaining Tsirelson's bound.
    ChshTsirelson,
    /// The PR box.
    PrBox,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstructArgs {
    /// Local dimension / output count of the Gaussian construction.
    #[arg(long, required_unless_present = "preset")]
    pub n: Option<usize>,
    /// Exponent q > 2 (m = ⌈n^{q/2}⌉).
    #[arg(long, conflicts_with = "log_preset")]
    pub q: Option<f64>,
    /// Override m within [n^{q/2}, 2n^{q/2}].
    #[arg(long)]
    pub m: Option<usize>,
    /// Use q = log2(n).
    #[arg(long)]
    pub log_preset: bool,
    /// Singular-value cutoff.
    #[arg(long, default_value_t = 0.5)]
    pub sigma_threshold: f64,
    /// Emit a fixed functional or behavior instead of a construction.
    #[arg(long, value_enum, conflicts_with_all = ["n", "q", "m", "log_preset"])]
    pub preset: Option<Preset>,
}

fn construction_params(n: usize, q: Option<f64>, m: Option<usize>, log_preset: bool, seed: u64) -> CliResult<ConstructionParams> {
    let p = match (log_preset, q, m) {
        (true, _, None) => ConstructionParams::log_preset(n, seed)?,
        (true, _, Some(m)) => {
            let q = ConstructionParams::log_preset(n, seed)?.q;
            ConstructionParams::with_m(n, q, m, seed)?
        }
        (false, Some(q), None) => ConstructionParams::new(n, q, seed)?,
        (false, Some(q), Some(m)) => ConstructionParams::with_m(n, q, m, seed)?,
        (false, None, _) => return Err(CliError::Input("--q or --log-preset is required".into())),
    };
    Ok(p)
}

fn construct(g: &Global, a: &ConstructArgs) -> CliResult {
    if let Some(preset) = a.preset {
        let file = match preset {
            Preset::Chsh => TensorFile::from(&BellFunctional::chsh()),
            Preset::ChshTsirelson => TensorFile::from(&chsh_tsirelson_behavior()),
            Preset::PrBox => TensorFile::from(&pr_box()),
        };
        return emit_raw(g, &file.to_json(), &format!("wrote preset {}", preset.to_possible_value().map_or_else(String::new, |v| v.get_name().to_string())));
    }
    let n = a.n.expect("clap enforces --n without --preset");
    let params = construction_params(n, a.q, a.m, a.log_preset, g.seed)?.with_threshold(a.sigma_threshold)?;
    let (m, sub) = build_bell_functional(&params)?;
    let s = m.scenario();
    let summary = format!(
        "functional: {} inputs, {} outputs per party ({}x{}x{}x{} tensor), k = {} retained directions",
        s.inputs, s.outputs, s.inputs, s.inputs, s.outputs, s.outputs, sub.k
    );
    emit_raw(g, &TensorFile::from(&m).to_json(), &summary)
}

#[derive(Debug, Args, Serialize)]
pub struct ClassicalArgs {
    /// Functional tensor file.
    #[arg(long)]
    pub functional: PathBuf,
    /// Best-response search instead of exact enumeration.
    #[arg(long)]
    pub heuristic: bool,
    /// Restarts of the heuristic search.
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    /// Also report the signed bound (which lies in [B_C, 4 B_C]).
    #[arg(long)]
    pub signed: bool,
}

#[derive(Serialize)]
struct ClassicalResult {
    bound: ClassicalBound,
    #[serde(skip_serializing_if = "Option::is_none")]
    signed: Option<SolveReport>,
}

fn classical(g: &Global, a: &ClassicalArgs) -> CliResult {
    let m = load_functional(&a.functional)?;
    let s = settings(g)?;
    let mode = if a.heuristic {
        BoundMode::Heuristic {
            restarts: a.restarts,
            stream: RngStream::new(g.seed, streams::CLASSICAL),
        }
    } else {
        BoundMode::Exact
    };
    let bound = classical_bound(&m, mode, &s)?;
    let signed = if a.signed { Some(signed_bound(&m, s.budget)?) } else { None };
    let summary = format!("B_C = {} ({:?})", bound.report.value, bound.report.certificate);
    emit(g, "classical", a, &ClassicalResult { bound, signed }, &summary)
}

#[derive(Debug, Args, Serialize)]
pub struct SeesawArgs {
    /// Random restarts per sign of the functional.
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 500)]
    pub max_sweeps: usize,
    /// Relative improvement below which a run stops.
    #[arg(long, default_value_t = 1e-8)]
    pub sweep_tol: f64,
}

impl SeesawArgs {
    fn config(&self, dims: (usize, usize), seed: u64) -> SeesawConfig {
        SeesawConfig {
            dims,
            restarts: self.restarts,
            max_sweeps: self.max_sweeps,
            tol: self.sweep_tol,
            stream: RngStream::new(seed, streams::SEESAW),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct QuantumArgs {
    #[arg(long)]
    pub functional: PathBuf,
    /// Local dimensions d_A,d_B.
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "2,2")]
    pub dims: Vec<usize>,
    /// Also tabulate see-saw values at d_A = d_B = d for these d.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub witness_dims: Vec<usize>,
    /// Check ν of the optimal behavior against 16·min(d, k²).
    #[arg(long)]
    pub monitor: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub seesaw: SeesawArgs,
}

fn dims_pair(dims: &[usize]) -> CliResult<(usize, usize)> {
    match dims {
        [d] => Ok((*d, *d)),
        [a, b] => Ok((*a, *b)),
        _ => Err(CliError::Input("--dims takes one or two values".into())),
    }
}

#[derive(Serialize)]
struct QuantumResult {
    report: QuantumReport,
    violation: ViolationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessReport>,
    monitors: Vec<MonitorReport>,
}

fn quantum(g: &Global, a: &QuantumArgs) -> CliResult {
    let m = load_functional(&a.functional)?;
    let s = settings(g)?;
    let dims = dims_pair(&a.dims)?;
    let cfg = a.seesaw.config(dims, g.seed);
    let violation = violation_report(&m, &cfg, &s)?;
    let witness = if a.witness_dims.is_empty() {
        None
    } else {
        Some(dimension_witness_report(&m, &a.witness_dims, &cfg, &s)?)
    };
    let mut monitors = Vec::new();
    if a.monitor {
        // ν of the completed behavior, whose outputs include the no-click outcome.
        let p = behavior_from_quantum(&violation.model.completed(), &s.tol)?;
        let k = p.scenario().effective_outputs();
        monitors.push(upper_bound_monitor(&p, dims.0.max(dims.1), k, &s)?);
    }
    let report = QuantumReport::new(&violation, witness.as_ref(), &monitors);
    let summary = format!(
        "B_Q >= {}, B_C = {}, ratio {}{}",
        report.value,
        violation.classical.value,
        report.ratio,
        if violation.confirmed { "" } else { " (unconfirmed)" }
    );
    emit(g, "quantum", a, &QuantumResult { report, violation, witness, monitors }, &summary)
}

#[derive(Debug, Args, Serialize)]
pub struct BehaviorArgs {
    /// Behavior tensor file.
    #[arg(long)]
    pub behavior: PathBuf,
}

fn nu(g: &Global, a: &BehaviorArgs) -> CliResult {
    let p = load_behavior(&a.behavior)?;
    let r = nu_of_behavior(&p, &settings(g)?)?;
    let summary = format!("nu = {} ({} local points in the decomposition)", r.nu, r.decomposition.terms.len());
    emit(g, "nu", a, &r, &summary)
}

fn pi(g: &Global, a: &BehaviorArgs) -> CliResult {
    let p = load_behavior(&a.behavior)?;
    let e = check_equivalence(&p, &settings(g)?)?;
    let summary = format!("pi = {}, nu = {}, |nu - (2/pi - 1)| = {:.3e}", e.pi.pi, e.nu.nu, e.residual);
    emit(g, "pi", a, &e, &summary)
}

#[derive(Debug, Args, Serialize)]
pub struct NoiseArgs {
    #[arg(long)]
    pub behavior: PathBuf,
    /// Detector efficiency in [0, 1].
    #[arg(long)]
    pub eta: f64,
}

fn noise(g: &Global, a: &NoiseArgs) -> CliResult {
    let p = load_behavior(&a.behavior)?;
    let noisy = mix_detector_noise(&p, a.eta)?;
    let s = noisy.scenario();
    let summary = format!(
        "behavior with eta = {}: {} inputs, {} outputs plus no-click",
        a.eta, s.inputs, s.outputs
    );
    emit_raw(g, &TensorFile::from(&noisy).to_json(), &summary)
}

#[derive(Debug, Args, Serialize)]
pub struct WitnessArgs {
    #[arg(long)]
    pub functional: PathBuf,
    /// Ascending local dimensions.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub dims: Vec<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub seesaw: SeesawArgs,
}

fn witness(g: &Global, a: &WitnessArgs) -> CliResult {
    let m = load_functional(&a.functional)?;
    let cfg = a.seesaw.config((1, 1), g.seed);
    let w = dimension_witness_report(&m, &a.dims, &cfg, &settings(g)?)?;
    let table: Vec<String> = w.rows.iter().map(|r| format!("d={}: {}", r.dim, r.value)).collect();
    emit(g, "witness", a, &w, &table.join(", "))
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyCommand {
    /// Chevet's inequality for a pair of spaces.
    Chevet {
        /// Two of l1, l2, linf.
        #[arg(long, value_delimiter = ',', required = true)]
        pair: Vec<Space>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Fraction of samples with s_{⌈δn⌉}(G/√m) ≥ 1/2.
    Gaussian {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 512)]
        m: usize,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 200)]
        seeds: usize,
    },
    /// Lower bounds on the Gaussian operator into the K-space.
    Epsilon {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 20)]
        probes: usize,
    },
    /// Scalar proxies of the min-norm bound.
    Min {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// ‖Σ T_i‖ against its square-root factorization on random PSD matrices.
    Positive {
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        dim: usize,
    },
}

#[derive(Serialize)]
struct PositiveResult {
    residual: f64,
    pass: bool,
}

fn verify(g: &Global, v: &VerifyCommand) -> CliResult {
    let stream = RngStream::new(g.seed, streams::VERIFY);
    match v {
        VerifyCommand::Chevet { pair, n, m, trials } => {
            if pair.len() != 2 {
                return Err(CliError::Input("--pair takes exactly two spaces, e.g. l1,l2".into()));
            }
            let r = chevet_monte_carlo((pair[0], pair[1]), *n, *m, *trials, stream)?;
            let summary = format!(
                "chevet({},{}): mean {} vs bound {} -> {}",
                pair[0],
                pair[1],
                r.mean,
                r.bound,
                pass_word(r.stat.pass)
            );
            emit(g, "verify chevet", v, &r, &summary)
        }
        VerifyCommand::Gaussian { n, m, delta, seeds } => {
            let r = gaussian_lemma_statistic(*n, *m, *delta, *seeds, stream)?;
            let summary = format!("fraction {} (threshold 0.95) -> {}", r.fraction, pass_word(r.stat.pass));
            emit(g, "verify gaussian", v, &r, &summary)
        }
        VerifyCommand::Epsilon { n, q, trials, probes } => {
            let params = ConstructionParams::new(*n, *q, g.seed)?;
            let r = lemma_epsilon_monitor(&params, *trials, *probes, stream)?;
            let summary = format!("p95 of estimate/sqrt(q): {} -> {}", r.p95, pass_word(r.stat.pass));
            emit(g, "verify epsilon", v, &r, &summary)
        }
        VerifyCommand::Min { n, q, trials } => {
            let params = ConstructionParams::new(*n, *q, g.seed)?;
            let r = lemma_min_monitor(&params, *trials, stream)?;
            let summary = format!(
                "proxy ratios: frobenius/sqrt(nm) {}, combined {}",
                r.frobenius_ratio, r.combined_ratio
            );
            emit(g, "verify min", v, &r, &summary)
        }
        VerifyCommand::Positive { count, dim } => {
            let mut sampler = GaussianSampler::new(stream);
            let ts: Vec<_> = (0..*count)
                .map(|_| {
                    let a = sampler.matrix(*dim, *dim);
                    a.matmul(&a.transpose()).symmetrized()
                })
                .collect();
            let residual = positive_sum_identity(&ts)?;
            let pass = residual <= 1e-9;
            let summary = format!("residual {residual:.3e} -> {}", pass_word(pass));
            emit(g, "verify positive", v, &PositiveResult { residual, pass }, &summary)
        }
    }
}

fn pass_word(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

#[derive(Debug, Args, Serialize)]
pub struct PipelineArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, conflicts_with = "log_preset")]
    pub q: Option<f64>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub log_preset: bool,
    /// Construction seeds; defaults to `--seed`. More than one produces a sweep.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub seeds: Vec<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub seesaw: SeesawArgs,
}

fn run_pipeline(g: &Global, a: &PipelineArgs) -> CliResult {
    let s = settings(g)?;
    let base = construction_params(a.n, a.q, a.m, a.log_preset, g.seed)?;
    let cfg = a.seesaw.config((a.n, a.n), g.seed);
    let seeds = if a.seeds.is_empty() { vec![g.seed] } else { a.seeds.clone() };
    if seeds.len() == 1 {
        let params = ConstructionParams { seed: seeds[0], ..base };
        let r = pipeline(&params, &SeesawConfig { stream: cfg.stream.split(seeds[0]), ..cfg }, &s)?;
        let summary = format!("LV >= {} (B_C = {}, B_Q >= {}), D_hat = {}", r.lv, r.b_c, r.b_q, r.d_hat);
        emit(g, "pipeline", a, &r, &summary)
    } else {
        let r = seed_sweep(&base, &seeds, &cfg, &s)?;
        let summary = format!(
            "{} seeds: LV median {}, D_hat median {} [q1 {}, q3 {}]",
            r.runs.len(),
            r.lv.median,
            r.d_hat.median,
            r.d_hat.q1,
            r.d_hat.q3
        );
        emit(g, "pipeline", a, &r, &summary)
    }
}

pub fn run(cli: &Cli) -> CliResult {
    let g = &cli.global;
    match &cli.command {
        Command::Construct(a) => construct(g, a),
        Command::Classical(a) => classical(g, a),
        Command::Quantum(a) => quantum(g, a),
        Command::Nu(a) => nu(g, a),
        Command::Pi(a) => pi(g, a),
        Command::Noise(a) => noise(g, a),
        Command::Witness(a) => witness(g, a),
        Command::Verify(v) => verify(g, v),
        Command::Pipeline(a) => run_pipeline(g, a),
    }
}
