//! The Gaussian construction: sample `G`, keep the well-conditioned singular
//! directions of `G/√m`, and embed the resulting tensor as a Bell functional
//! with `m^n` inputs and `n` outputs per party. Also hosts the Monte Carlo
//! verifiers of the probabilistic ingredients.

pub mod build;
pub mod params;
pub mod pipeline;
pub mod verify;

pub use build::{build_bell_functional, decode_input, sample_gaussian, singular_subspace, swap_asymmetry, SubspaceData};
pub use params::ConstructionParams;
pub use pipeline::{pipeline, seed_sweep, ConstructionReport, SweepReport, Summary};
pub use verify::{
    chevet_monte_carlo, epsilon_trend, gaussian_lemma_statistic, injective_norm, lemma_epsilon_monitor, lemma_min_monitor,
    positive_sum_identity, ChevetReport, EpsilonMonitor, GaussianLemmaReport, MinMonitor, Space, VerifierStat,
};
