//! The local set and its incomplete and signed relaxations: classical bounds,
//! membership, `ν(P)` and `π(P)`.

pub mod classical;
pub mod enumerate;
pub mod nu;

pub use classical::{classical_bound, classical_bound_auto, signed_bound, BoundMode, ClassicalBound};
pub use enumerate::{enumerate_deterministic, strategy_count};
pub use nu::{check_equivalence, local_points, nu_of_behavior, pi_robustness, Equivalence, NuResult, PiResult};

use crate::model::tensor::pr_box;
use crate::model::{Behavior, Provenance, Scenario};
use crate::solvers::rng::{GaussianSampler, RngStream};

/// Random non-signalling behavior on the CHSH scenario: a PR-box weight
/// `w ~ U[0,1]` mixed with a Dirichlet(1) combination of the 16 local points.
pub fn random_nonsignalling_behavior(stream: RngStream) -> Behavior {
    let s = Scenario::chsh();
    let mut g = GaussianSampler::new(stream);
    let w = g.uniform();
    let points = local_points(&s, 16).expect("16 local points");
    let raw: Vec<f64> = points.iter().map(|_| -libm::log(1.0 - g.uniform())).collect();
    let total: f64 = raw.iter().sum();
    let pr = pr_box();
    let mut p: Vec<f64> = pr.as_slice().iter().map(|v| w * v).collect();
    for (weight, pt) in raw.iter().zip(&points) {
        let c = (1.0 - w) * weight / total;
        for x in 0..2 {
            for y in 0..2 {
                p[s.index(x, y, pt.alice[x], pt.bob[y])] += c;
            }
        }
    }
    Behavior::new(s, p, Provenance::NonsignallingRaw).expect("finite entries")
}
