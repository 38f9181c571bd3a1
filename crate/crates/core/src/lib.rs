//! Classical and quantum bounds of bipartite Bell functionals.
//!
//! The crate is organised around five areas:
//!
//! - [`model`]: scenarios, behaviors, Bell functionals, local and quantum models.
//! - [`solvers`]: dense linear algebra, a simplex LP solver, seeded Gaussian
//!   sampling and the K-/J-norms of the `ℓ∞ + ℓ2 + ℓ1` interpolation couple.
//! - [`local`]: exact and heuristic classical bounds, `ν(P)` and `π(P)`.
//! - [`quantum`]: Bell operators, see-saw maximisation and violation reports.
//! - [`construction`]: the random Gaussian functional and its Monte Carlo monitors.

pub mod config;
pub mod construction;
pub mod error;
pub mod local;
pub mod model;
pub mod quantum;
pub mod report;
pub mod solvers;

pub use config::{Settings, Tolerances};
pub use error::{Error, Result};
pub use report::{Certificate, SolveReport};
