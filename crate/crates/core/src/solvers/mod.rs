//! Self-contained numeric kernels.

pub mod knorm;
pub mod linalg;
pub mod lp;
pub mod rng;

pub use knorm::{j_norm, k_norm, KNorm};
pub use linalg::{svd, sym_eig, Matrix, Svd, SymEig};
pub use lp::{lp_solve, LpProblem, LpSolution, LpStatus};
pub use rng::{gaussian_matrix, GaussianSampler, RngStream};
