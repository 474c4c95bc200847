//! Exact laws of random diagonal sums `S_n = Σ_j X_{j,π(j)}` and explicit
//! upper bounds on their smoothness `d_TV(S_n, 1 + S_n)` and Lévy
//! concentration `Q(S_n; t)`.
//!
//! * [`dist`]: finitely supported distributions and their functionals.
//! * [`diag_sum`]: the matrix model, exact enumeration, pairing
//!   decomposition and Monte-Carlo sampling.
//! * [`hafnian`]: generalized normalized hafnians and their bounds.
//! * [`random`]: seeded random instances for property campaigns.
//! * [`bounds`]: the constants `C̃(α, β)`, theorem-level bounds and the
//!   auxiliary inequalities they rest on.

pub mod bounds;
pub mod diag_sum;
pub mod dist;
pub mod error;
pub mod hafnian;
pub mod random;

pub use diag_sum::{
    exact_distribution, pair_mixture, pairing_decomposition, sample, MatrixModel, Permutation,
};
pub use dist::{tv_distance, AtomicDistribution, Distribution, Kind, LatticeDistribution};
pub use error::{Error, PairIndex, Result};
