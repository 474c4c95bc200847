//! Constants and upper bounds for the smoothness and concentration of `S_n`.

pub mod constants;
pub mod moments;
pub mod pairs;
pub mod theorems;

pub use constants::{
    c_of_alpha, c_tilde, h_alpha_beta, quintic, quintic_coefficients, quintic_residual,
    ConstantResult,
};
pub use moments::{inverse_power_moment_bounds, two_point_extremal, MomentBounds};
pub use pairs::{bernoulli_pair_stats, BernoulliPairStats};
pub use theorems::{
    bound_from_aggregate, entrywise_relaxation, generalized_bounds, kr_bound,
    theorem_bernoulli_bounds, theorem_concentration_bound, theorem_smoothness_bound, BoundName,
    BoundReport, Functional, ModelBounds, PairTable, Relaxation, DOMINANCE_TOL, EPSILON_FLOOR,
};
