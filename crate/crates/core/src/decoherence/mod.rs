//! Decoherent evolution: Kraus families, exact density-operator propagation
//! and the trajectory (stochastic unraveling) estimator.

mod density;
mod kraus;
mod trajectory;

pub use density::{
    evolve_density, evolve_exact, evolve_exact_with_cap, exact_step, DensityOperator, DEFAULT_EXACT_CAP,
};
pub use kraus::{KrausFamily, KrausOperator};
pub use trajectory::{mc_distribution, sample_trajectory, TRAJECTORY_COMPONENT};
