//! Rescaling, tail statistics, decay regression, reference densities and
//! distribution distances.

mod distance;
mod distribution;
mod fit;
mod reference;
pub mod special;
mod tail;

pub use distance::{
    distribution_distance, ks_lattice, ks_reference, total_variation, total_variation_rescaled, Comparand, Metric,
};
pub use distribution::{Distribution, RescaledDistribution};
pub use fit::{
    fit_decay, goodness_of_fit, initial_guess, DecayModel, FitResult, FIT_GRADIENT_TOL, FIT_MAX_ITERATIONS,
    FIT_RELATIVE_TOL,
};
pub use reference::{coin_turning_variance, gaussian_regime_variance, zhang_variance, ReferenceDensity};
pub use tail::{alpha_t_series, tail_epsilon, TailStats, DEFAULT_ALPHA};
