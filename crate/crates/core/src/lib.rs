//! Time-inhomogeneous quantum walks on the integers with tunable decoherence.
//!
//! The walk uses the coin family
//! `C_n = [[sqrt(1 - mu_n), sqrt(mu_n)], [sqrt(mu_n), -sqrt(1 - mu_n)]]` with
//! `mu_n = min(lambda n^-zeta, 1)` and the standard shift. After each step a
//! projective measurement happens with probability `p`. The crate provides:
//!
//! * [`pure`]: coherent evolution (`p = 0`);
//! * [`decoherence`]: exact density-operator evolution and trajectory Monte Carlo;
//! * [`siy`]: the sigma-I-Y sampler built from geometric measurement times,
//!   segment coin marginals and jump laws;
//! * [`classical`]: exact dynamic programming for `p = 1`;
//! * [`analysis`]: rescaling, tail widths, decay regression, reference
//!   densities and distances;
//! * [`rates`]: `alpha_t` series and decay fits for the exact `p = 0` and
//!   `p = 1` walks.

pub mod analysis;
pub mod classical;
pub mod coin;
pub mod decoherence;
pub mod error;
pub mod params;
pub mod pure;
pub mod rates;
pub mod rng;
pub mod siy;

pub use analysis::{Distribution, RescaledDistribution};
pub use coin::{build_coin, coin_parameter, CoinOperator};
pub use error::{Result, WalkError};
pub use params::{InitialState, MeasurementFamily, ShiftKind, WalkParams};
pub use pure::{evolve_pure, position_distribution, step_pure, PureState};
