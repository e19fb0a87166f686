//! Convergence-rate series: `alpha_t` of a deterministic walk on a time grid,
//! fitted with the decay models.
//!
//! The `p = 0` and `p = 1` walks are computed exactly (coherent evolution and
//! classical dynamic programming), so each series comes from a single run
//! sampled at every grid time.

use crate::analysis::{alpha_t_series, fit_decay, initial_guess, DecayModel, Distribution, FitResult};
use crate::classical::classical_distributions_at;
use crate::error::{invalid, Result};
use crate::params::{InitialState, WalkParams};
use crate::pure::pure_distributions_at;

/// Regression grid `t = 100, 200, ..., 2000`.
pub fn default_fit_grid() -> Vec<usize> {
    (1..=20).map(|k| 100 * k).collect()
}

/// `(|0,1> + i|0,2>) / sqrt 2`. Under the real coin family this state gives a
/// mirror-symmetric position law, which the left-tail width `epsilon_t`
/// presupposes. The real superposition drifts to one side instead.
pub fn balanced_coin_state() -> InitialState {
    InitialState::symmetric_imaginary()
}

/// Where an `alpha_t` series comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum RateSource {
    /// Coherent walk (`p = 0`) from the given coin state.
    Pure(InitialState),
    /// Classical walk (`p = 1`) from the given coin weights.
    Classical([f64; 2]),
}

impl RateSource {
    /// The deterministic source for decoherence `p`, with the symmetric
    /// initial conditions used for rate sweeps. Only `p = 0` and `p = 1` are
    /// deterministic; other values need a Monte Carlo or exact method.
    pub fn for_decoherence(p: f64) -> Option<Self> {
        if p == 0.0 {
            Some(Self::Pure(balanced_coin_state()))
        } else if p == 1.0 {
            Some(Self::Classical([0.5, 0.5]))
        } else {
            None
        }
    }

    /// Position laws at each of `times`, from one run.
    pub fn distributions(&self, lambda: f64, zeta: f64, times: &[usize]) -> Result<Vec<Distribution>> {
        let horizon = times.iter().copied().max().ok_or_else(|| invalid("times", "empty time grid"))?;
        match self {
            Self::Pure(init) => {
                let params = WalkParams::new(lambda, zeta, 0.0, horizon)?;
                pure_distributions_at(init, &params, times)
            }
            Self::Classical(weights) => {
                let params = WalkParams::new(lambda, zeta, 1.0, horizon)?;
                classical_distributions_at(*weights, &params, times)
            }
        }
    }

    /// `(t, alpha_t)` on `times`.
    pub fn alpha_t(&self, lambda: f64, zeta: f64, times: &[usize], alpha: f64) -> Result<Vec<(f64, f64)>> {
        alpha_t_series(&self.distributions(lambda, zeta, times)?, alpha)
    }
}

/// Fit `model` to `series` from the standard starting point.
pub fn fit_series(series: &[(f64, f64)], model: DecayModel) -> Result<FitResult> {
    fit_decay(series, model, initial_guess(series, model))
}
