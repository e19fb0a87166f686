//! Dispatch from a configured method to the evolution engines.

use qwalk_core::classical::classical_distributions_at;
use qwalk_core::decoherence::{exact_step, mc_distribution, DensityOperator, KrausFamily};
use qwalk_core::pure::pure_distributions_at;
use qwalk_core::siy::{siy_estimate, SiySamples};
use qwalk_core::{Distribution, InitialState, WalkParams};

use crate::config::{check_method, ExperimentConfig, InitSpec, Method, Samples};
use crate::error::Result;

/// A method with its initial state and sampling budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Engine {
    pub method: Method,
    pub init: InitSpec,
    pub samples: Samples,
    pub seed: u64,
    pub cap: usize,
}

impl Engine {
    pub fn from_config(config: &ExperimentConfig) -> Self {
        Self {
            method: config.method,
            init: config.init,
            samples: config.samples,
            seed: config.seed,
            cap: config.cap,
        }
    }

    /// The law at `params.horizon`.
    pub fn distribution(&self, params: &WalkParams) -> Result<Distribution> {
        Ok(self.distributions_at(params, &[params.horizon])?.remove(0))
    }

    /// Laws at each of `times` (ascending, each at most `params.horizon`).
    /// Deterministic methods take one run with snapshots; Monte Carlo
    /// methods run once per time with the same seed.
    pub fn distributions_at(&self, params: &WalkParams, times: &[usize]) -> Result<Vec<Distribution>> {
        check_method(self.method, params, self.init, self.cap)?;
        let init = self.init.state();
        let out = match self.method {
            Method::Pure => pure_distributions_at(&init, params, times)?,
            Method::Classical => classical_distributions_at(init.coin_weights(), params, times)?,
            Method::Exact => exact_snapshots(&init, params, times)?,
            Method::Trajectory => {
                let n = match self.samples {
                    Samples::Trajectories(n) => n,
                    _ => crate::config::DEFAULT_TRAJECTORIES,
                };
                let kraus = KrausFamily::from_params(params);
                times
                    .iter()
                    .map(|&t| Ok(mc_distribution(&init, &kraus, &params.with_horizon(t), n, self.seed)?))
                    .collect::<Result<Vec<_>>>()?
            }
            Method::Siy => {
                let samples = match self.samples {
                    Samples::Siy(s) => s,
                    _ => SiySamples::default(),
                };
                times
                    .iter()
                    .map(|&t| Ok(siy_estimate(&init, &params.with_horizon(t), samples, self.seed)?))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(out)
    }
}

fn exact_snapshots(init: &InitialState, params: &WalkParams, times: &[usize]) -> Result<Vec<Distribution>> {
    let kraus = KrausFamily::from_params(params);
    let last = times.iter().copied().max().unwrap_or(0);
    let mut rho = DensityOperator::from_initial(init);
    let mut out = Vec::with_capacity(times.len());
    for n in 1..=last {
        rho = exact_step(&rho, n, &kraus, params)?;
        if times.contains(&n) {
            out.push(rho.position_distribution()?);
        }
    }
    Ok(out)
}
