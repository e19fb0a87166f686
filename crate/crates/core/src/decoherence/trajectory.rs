use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::KrausFamily;
use crate::analysis::Distribution;
use crate::coin::build_coin;
use crate::error::{invalid, Result};
use crate::params::{InitialState, MeasurementFamily, WalkParams};
use crate::pure::PureState;
use crate::rng::substream;

/// Component name used to derive trajectory substreams.
pub const TRAJECTORY_COMPONENT: &str = "trajectory";

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Draws a slot index with probability proportional to `weight(slot)`.
fn draw_slot<R: Rng + ?Sized>(state: &PureState, weight: impl Fn(&[Complex64; 2]) -> f64, rng: &mut R) -> usize {
    let total: f64 = state.slots().iter().map(&weight).sum();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (k, a) in state.slots().iter().enumerate() {
        let w = weight(a);
        if w > 0.0 {
            last_nonzero = k;
            acc += w;
            if target < acc {
                return k;
            }
        }
    }
    last_nonzero
}

fn draw_coin<R: Rng + ?Sized>(w1: f64, w2: f64, rng: &mut R) -> u8 {
    if rng.random::<f64>() * (w1 + w2) < w1 {
        1
    } else {
        2
    }
}

/// Born-rule sample of `(x, coin)`.
fn born_sample<R: Rng + ?Sized>(state: &PureState, rng: &mut R) -> (i64, u8) {
    let slot = draw_slot(state, |a| a[0].norm_sqr() + a[1].norm_sqr(), rng);
    let a = state.slots()[slot];
    (state.position_of_slot(slot), draw_coin(a[0].norm_sqr(), a[1].norm_sqr(), rng))
}

fn measure<R: Rng + ?Sized>(state: &mut PureState, family: MeasurementFamily, rng: &mut R) {
    let one = Complex64::new(1.0, 0.0);
    match family {
        MeasurementFamily::Total => {
            let (x, coin) = born_sample(state, rng);
            let amps = if coin == 1 { [one, ZERO] } else { [ZERO, one] };
            *state = PureState::localized(x, amps);
        }
        MeasurementFamily::Position => {
            let slot = draw_slot(state, |a| a[0].norm_sqr() + a[1].norm_sqr(), rng);
            let a = state.slots()[slot];
            let norm = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
            *state = PureState::localized(state.position_of_slot(slot), [a[0] / norm, a[1] / norm]);
        }
        MeasurementFamily::Coin => {
            let (w1, w2) = state
                .slots()
                .iter()
                .fold((0.0, 0.0), |(s1, s2), a| (s1 + a[0].norm_sqr(), s2 + a[1].norm_sqr()));
            let coin = draw_coin(w1, w2, rng);
            state.project_coin(coin);
        }
    }
}

/// One stochastic unraveling of the channel: after every unitary step the
/// state is measured in the family's basis with probability `p` and collapsed.
/// Returns a Born sample of `(x, coin)` at the horizon.
pub fn sample_trajectory<R: Rng + ?Sized>(
    init: &InitialState,
    kraus: &KrausFamily,
    params: &WalkParams,
    rng: &mut R,
) -> (i64, u8) {
    let mut state = PureState::new(init);
    for n in 1..=params.horizon {
        state.advance(&build_coin(n, params.lambda, params.zeta));
        if rng.random::<f64>() < kraus.strength {
            measure(&mut state, kraus.family, rng);
        }
        if state.slots().len() > 1 {
            trim(&mut state);
        }
    }
    born_sample(&state, rng)
}

/// Drops empty slots at both ends so collapsed states stay compact.
fn trim(state: &mut PureState) {
    let slots = state.slots();
    let empty = |a: &[Complex64; 2]| a[0] == ZERO && a[1] == ZERO;
    let lead = slots.iter().take_while(|a| empty(a)).count();
    if lead == slots.len() {
        return;
    }
    let tail = slots.iter().rev().take_while(|a| empty(a)).count();
    if lead > 0 || tail > 0 {
        state.truncate(lead, tail);
    }
}

/// Empirical position law of `samples` trajectories. Trajectory `k` uses
/// substream `k` of `seed`, so the histogram does not depend on scheduling.
/// Per-point standard errors are `sqrt(p_hat (1 - p_hat) / samples)`.
pub fn mc_distribution(
    init: &InitialState,
    kraus: &KrausFamily,
    params: &WalkParams,
    samples: usize,
    seed: u64,
) -> Result<Distribution> {
    params.validate()?;
    if samples == 0 {
        return Err(invalid("samples", "need at least one trajectory"));
    }
    let t = params.horizon;
    let width = 2 * t + 1;
    let counts = (0..samples as u64)
        .into_par_iter()
        .fold(
            || vec![0u64; width],
            |mut acc, k| {
                let mut rng = substream(seed, TRAJECTORY_COMPONENT, k);
                let (x, _) = sample_trajectory(init, kraus, params, &mut rng);
                acc[(x + t as i64) as usize] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    histogram_to_distribution(t, &counts, samples as u64)
}

pub(crate) fn histogram_to_distribution(horizon: usize, counts: &[u64], total: u64) -> Result<Distribution> {
    let n = total as f64;
    let masses: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let stderr = masses.iter().map(|p| (p * (1.0 - p) / n).sqrt()).collect();
    Ok(Distribution::new(horizon, masses)?.with_stderr(stderr))
}
