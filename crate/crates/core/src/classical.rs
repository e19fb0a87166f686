//! Exact dynamic programming for the classical coin-turning walk, the `p = 1`
//! limit of the decoherent walk.

use crate::analysis::Distribution;
use crate::coin::coin_parameter;
use crate::error::{invalid, Result};
use crate::params::WalkParams;

/// `[[1 - mu_n, mu_n], [mu_n, 1 - mu_n]]`.
pub fn classical_coin_matrix(n: usize, lambda: f64, zeta: f64) -> [[f64; 2]; 2] {
    let mu = coin_parameter(n, lambda, zeta);
    [[1.0 - mu, mu], [mu, 1.0 - mu]]
}

/// Joint law of `(position, coin)`. Slot `k` holds position `2k - time`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalState {
    time: usize,
    masses: Vec<[f64; 2]>,
}

impl ClassicalState {
    pub fn new(coin_weights: [f64; 2]) -> Self {
        Self {
            time: 0,
            masses: vec![coin_weights],
        }
    }

    pub fn time(&self) -> usize {
        self.time
    }

    /// Mass at `(x, coin)` with `coin` in `{1, 2}`.
    pub fn mass(&self, x: i64, coin: u8) -> f64 {
        let offset = x + self.time as i64;
        if offset < 0 || offset % 2 != 0 {
            return 0.0;
        }
        self.masses
            .get((offset / 2) as usize)
            .map_or(0.0, |m| m[usize::from(coin - 1)])
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().map(|m| m[0] + m[1]).sum()
    }

    /// Coin turn by the step-`n` matrix, then shift.
    pub fn advance(&mut self, n: usize, lambda: f64, zeta: f64) {
        let [[stay, turn], _] = classical_coin_matrix(n, lambda, zeta);
        let mut next = vec![[0.0; 2]; self.masses.len() + 1];
        for (k, &[w1, w2]) in self.masses.iter().enumerate() {
            next[k + 1][0] = stay * w1 + turn * w2;
            next[k][1] = turn * w1 + stay * w2;
        }
        self.masses = next;
        self.time += 1;
    }

    pub fn position_distribution(&self) -> Result<Distribution> {
        let t = self.time as i64;
        Distribution::from_points(
            self.time,
            self.masses
                .iter()
                .enumerate()
                .map(|(k, m)| (2 * k as i64 - t, m[0] + m[1])),
        )
    }
}

fn check_coin_weights(init: [f64; 2]) -> Result<()> {
    if init.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || (init[0] + init[1] - 1.0).abs() > 1e-12 {
        return Err(invalid("init", format!("coin weights must be a probability vector, got {init:?}")));
    }
    Ok(())
}

/// Evolves the joint law for `params.horizon` steps from position 0 with
/// coin law `init`.
pub fn evolve_classical(init: [f64; 2], params: &WalkParams) -> Result<(Distribution, ClassicalState)> {
    check_coin_weights(init)?;
    let mut state = ClassicalState::new(init);
    for n in 1..=params.horizon {
        state.advance(n, params.lambda, params.zeta);
    }
    Ok((state.position_distribution()?, state))
}

/// Position marginals of one classical run at each of `times`, in the order given.
pub fn classical_distributions_at(
    init: [f64; 2],
    params: &WalkParams,
    times: &[usize],
) -> Result<Vec<Distribution>> {
    check_coin_weights(init)?;
    if times.iter().any(|&t| t == 0 || t > params.horizon) {
        return Err(invalid("times", format!("snapshot times must lie in 1..={}", params.horizon)));
    }
    let last = times.iter().copied().max().unwrap_or(0);
    let mut out: Vec<Option<Distribution>> = vec![None; times.len()];
    let mut state = ClassicalState::new(init);
    for n in 1..=last {
        state.advance(n, params.lambda, params.zeta);
        for (slot, _) in times.iter().enumerate().filter(|(_, &t)| t == n) {
            out[slot] = Some(state.position_distribution()?);
        }
    }
    Ok(out.into_iter().map(|d| d.expect("every time visited")).collect())
}
