//! Coherent (`p = 0`) evolution `|psi_t> = U_t ... U_1 |psi_0>` with `U_n = S F_n`.
//!
//! Amplitudes live on the parity-compatible window only: slot `k` holds
//! position `left + 2k`, so a state after `time` steps from a single site
//! needs at most `time + 1` slots.

use num_complex::Complex64;

use crate::analysis::Distribution;
use crate::coin::{build_coin, CoinOperator};
use crate::error::{Result, WalkError};
use crate::params::{InitialState, WalkParams};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    time: usize,
    left: i64,
    amps: Vec<[Complex64; 2]>,
}

impl PureState {
    /// `|0> (x) (a1|1> + a2|2>)` at time 0.
    pub fn new(init: &InitialState) -> Self {
        Self::localized(0, init.amplitudes())
    }

    /// A state supported on the single site `origin`.
    pub fn localized(origin: i64, coin: [Complex64; 2]) -> Self {
        Self {
            time: 0,
            left: origin,
            amps: vec![coin],
        }
    }

    /// Number of steps applied since the state was localized.
    pub fn time(&self) -> usize {
        self.time
    }

    /// Position of slot 0.
    pub fn leftmost(&self) -> i64 {
        self.left
    }

    #[inline]
    pub fn position_of_slot(&self, slot: usize) -> i64 {
        self.left + 2 * slot as i64
    }

    pub fn slots(&self) -> &[[Complex64; 2]] {
        &self.amps
    }

    /// `<x, coin | psi>` with `coin` in `{1, 2}`.
    pub fn amplitude(&self, x: i64, coin: u8) -> Complex64 {
        let offset = x - self.left;
        if offset < 0 || offset % 2 != 0 {
            return ZERO;
        }
        self.amps
            .get((offset / 2) as usize)
            .map_or(ZERO, |a| a[usize::from(coin - 1)])
    }

    /// `(x, [amp coin 1, amp coin 2])` ascending in `x`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, [Complex64; 2])> + '_ {
        self.amps
            .iter()
            .enumerate()
            .map(move |(k, a)| (self.position_of_slot(k), *a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a[0].norm_sqr() + a[1].norm_sqr()).sum()
    }

    /// Applies the coin at every site, then the standard shift
    /// (coin 1 moves `+1`, coin 2 moves `-1`).
    pub fn advance(&mut self, coin: &CoinOperator) {
        let mut next = vec![[ZERO; 2]; self.amps.len() + 1];
        for (k, a) in self.amps.iter().enumerate() {
            let [up, down] = coin.apply(*a);
            next[k + 1][0] = up;
            next[k][1] = down;
        }
        self.amps = next;
        self.left -= 1;
        self.time += 1;
    }

    /// Removes `lead` slots from the left and `tail` slots from the right.
    pub(crate) fn truncate(&mut self, lead: usize, tail: usize) {
        self.amps.truncate(self.amps.len() - tail);
        self.amps.drain(..lead);
        self.left += 2 * lead as i64;
    }

    /// Replaces the state by its collapse onto coin `keep`, renormalized.
    /// Returns the probability of that outcome.
    pub(crate) fn project_coin(&mut self, keep: u8) -> f64 {
        let drop = usize::from(2 - keep);
        let keep_idx = usize::from(keep - 1);
        let weight: f64 = self.amps.iter().map(|a| a[keep_idx].norm_sqr()).sum();
        let scale = 1.0 / weight.sqrt();
        for a in &mut self.amps {
            a[drop] = ZERO;
            a[keep_idx] *= scale;
        }
        weight
    }
}

/// One step `U_n = S F_n` applied to a state at time `n - 1`.
pub fn step_pure(state: &PureState, n: usize, params: &WalkParams) -> Result<PureState> {
    if n == 0 || state.time + 1 != n {
        return Err(WalkError::TimeMismatch {
            state_time: state.time,
            step: n,
            expected: n.saturating_sub(1),
        });
    }
    let mut next = state.clone();
    next.advance(&build_coin(n, params.lambda, params.zeta));
    Ok(next)
}

/// `U_t ... U_1 |psi_0>` for `t = params.horizon`.
pub fn evolve_pure(init: &InitialState, params: &WalkParams) -> PureState {
    let mut state = PureState::new(init);
    for n in 1..=params.horizon {
        state.advance(&build_coin(n, params.lambda, params.zeta));
    }
    state
}

/// Position distributions of a single coherent run at each of `times`
/// (any order, each in `1..=params.horizon`), returned in the order given.
pub fn pure_distributions_at(
    init: &InitialState,
    params: &WalkParams,
    times: &[usize],
) -> Result<Vec<Distribution>> {
    let last = times.iter().copied().max().unwrap_or(0);
    if last > params.horizon || times.contains(&0) {
        return Err(crate::error::invalid(
            "times",
            format!("snapshot times must lie in 1..={}", params.horizon),
        ));
    }
    let mut out: Vec<Option<Distribution>> = vec![None; times.len()];
    let mut state = PureState::new(init);
    for n in 1..=last {
        state.advance(&build_coin(n, params.lambda, params.zeta));
        for (slot, _) in times.iter().enumerate().filter(|(_, &t)| t == n) {
            out[slot] = Some(position_distribution(&state)?);
        }
    }
    Ok(out.into_iter().map(|d| d.expect("every time visited")).collect())
}

/// `p_t(x) = sum_i |<x, i | psi_t>|^2`, on the window `[-T, T]` where `T`
/// is the larger of `time` and the furthest supported site.
pub fn position_distribution(state: &PureState) -> Result<Distribution> {
    let right = state.position_of_slot(state.amps.len() - 1);
    let horizon = state
        .time
        .max(state.left.unsigned_abs() as usize)
        .max(right.unsigned_abs() as usize);
    Distribution::from_points(
        horizon,
        state.iter().map(|(x, a)| (x, a[0].norm_sqr() + a[1].norm_sqr())),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn assert_amp(state: &PureState, x: i64, coin: u8, expected: f64) {
        let got = state.amplitude(x, coin);
        assert!(
            (got - c(expected)).norm() < 1e-14,
            "amplitude at ({x},{coin}) = {got}, expected {expected}"
        );
    }

    #[test]
    fn hadamard_first_and_second_step() {
        let params = WalkParams::hadamard(0.0, 2).unwrap();
        let s0 = PureState::new(&InitialState::basis(1));
        let s1 = step_pure(&s0, 1, &params).unwrap();
        assert_amp(&s1, 1, 1, FRAC_1_SQRT_2);
        assert_amp(&s1, -1, 2, FRAC_1_SQRT_2);
        assert_amp(&s1, 1, 2, 0.0);
        assert_amp(&s1, -1, 1, 0.0);

        let s2 = step_pure(&s1, 2, &params).unwrap();
        assert_amp(&s2, 2, 1, 0.5);
        assert_amp(&s2, 0, 1, 0.5);
        assert_amp(&s2, 0, 2, 0.5);
        assert_amp(&s2, -2, 2, -0.5);
        assert_amp(&s2, 2, 2, 0.0);
        assert_amp(&s2, -2, 1, 0.0);

        let d = position_distribution(&s2).unwrap();
        assert!((d.mass(2) - 0.25).abs() < 1e-15);
        assert!((d.mass(0) - 0.5).abs() < 1e-15);
        assert!((d.mass(-2) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn full_turn_coin_sends_coin_one_left() {
        let params = WalkParams::new(1.0, 1.0, 0.0, 1).unwrap();
        let s1 = step_pure(&PureState::new(&InitialState::basis(1)), 1, &params).unwrap();
        assert_amp(&s1, -1, 2, 1.0);
        assert!((s1.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn time_mismatch_is_rejected() {
        let params = WalkParams::hadamard(0.0, 3).unwrap();
        let s0 = PureState::new(&InitialState::basis(1));
        assert!(matches!(
            step_pure(&s0, 2, &params),
            Err(WalkError::TimeMismatch { .. })
        ));
        assert!(step_pure(&s0, 0, &params).is_err());
    }

    #[test]
    fn zero_lambda_is_ballistic() {
        let params = WalkParams::new(0.0, 1.0, 0.0, 5).unwrap();
        let d = position_distribution(&evolve_pure(&InitialState::basis(1), &params)).unwrap();
        assert_eq!(d.mass(5), 1.0);
    }

    #[test]
    fn distribution_examples() {
        let half = FRAC_1_SQRT_2;
        let mut s = PureState::localized(0, [c(1.0), c(0.0)]);
        s.amps = vec![[c(0.0), c(half)], [c(half), c(0.0)]];
        s.time = 1;
        s.left = -1;
        let d = position_distribution(&s).unwrap();
        assert!((d.mass(1) - 0.5).abs() < 1e-15 && (d.mass(-1) - 0.5).abs() < 1e-15);

        let s = PureState::localized(3, [c(0.0), c(1.0)]);
        let d = position_distribution(&s).unwrap();
        assert_eq!(d.mass(3), 1.0);
    }

    #[test]
    fn long_hadamard_run_keeps_norm() {
        let params = WalkParams::hadamard(0.0, 2000).unwrap();
        let state = evolve_pure(&InitialState::symmetric(), &params);
        assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
        assert_eq!(state.slots().len(), 2001);
    }

    #[test]
    fn snapshots_match_independent_runs() {
        let params = WalkParams::new(0.7, 1.0, 0.0, 40).unwrap();
        let init = InitialState::symmetric();
        let snaps = pure_distributions_at(&init, &params, &[40, 10]).unwrap();
        let direct = position_distribution(&evolve_pure(&init, &params.with_horizon(10))).unwrap();
        assert_eq!(snaps[1], direct);
        assert_eq!(snaps[0].horizon(), 40);
        assert!(pure_distributions_at(&init, &params, &[41]).is_err());
    }
}
