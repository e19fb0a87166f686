use num_complex::Complex64;

use super::KrausFamily;
use crate::analysis::Distribution;
use crate::coin::{build_coin, CoinOperator};
use crate::error::{Result, WalkError};
use crate::params::{InitialState, WalkParams};
use crate::pure::PureState;

/// Horizon above which exact evolution refuses to run unless the cap is raised.
pub const DEFAULT_EXACT_CAP: usize = 300;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Density operator on the parity window at `time`.
///
/// Basis index `b = 2 * slot + coin - 1`, where slot `k` is position `2k - time`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    time: usize,
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityOperator {
    /// `|0><0| (x) |phi><phi|`.
    pub fn from_initial(init: &InitialState) -> Self {
        Self::from_pure(&PureState::new(init))
    }

    /// The projector onto a pure state that started at the origin.
    pub fn from_pure(state: &PureState) -> Self {
        assert!(
            state.leftmost() == -(state.time() as i64) && state.slots().len() == state.time() + 1,
            "density window must cover [-time, time] of a walk started at the origin"
        );
        let amps: Vec<Complex64> = state.slots().iter().flat_map(|a| *a).collect();
        let dim = amps.len();
        let mut entries = vec![ZERO; dim * dim];
        for (r, ar) in amps.iter().enumerate() {
            for (c, ac) in amps.iter().enumerate() {
                entries[r * dim + c] = ar * ac.conj();
            }
        }
        Self {
            time: state.time(),
            dim,
            entries,
        }
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    fn basis_index(&self, x: i64, coin: u8) -> Option<usize> {
        let offset = x + self.time as i64;
        if offset < 0 || offset % 2 != 0 || offset > 2 * self.time as i64 {
            return None;
        }
        Some(offset as usize + usize::from(coin - 1))
    }

    /// `<x, i| rho |y, j>`; zero off the parity window.
    pub fn entry(&self, x: i64, i: u8, y: i64, j: u8) -> Complex64 {
        match (self.basis_index(x, i), self.basis_index(y, j)) {
            (Some(r), Some(c)) => self.entries[r * self.dim + c],
            _ => ZERO,
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|b| self.entries[b * self.dim + b]).sum()
    }

    /// Largest `|rho_rc - conj(rho_cr)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.entries[r * n + c] - self.entries[c * n + r].conj()).norm());
            }
        }
        worst
    }

    /// Checks that `rho + tol * I` admits a Cholesky factorization, i.e. the
    /// smallest eigenvalue is at least `-tol`. Cubic in the dimension.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let n = self.dim;
        let mut l = vec![ZERO; n * n];
        for j in 0..n {
            let mut diag = self.entries[j * n + j].re + tol;
            for k in 0..j {
                diag -= l[j * n + k].norm_sqr();
            }
            if diag <= 0.0 {
                return false;
            }
            let d = diag.sqrt();
            l[j * n + j] = Complex64::new(d, 0.0);
            for i in (j + 1)..n {
                let mut v = self.entries[i * n + j];
                for k in 0..j {
                    v -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = v / d;
            }
        }
        true
    }

    /// `p(x) = Tr[(|x><x| (x) I) rho]`.
    pub fn position_distribution(&self) -> Result<Distribution> {
        let t = self.time as i64;
        Distribution::from_points(
            self.time,
            (0..=self.time).map(|k| {
                let b = 2 * k;
                let m = self.entries[b * self.dim + b].re + self.entries[(b + 1) * self.dim + b + 1].re;
                (2 * k as i64 - t, m)
            }),
        )
    }

    /// `(1 - p) U rho U* + p D(U rho U*)` with coin `coin`.
    fn advanced(&self, coin: &CoinOperator, kraus: &KrausFamily) -> Self {
        let old_sites = self.time + 1;
        let sites = old_sites + 1;
        let dim = 2 * sites;
        let n_old = self.dim;
        let c = &coin.entries;
        let mut out = vec![ZERO; dim * dim];
        let coherent = 1.0 - kraus.strength;

        for k in 0..old_sites {
            for l in 0..old_sites {
                let r0 = 2 * k * n_old + 2 * l;
                let b = [
                    [self.entries[r0], self.entries[r0 + 1]],
                    [self.entries[r0 + n_old], self.entries[r0 + n_old + 1]],
                ];
                // C B C^dagger on the 2x2 coin block
                let mut cb = [[ZERO; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        cb[i][j] = c[i][0] * b[0][j] + c[i][1] * b[1][j];
                    }
                }
                for i in 0..2 {
                    // coin 1 shifts right: slot k -> k + 1; coin 2 keeps slot k
                    let row_slot = k + usize::from(i == 0);
                    for j in 0..2 {
                        let col_slot = l + usize::from(j == 0);
                        let v = cb[i][0] * c[j][0].conj() + cb[i][1] * c[j][1].conj();
                        let factor = if kraus.keeps(row_slot, i, col_slot, j) { 1.0 } else { coherent };
                        out[(2 * row_slot + i) * dim + 2 * col_slot + j] = v * factor;
                    }
                }
            }
        }
        Self {
            time: self.time + 1,
            dim,
            entries: out,
        }
    }
}

/// One application of the superoperator at step `n` to `rho` at time `n - 1`.
/// The decoherence strength is `kraus.strength`; `params` supplies the coin.
pub fn exact_step(
    rho: &DensityOperator,
    n: usize,
    kraus: &KrausFamily,
    params: &WalkParams,
) -> Result<DensityOperator> {
    if n == 0 || rho.time + 1 != n {
        return Err(WalkError::TimeMismatch {
            state_time: rho.time,
            step: n,
            expected: n.saturating_sub(1),
        });
    }
    Ok(rho.advanced(&build_coin(n, params.lambda, params.zeta), kraus))
}

/// `rho_t` for `t = params.horizon`, refusing horizons above `cap`.
pub fn evolve_density(
    init: &InitialState,
    kraus: &KrausFamily,
    params: &WalkParams,
    cap: usize,
) -> Result<DensityOperator> {
    params.validate()?;
    if params.horizon > cap {
        return Err(WalkError::HorizonAboveCap {
            horizon: params.horizon,
            cap,
        });
    }
    let mut rho = DensityOperator::from_initial(init);
    for n in 1..=params.horizon {
        rho = rho.advanced(&build_coin(n, params.lambda, params.zeta), kraus);
    }
    Ok(rho)
}

/// `p_d(x, t)` from exact density-operator evolution with the default cap.
pub fn evolve_exact(init: &InitialState, kraus: &KrausFamily, params: &WalkParams) -> Result<Distribution> {
    evolve_exact_with_cap(init, kraus, params, DEFAULT_EXACT_CAP)
}

pub fn evolve_exact_with_cap(
    init: &InitialState,
    kraus: &KrausFamily,
    params: &WalkParams,
    cap: usize,
) -> Result<Distribution> {
    evolve_density(init, kraus, params, cap)?.position_distribution()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::MeasurementFamily;
    use crate::pure::{evolve_pure, position_distribution};

    fn total(p: f64) -> KrausFamily {
        KrausFamily::new(MeasurementFamily::Total, p).unwrap()
    }

    #[test]
    fn zero_strength_is_unitary_conjugation() {
        let params = WalkParams::new(0.8, 0.6, 0.0, 6).unwrap();
        let init = InitialState::symmetric_imaginary();
        for family in MeasurementFamily::ALL {
            let kraus = KrausFamily::new(family, 0.0).unwrap();
            let mut rho = DensityOperator::from_initial(&init);
            let mut psi = PureState::new(&init);
            for n in 1..=6 {
                rho = exact_step(&rho, n, &kraus, &params).unwrap();
                psi = crate::pure::step_pure(&psi, n, &params).unwrap();
                let expected = DensityOperator::from_pure(&psi);
                for (a, b) in rho.entries().iter().zip(expected.entries()) {
                    assert!((a - b).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn full_total_decoherence_one_hadamard_step() {
        let params = WalkParams::hadamard(1.0, 1).unwrap();
        let rho0 = DensityOperator::from_initial(&InitialState::basis(1));
        let rho = exact_step(&rho0, 1, &total(1.0), &params).unwrap();
        for r in 0..rho.dim() {
            for c in 0..rho.dim() {
                if r != c {
                    assert_eq!(rho.entries()[r * rho.dim() + c], ZERO);
                }
            }
        }
        assert!((rho.entry(1, 1, 1, 1).re - 0.5).abs() < 1e-15);
        assert!((rho.entry(-1, 2, -1, 2).re - 0.5).abs() < 1e-15);
        assert_eq!(rho.entry(1, 2, 1, 2), ZERO);
    }

    #[test]
    fn half_strength_halves_coherences() {
        let params = WalkParams::hadamard(0.5, 1).unwrap();
        let rho0 = DensityOperator::from_initial(&InitialState::basis(1));
        let coherent = exact_step(&rho0, 1, &total(0.0), &params).unwrap();
        let half = exact_step(&rho0, 1, &total(0.5), &params).unwrap();
        for r in 0..half.dim() {
            for c in 0..half.dim() {
                let a = coherent.entries()[r * half.dim() + c];
                let b = half.entries()[r * half.dim() + c];
                let expected = if r == c { a } else { a * 0.5 };
                assert!((b - expected).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn dephasing_matches_explicit_kraus_sum() {
        // sum_n A_n M A_n^dagger with explicit operators equals the analytic update
        let params = WalkParams::new(0.9, 0.5, 0.0, 4).unwrap();
        let init = InitialState::symmetric();
        for family in MeasurementFamily::ALL {
            let kraus = KrausFamily::new(family, 0.37).unwrap();
            let unitary = KrausFamily::new(family, 0.0).unwrap();
            let mut rho = DensityOperator::from_initial(&init);
            for n in 1..=4 {
                let m = exact_step(&rho, n, &unitary, &params).unwrap();
                let fast = exact_step(&rho, n, &kraus, &params).unwrap();
                let ops = kraus.operators_on_window(n + 1);
                let mut slow = vec![ZERO; m.dim() * m.dim()];
                for op in &ops {
                    for (s, v) in slow.iter_mut().zip(op.conjugate(m.entries())) {
                        *s += v;
                    }
                }
                for (a, b) in fast.entries().iter().zip(&slow) {
                    assert!((a - b).norm() < 1e-14, "{family:?} step {n}");
                }
                rho = fast;
            }
        }
    }

    #[test]
    fn invariants_hold_for_all_families() {
        let params = WalkParams::new(0.7, 0.8, 0.0, 12).unwrap();
        for family in MeasurementFamily::ALL {
            for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let kraus = KrausFamily::new(family, p).unwrap();
                let mut rho = DensityOperator::from_initial(&InitialState::symmetric_imaginary());
                for n in 1..=12 {
                    rho = exact_step(&rho, n, &kraus, &params).unwrap();
                    assert!((rho.trace() - 1.0).norm() < 1e-10);
                    assert!(rho.hermiticity_defect() < 1e-10);
                }
                assert!(rho.is_positive_semidefinite(1e-8), "{family:?} p={p}");
            }
        }
    }

    #[test]
    fn zero_strength_matches_pure_walk() {
        let params = WalkParams::new(0.5, 1.0, 0.0, 40).unwrap();
        let init = InitialState::symmetric();
        let exact = evolve_exact(&init, &total(0.0), &params).unwrap();
        let pure = position_distribution(&evolve_pure(&init, &params)).unwrap();
        for ((_, a), (_, b)) in exact.iter().zip(pure.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let params = WalkParams::hadamard(0.5, 301).unwrap();
        let err = evolve_exact(&InitialState::basis(1), &total(0.5), &params).unwrap_err();
        assert_eq!(err, WalkError::HorizonAboveCap { horizon: 301, cap: 300 });
        assert!(err.to_string().contains("Monte Carlo"));
        let params = params.with_horizon(20);
        assert!(evolve_exact_with_cap(&InitialState::basis(1), &total(0.5), &params, 10).is_err());
    }

    #[test]
    fn time_mismatch_is_rejected() {
        let params = WalkParams::hadamard(0.5, 3).unwrap();
        let rho0 = DensityOperator::from_initial(&InitialState::basis(1));
        assert!(exact_step(&rho0, 2, &total(0.5), &params).is_err());
    }
}
