//! The `(lambda, zeta)` coin family `C_n`.

use num_complex::Complex64;

/// `lambda * n^(-zeta)` before clamping.
pub fn raw_coin_parameter(n: usize, lambda: f64, zeta: f64) -> f64 {
    debug_assert!(n >= 1, "coin time index starts at 1");
    lambda * (n as f64).powf(-zeta)
}

/// Turning probability `mu_n = min(lambda * n^(-zeta), 1)`.
pub fn coin_parameter(n: usize, lambda: f64, zeta: f64) -> f64 {
    raw_coin_parameter(n, lambda, zeta).min(1.0)
}

/// A 2x2 coin unitary applied at step `time_index`.
///
/// Entries are indexed `[row][column]`; the column is the incoming coin, so
/// `C |j> = sum_i entries[i][j] |i>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinOperator {
    pub entries: [[Complex64; 2]; 2],
    pub time_index: usize,
}

impl CoinOperator {
    /// Entry `<i|C|j>` for 1-based coin labels.
    pub fn get(&self, i: u8, j: u8) -> Complex64 {
        self.entries[usize::from(i - 1)][usize::from(j - 1)]
    }

    /// `C |a1, a2>`.
    #[inline]
    pub fn apply(&self, amp: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.entries;
        [
            m[0][0] * amp[0] + m[0][1] * amp[1],
            m[1][0] * amp[0] + m[1][1] * amp[1],
        ]
    }

    /// Largest entrywise deviation of `C^dagger C` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let m = &self.entries;
        let mut worst = 0.0_f64;
        for i in 0..2 {
            for j in 0..2 {
                let prod: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod - target).norm());
            }
        }
        worst
    }
}

/// Builds `C_n = [[sqrt(1-mu), sqrt(mu)], [sqrt(mu), -sqrt(1-mu)]]`.
pub fn build_coin(n: usize, lambda: f64, zeta: f64) -> CoinOperator {
    let mu = coin_parameter(n, lambda, zeta);
    let stay = Complex64::new((1.0 - mu).sqrt(), 0.0);
    let turn = Complex64::new(mu.sqrt(), 0.0);
    CoinOperator {
        entries: [[stay, turn], [turn, -stay]],
        time_index: n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn close(a: Complex64, b: f64) -> bool {
        (a - b).norm() < 1e-15
    }

    #[test]
    fn coin_parameter_examples() {
        assert!((coin_parameter(10, 0.5, 1.0) - 0.05).abs() < 1e-15);
        assert_eq!(coin_parameter(1, 1.5, 1.0), 1.0);
        assert_eq!(coin_parameter(7, 0.5, 0.0), 0.5);
    }

    #[test]
    fn zeta_zero_half_gives_hadamard() {
        for n in [1, 2, 17, 1000] {
            let c = build_coin(n, 0.5, 0.0);
            assert!(close(c.get(1, 1), FRAC_1_SQRT_2));
            assert!(close(c.get(1, 2), FRAC_1_SQRT_2));
            assert!(close(c.get(2, 1), FRAC_1_SQRT_2));
            assert!(close(c.get(2, 2), -FRAC_1_SQRT_2));
        }
    }

    #[test]
    fn full_turn_and_quarter_turn() {
        let c = build_coin(1, 1.0, 1.0);
        assert!(close(c.get(1, 1), 0.0) && close(c.get(2, 2), 0.0));
        assert!(close(c.get(1, 2), 1.0) && close(c.get(2, 1), 1.0));

        let c = build_coin(4, 1.0, 1.0);
        let half_sqrt3 = 3.0_f64.sqrt() / 2.0;
        assert!(close(c.get(1, 1), half_sqrt3));
        assert!(close(c.get(1, 2), 0.5));
        assert!(close(c.get(2, 1), 0.5));
        assert!(close(c.get(2, 2), -half_sqrt3));
    }

    #[test]
    fn action_on_basis_kets() {
        let c = build_coin(3, 0.9, 1.0);
        let mu: f64 = 0.3;
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let up = c.apply([one, zero]);
        assert!(close(up[0], (1.0 - mu).sqrt()) && close(up[1], mu.sqrt()));
        let down = c.apply([zero, one]);
        assert!(close(down[0], mu.sqrt()) && close(down[1], -(1.0 - mu).sqrt()));
    }

    proptest! {
        #[test]
        fn coins_are_unitary(n in 1usize..100_000, lambda in 0.0f64..5.0, zeta in 0.0f64..3.0) {
            let c = build_coin(n, lambda, zeta);
            prop_assert!(c.unitarity_defect() < 1e-12);
            for row in c.entries {
                for e in row {
                    prop_assert_eq!(e.im, 0.0);
                }
            }
        }
    }
}
