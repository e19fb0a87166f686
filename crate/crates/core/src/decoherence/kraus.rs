use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::params::{MeasurementFamily, WalkParams};

/// A measurement family `{A_0 = sqrt(1-p) I} U {sqrt(p) P_k}` where the
/// projectors `P_k` run over the family's basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausFamily {
    pub family: MeasurementFamily,
    pub strength: f64,
}

/// Explicit Kraus operator on a finite window, stored densely in the basis
/// `(slot, coin)` with index `2 * slot + coin - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausOperator {
    pub dim: usize,
    pub entries: Vec<Complex64>,
}

impl KrausFamily {
    pub fn new(family: MeasurementFamily, strength: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&strength) {
            return Err(invalid("p", format!("must lie in [0, 1], got {strength}")));
        }
        Ok(Self { family, strength })
    }

    pub fn from_params(params: &WalkParams) -> Self {
        Self {
            family: params.measurement_family,
            strength: params.decoherence,
        }
    }

    /// Whether the dephasing map `D` keeps the matrix element between basis
    /// states `(k, i)` and `(l, j)`.
    #[inline]
    pub fn keeps(&self, k: usize, i: usize, l: usize, j: usize) -> bool {
        match self.family {
            MeasurementFamily::Total => k == l && i == j,
            MeasurementFamily::Coin => i == j,
            MeasurementFamily::Position => k == l,
        }
    }

    /// All Kraus operators restricted to a window of `sites` positions.
    pub fn operators_on_window(&self, sites: usize) -> Vec<KrausOperator> {
        let dim = 2 * sites;
        let zero = Complex64::new(0.0, 0.0);
        let diag = |weight: f64, pick: &dyn Fn(usize, usize) -> bool| {
            let mut entries = vec![zero; dim * dim];
            for slot in 0..sites {
                for coin in 0..2 {
                    if pick(slot, coin) {
                        let b = 2 * slot + coin;
                        entries[b * dim + b] = Complex64::new(weight, 0.0);
                    }
                }
            }
            KrausOperator { dim, entries }
        };

        let mut ops = vec![diag((1.0 - self.strength).sqrt(), &|_, _| true)];
        let w = self.strength.sqrt();
        match self.family {
            MeasurementFamily::Total => {
                for s in 0..sites {
                    for c in 0..2 {
                        ops.push(diag(w, &|slot, coin| slot == s && coin == c));
                    }
                }
            }
            MeasurementFamily::Coin => {
                for c in 0..2 {
                    ops.push(diag(w, &|_, coin| coin == c));
                }
            }
            MeasurementFamily::Position => {
                for s in 0..sites {
                    ops.push(diag(w, &|slot, _| slot == s));
                }
            }
        }
        ops
    }
}

impl KrausOperator {
    /// `A^dagger A`.
    pub fn gram(&self) -> Vec<Complex64> {
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                out[r * n + c] = (0..n)
                    .map(|k| self.entries[k * n + r].conj() * self.entries[k * n + c])
                    .sum();
            }
        }
        out
    }

    /// `A M A^dagger` for a dense `dim x dim` matrix.
    pub fn conjugate(&self, m: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        let mut am = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                am[r * n + c] = (0..n).map(|k| self.entries[r * n + k] * m[k * n + c]).sum();
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                out[r * n + c] = (0..n)
                    .map(|k| am[r * n + k] * self.entries[c * n + k].conj())
                    .sum();
            }
        }
        out
    }
}
