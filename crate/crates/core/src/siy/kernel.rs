use num_complex::Complex64;

use crate::coin::build_coin;
use crate::error::{invalid, Result};
use crate::params::WalkParams;
use crate::pure::PureState;

/// Squared transition amplitudes across the segment `(start, end]`:
/// `masses[k][i][j] = |<x, j| U_end ... U_{start+1} |0, i>|^2` with
/// `x = 2k - (end - start)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentKernel {
    pub start: usize,
    pub end: usize,
    masses: Vec<[[f64; 2]; 2]>,
}

impl SegmentKernel {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    /// Mass at displacement `x` from coin `i` to coin `j` (both 1-based).
    pub fn mass(&self, x: i64, i: u8, j: u8) -> f64 {
        let offset = x + self.len() as i64;
        if offset < 0 || offset % 2 != 0 {
            return 0.0;
        }
        self.masses
            .get((offset / 2) as usize)
            .map_or(0.0, |m| m[usize::from(i - 1)][usize::from(j - 1)])
    }

    pub fn slots(&self) -> &[[[f64; 2]; 2]] {
        &self.masses
    }
}

/// Evolves both basis coins from the origin through coins `C_{start+1} ... C_end`.
pub fn segment_kernel(start: usize, end: usize, params: &WalkParams) -> Result<SegmentKernel> {
    if start >= end {
        return Err(invalid("segment", format!("need start < end, got ({start}, {end}]")));
    }
    if end > params.horizon {
        return Err(invalid("segment", format!("end {end} exceeds horizon {}", params.horizon)));
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut from = [
        PureState::localized(0, [one, zero]),
        PureState::localized(0, [zero, one]),
    ];
    for n in (start + 1)..=end {
        let coin = build_coin(n, params.lambda, params.zeta);
        from.iter_mut().for_each(|s| s.advance(&coin));
    }
    let masses = (0..=end - start)
        .map(|k| {
            let mut cell = [[0.0; 2]; 2];
            for (i, state) in from.iter().enumerate() {
                let a = state.slots()[k];
                cell[i] = [a[0].norm_sqr(), a[1].norm_sqr()];
            }
            cell
        })
        .collect();
    Ok(SegmentKernel { start, end, masses })
}

/// Coin transition matrix `R(i, j) = sum_x Q(x, i, j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinMarginal {
    pub entries: [[f64; 2]; 2],
}

impl CoinMarginal {
    /// The identity transition, used for an empty tail.
    pub const IDENTITY: CoinMarginal = CoinMarginal {
        entries: [[1.0, 0.0], [0.0, 1.0]],
    };

    pub fn row_sums(&self) -> [f64; 2] {
        [self.entries[0][0] + self.entries[0][1], self.entries[1][0] + self.entries[1][1]]
    }
}

/// Conditional jump laws `mu(x | i, j) = Q(x, i, j) / R(i, j)`, stored per slot
/// (`x = 2k - len`). Cells with `R(i, j) = 0` are empty and never sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpLaw {
    len: usize,
    laws: [[Option<Vec<f64>>; 2]; 2],
}

impl JumpLaw {
    /// Segment length; displacements lie in `{-len, -len + 2, ..., len}`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Slot probabilities for `i -> j` (1-based), if `R(i, j) > 0`.
    pub fn law(&self, i: u8, j: u8) -> Option<&[f64]> {
        self.laws[usize::from(i - 1)][usize::from(j - 1)].as_deref()
    }

    pub(crate) fn law_idx(&self, i: usize, j: usize) -> Option<&[f64]> {
        self.laws[i][j].as_deref()
    }

    pub fn probability(&self, x: i64, i: u8, j: u8) -> f64 {
        let offset = x + self.len as i64;
        if offset < 0 || offset % 2 != 0 {
            return 0.0;
        }
        self.law(i, j)
            .and_then(|law| law.get((offset / 2) as usize).copied())
            .unwrap_or(0.0)
    }
}

pub fn coin_marginal_and_jump_law(kernel: &SegmentKernel) -> (CoinMarginal, JumpLaw) {
    let mut entries = [[0.0; 2]; 2];
    let mut laws: [[Option<Vec<f64>>; 2]; 2] = Default::default();
    for i in 0..2 {
        for j in 0..2 {
            let column: Vec<f64> = kernel.masses.iter().map(|m| m[i][j]).collect();
            let total: f64 = column.iter().sum();
            entries[i][j] = total;
            if total > 0.0 {
                laws[i][j] = Some(column.into_iter().map(|m| m / total).collect());
            }
        }
    }
    (
        CoinMarginal { entries },
        JumpLaw {
            len: kernel.len(),
            laws,
        },
    )
}
