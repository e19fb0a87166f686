use rand::Rng;
use rand_distr::{Distribution as _, Geometric};

use crate::error::{invalid, Result, WalkError};

/// Measurement times `0 < sigma_1 < ... < sigma_N <= t` of one realization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementSchedule {
    horizon: usize,
    sigma: Vec<usize>,
}

impl MeasurementSchedule {
    /// Builds the schedule from explicit inter-measurement gaps `T_1, T_2, ...`.
    /// The gaps must run past the horizon.
    pub fn from_gaps(horizon: usize, gaps: &[usize]) -> Result<Self> {
        if horizon == 0 {
            return Err(invalid("t", "horizon must be at least 1"));
        }
        let mut sigma = Vec::new();
        let mut acc = 0usize;
        for &gap in gaps {
            if gap == 0 {
                return Err(invalid("gaps", "geometric gaps are at least 1"));
            }
            acc += gap;
            if acc > horizon {
                return Ok(Self { horizon, sigma });
            }
            sigma.push(acc);
        }
        Err(invalid("gaps", format!("gaps sum to {acc}, which does not pass the horizon {horizon}")))
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    /// `N_t`.
    pub fn count(&self) -> usize {
        self.sigma.len()
    }

    /// Measured segments `(sigma_k, sigma_{k+1}]` for `k < N_t`, with `sigma_0 = 0`.
    pub fn measured_segments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        std::iter::once(0)
            .chain(self.sigma.iter().copied())
            .zip(self.sigma.iter().copied())
    }

    /// The unmeasured tail `(sigma_N, t]`, absent when `sigma_N = t`.
    pub fn tail(&self) -> Option<(usize, usize)> {
        let last = self.sigma.last().copied().unwrap_or(0);
        (last < self.horizon).then_some((last, self.horizon))
    }
}

/// Draws `T_i ~ Geometric(p)` on `{1, 2, ...}` until the partial sums pass `t`.
pub fn sample_schedule<R: Rng + ?Sized>(p: f64, t: usize, rng: &mut R) -> Result<MeasurementSchedule> {
    if p == 0.0 {
        return Err(WalkError::ZeroDecoherence);
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid("p", format!("must lie in (0, 1], got {p}")));
    }
    if t == 0 {
        return Err(invalid("t", "horizon must be at least 1"));
    }
    // rand_distr counts failures before the first success
    let failures = Geometric::new(p).map_err(|e| invalid("p", e.to_string()))?;
    let mut sigma = Vec::new();
    let mut acc = 0usize;
    loop {
        let gap = failures.sample(rng).saturating_add(1);
        acc = acc.saturating_add(usize::try_from(gap).unwrap_or(usize::MAX));
        if acc > t {
            break;
        }
        sigma.push(acc);
    }
    Ok(MeasurementSchedule { horizon: t, sigma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn certain_measurement_hits_every_step() {
        let mut rng = substream(0, "test", 0);
        let s = sample_schedule(1.0, 12, &mut rng).unwrap();
        assert_eq!(s.sigma(), (1..=12).collect::<Vec<_>>().as_slice());
        assert_eq!(s.count(), 12);
        assert_eq!(s.tail(), None);
    }

    #[test]
    fn injected_gaps() {
        let s = MeasurementSchedule::from_gaps(10, &[3, 4, 5]).unwrap();
        assert_eq!(s.sigma(), &[3, 7]);
        assert_eq!(s.count(), 2);
        assert_eq!(s.measured_segments().collect::<Vec<_>>(), vec![(0, 3), (3, 7)]);
        assert_eq!(s.tail(), Some((7, 10)));
        assert!(MeasurementSchedule::from_gaps(10, &[3, 4]).is_err());
    }

    #[test]
    fn zero_strength_is_refused() {
        let mut rng = substream(0, "test", 0);
        assert_eq!(sample_schedule(0.0, 5, &mut rng), Err(WalkError::ZeroDecoherence));
    }

    #[test]
    fn mean_count_follows_renewal_rate() {
        // E[N_t] for geometric gaps on {1,2,...} is exactly p t
        let (p, t, reps) = (0.5, 1000, 10_000u64);
        let counts: Vec<f64> = (0..reps)
            .map(|k| sample_schedule(p, t, &mut substream(11, "schedule-test", k)).unwrap().count() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / reps as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let se = (var / reps as f64).sqrt();
        assert!((mean - p * t as f64).abs() < 3.0 * se, "mean {mean}, se {se}");
    }
}
