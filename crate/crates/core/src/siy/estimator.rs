use rand::Rng;
use rand_distr::{Binomial, Distribution as _};
use rayon::prelude::*;

use super::kernel::{coin_marginal_and_jump_law, segment_kernel, CoinMarginal, JumpLaw};
use super::schedule::{sample_schedule, MeasurementSchedule};
use crate::analysis::Distribution;
use crate::error::{invalid, Result, WalkError};
use crate::params::{InitialState, MeasurementFamily, WalkParams};
use crate::rng::substream;

/// Component name used to derive per-schedule substreams.
pub const SIY_COMPONENT: &str = "siy-schedule";

/// Sample counts for schedules, coin chains per schedule, and jump sums per chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiySamples {
    pub n_sigma: usize,
    pub n_i: usize,
    pub n_y: usize,
}

impl Default for SiySamples {
    fn default() -> Self {
        Self {
            n_sigma: 500,
            n_i: 2000,
            n_y: 500,
        }
    }
}

/// How the `n_y` jump sums of one coin chain are drawn.
///
/// Both produce a histogram with the same law: `Direct` draws every jump of
/// every sum; `Multinomial` convolves the chain's jump laws once and draws the
/// `n_y` counts as a single multinomial vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum YSampling {
    #[default]
    Multinomial,
    Direct,
}

struct Segment {
    marginal: CoinMarginal,
    jumps: Option<JumpLaw>,
}

#[derive(Debug, Clone)]
pub struct SiyEstimator {
    params: WalkParams,
    start_coin: usize,
    samples: SiySamples,
    sampling: YSampling,
}

impl SiyEstimator {
    pub fn new(init: &InitialState, params: &WalkParams, samples: SiySamples) -> Result<Self> {
        params.validate()?;
        if params.decoherence == 0.0 {
            return Err(WalkError::ZeroDecoherence);
        }
        if params.measurement_family != MeasurementFamily::Total {
            return Err(invalid(
                "family",
                format!(
                    "the sigma-I-Y sampler needs the total (position and coin) measurement, got {}; \
                     use the exact or trajectory method",
                    params.measurement_family.name()
                ),
            ));
        }
        let coin = init.basis_coin().ok_or_else(|| {
            let [a1, a2] = init.amplitudes();
            WalkError::SuperposedInitialCoin {
                a1: a1.to_string(),
                a2: a2.to_string(),
            }
        })?;
        for (name, n) in [("n_sigma", samples.n_sigma), ("n_i", samples.n_i), ("n_y", samples.n_y)] {
            if n == 0 {
                return Err(invalid(name, "sample counts must be at least 1"));
            }
        }
        Ok(Self {
            params: *params,
            start_coin: usize::from(coin - 1),
            samples,
            sampling: YSampling::default(),
        })
    }

    pub fn with_sampling(mut self, sampling: YSampling) -> Self {
        self.sampling = sampling;
        self
    }

    fn segments(&self, schedule: &MeasurementSchedule) -> Result<Vec<Segment>> {
        let mut out = Vec::with_capacity(schedule.count() + 1);
        for (start, end) in schedule.measured_segments().chain(schedule.tail()) {
            let (marginal, jumps) = coin_marginal_and_jump_law(&segment_kernel(start, end, &self.params)?);
            out.push(Segment {
                marginal,
                jumps: Some(jumps),
            });
        }
        if schedule.tail().is_none() {
            // the final coin equals the last measured coin, zero displacement
            out.push(Segment {
                marginal: CoinMarginal::IDENTITY,
                jumps: None,
            });
        }
        Ok(out)
    }

    /// Histogram over `[-t, t]` of `n_i * n_y` draws under one fixed schedule.
    pub fn schedule_counts<R: Rng + ?Sized>(&self, schedule: &MeasurementSchedule, rng: &mut R) -> Result<Vec<u64>> {
        if schedule.horizon() != self.params.horizon {
            return Err(invalid("schedule", "schedule horizon differs from the walk horizon"));
        }
        let t = self.params.horizon;
        let segments = self.segments(schedule)?;
        let mut counts = vec![0u64; 2 * t + 1];
        let mut path: Vec<&[f64]> = Vec::with_capacity(segments.len());
        let mut conv = Vec::with_capacity(t + 1);
        let mut scratch = Vec::with_capacity(t + 1);

        for _ in 0..self.samples.n_i {
            path.clear();
            let mut coin = self.start_coin;
            for seg in &segments {
                let next = next_coin(&seg.marginal, coin, rng.random::<f64>());
                if let Some(jumps) = &seg.jumps {
                    path.push(jumps.law_idx(coin, next).expect("sampled transition has positive weight"));
                }
                coin = next;
            }
            match self.sampling {
                YSampling::Multinomial => {
                    conv.clear();
                    conv.push(1.0);
                    for law in &path {
                        convolve_into(&conv, law, &mut scratch);
                        std::mem::swap(&mut conv, &mut scratch);
                    }
                    multinomial_into(self.samples.n_y as u64, &conv, rng, |slot, c| counts[2 * slot] += c);
                }
                YSampling::Direct => {
                    for _ in 0..self.samples.n_y {
                        let slot: usize = path.iter().map(|law| draw_index(law, rng.random::<f64>())).sum();
                        counts[2 * slot] += 1;
                    }
                }
            }
        }
        Ok(counts)
    }

    /// Samples schedule `index` from its substream and returns its histogram.
    pub fn counts_for_schedule_index(&self, seed: u64, index: u64) -> Result<Vec<u64>> {
        let mut rng = substream(seed, SIY_COMPONENT, index);
        let schedule = sample_schedule(self.params.decoherence, self.params.horizon, &mut rng)?;
        self.schedule_counts(&schedule, &mut rng)
    }

    /// Averages over `n_sigma` schedules in parallel. Per-point standard
    /// errors come from the spread between schedules (binomial when `n_sigma = 1`).
    pub fn estimate(&self, seed: u64) -> Result<Distribution> {
        let width = 2 * self.params.horizon + 1;
        let zero = || (vec![0u64; width], vec![0u128; width]);
        let (sum, sum_sq) = (0..self.samples.n_sigma as u64)
            .into_par_iter()
            .map(|s| self.counts_for_schedule_index(seed, s))
            .try_fold(zero, |(mut sum, mut sq), counts| {
                let counts = counts?;
                for ((a, b), c) in sum.iter_mut().zip(sq.iter_mut()).zip(counts) {
                    *a += c;
                    *b += u128::from(c) * u128::from(c);
                }
                Ok::<_, WalkError>((sum, sq))
            })
            .try_reduce(zero, |(mut a, mut aq), (b, bq)| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                aq.iter_mut().zip(bq).for_each(|(x, y)| *x += y);
                Ok((a, aq))
            })?;

        let per_schedule = (self.samples.n_i * self.samples.n_y) as f64;
        let n_sigma = self.samples.n_sigma as f64;
        let total = per_schedule * n_sigma;
        let masses: Vec<f64> = sum.iter().map(|&c| c as f64 / total).collect();
        let stderr = sum
            .iter()
            .zip(&sum_sq)
            .zip(&masses)
            .map(|((&c, &q), &m)| {
                if self.samples.n_sigma < 2 {
                    (m * (1.0 - m) / total).sqrt()
                } else {
                    let mean = c as f64 / n_sigma;
                    let var = ((q as f64 - n_sigma * mean * mean) / (n_sigma - 1.0)).max(0.0);
                    (var / n_sigma).sqrt() / per_schedule
                }
            })
            .collect();
        Ok(Distribution::new(self.params.horizon, masses)?.with_stderr(stderr))
    }
}

/// Estimates `p_d(., t)` from a basis initial coin with the sigma-I-Y sampler.
pub fn siy_estimate(
    init: &InitialState,
    params: &WalkParams,
    samples: SiySamples,
    seed: u64,
) -> Result<Distribution> {
    SiyEstimator::new(init, params, samples)?.estimate(seed)
}

#[inline]
fn next_coin(marginal: &CoinMarginal, from: usize, u: f64) -> usize {
    let row = marginal.entries[from];
    if row[1] == 0.0 || (u * (row[0] + row[1]) < row[0]) {
        0
    } else {
        1
    }
}

#[inline]
fn draw_index(law: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (k, &p) in law.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = k;
            if u < acc {
                return k;
            }
        }
    }
    last
}

fn convolve_into(a: &[f64], b: &[f64], out: &mut Vec<f64>) {
    out.clear();
    out.resize(a.len() + b.len() - 1, 0.0);
    for (k, &bk) in b.iter().enumerate() {
        if bk == 0.0 {
            continue;
        }
        for (m, &am) in a.iter().enumerate() {
            out[k + m] += am * bk;
        }
    }
}

/// Draws multinomial counts by sequential conditional binomials.
fn multinomial_into<R: Rng + ?Sized>(n: u64, probs: &[f64], rng: &mut R, mut emit: impl FnMut(usize, u64)) {
    let mut remaining_n = n;
    let mut remaining_p: f64 = probs.iter().sum();
    let last_positive = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    for (slot, &p) in probs.iter().enumerate() {
        if remaining_n == 0 {
            break;
        }
        if p <= 0.0 {
            continue;
        }
        let drawn = if slot == last_positive || p >= remaining_p {
            remaining_n
        } else {
            Binomial::new(remaining_n, (p / remaining_p).clamp(0.0, 1.0))
                .expect("binomial parameters are valid")
                .sample(rng)
        };
        if drawn > 0 {
            emit(slot, drawn);
        }
        remaining_n -= drawn;
        remaining_p -= p;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::total_variation;
    use crate::classical::evolve_classical;
    use crate::decoherence::{evolve_exact, KrausFamily};
    use crate::pure::{evolve_pure, position_distribution};

    fn small() -> SiySamples {
        SiySamples {
            n_sigma: 40,
            n_i: 200,
            n_y: 50,
        }
    }

    #[test]
    fn refuses_invalid_configurations() {
        let params = WalkParams::new(0.5, 1.0, 0.0, 10).unwrap();
        assert_eq!(
            SiyEstimator::new(&InitialState::basis(1), &params, small()).unwrap_err(),
            WalkError::ZeroDecoherence
        );
        let params = params.with_decoherence(0.5);
        assert!(matches!(
            SiyEstimator::new(&InitialState::symmetric(), &params, small()),
            Err(WalkError::SuperposedInitialCoin { .. })
        ));
        let coin_only = params.with_family(MeasurementFamily::Coin);
        assert!(SiyEstimator::new(&InitialState::basis(1), &coin_only, small()).is_err());
        let zero = SiySamples { n_y: 0, ..small() };
        assert!(SiyEstimator::new(&InitialState::basis(1), &params, zero).is_err());
    }

    #[test]
    fn convolution_and_multinomial() {
        let mut out = Vec::new();
        convolve_into(&[0.5, 0.5], &[0.25, 0.75], &mut out);
        assert_eq!(out, vec![0.125, 0.5, 0.375]);

        let mut rng = substream(5, "test", 0);
        let mut counts = [0u64; 4];
        multinomial_into(1000, &[0.1, 0.0, 0.6, 0.3], &mut rng, |s, c| counts[s] += c);
        assert_eq!(counts.iter().sum::<u64>(), 1000);
        assert_eq!(counts[1], 0);
    }

    #[test]
    fn unmeasured_schedule_reduces_to_pure_walk() {
        // N_t = 0: a single tail segment covering the whole horizon
        let params = WalkParams::new(0.6, 0.8, 0.3, 12).unwrap();
        let init = InitialState::basis(2);
        let est = SiyEstimator::new(&init, &params, SiySamples { n_sigma: 1, n_i: 20_000, n_y: 20 }).unwrap();
        let schedule = MeasurementSchedule::from_gaps(12, &[13]).unwrap();
        assert_eq!(schedule.count(), 0);
        let counts = est.schedule_counts(&schedule, &mut substream(2, "test", 0)).unwrap();
        let total: u64 = counts.iter().sum();
        let pure = position_distribution(&evolve_pure(&init, &params)).unwrap();
        for (x, p) in pure.iter() {
            let f = counts[(x + 12) as usize] as f64 / total as f64;
            assert!((f - p).abs() < 0.01, "x={x}: {f} vs {p}");
        }
    }

    #[test]
    fn full_decoherence_reduces_to_classical_walk() {
        let params = WalkParams::new(0.5, 1.0, 1.0, 20).unwrap();
        let samples = SiySamples { n_sigma: 1, n_i: 20_000, n_y: 10 };
        let est = siy_estimate(&InitialState::basis(1), &params, samples, 4).unwrap();
        let (classical, _) = evolve_classical([1.0, 0.0], &params).unwrap();
        assert!(total_variation(&est, &classical).unwrap() < 0.03);
        assert!((est.total_mass() - 1.0).abs() < 1e-9);
        assert!(est.respects_parity(0.0));
    }

    #[test]
    fn direct_and_multinomial_sampling_agree_with_exact() {
        let params = WalkParams::new(0.5, 1.0, 0.5, 16).unwrap();
        let init = InitialState::basis(1);
        let exact = evolve_exact(&init, &KrausFamily::from_params(&params), &params).unwrap();
        for sampling in [YSampling::Direct, YSampling::Multinomial] {
            let est = SiyEstimator::new(&init, &params, SiySamples { n_sigma: 200, n_i: 100, n_y: 20 })
                .unwrap()
                .with_sampling(sampling)
                .estimate(8)
                .unwrap();
            let tv = total_variation(&est, &exact).unwrap();
            assert!(tv < 0.03, "{sampling:?}: tv {tv}");
        }
    }

    #[test]
    fn schedule_order_does_not_change_the_merge() {
        let params = WalkParams::new(0.5, 1.0, 0.5, 15).unwrap();
        let est = SiyEstimator::new(&InitialState::basis(1), &params, small()).unwrap();
        let per: Vec<Vec<u64>> = (0..10).map(|s| est.counts_for_schedule_index(3, s).unwrap()).collect();
        let merge = |order: &mut dyn Iterator<Item = &Vec<u64>>| {
            order.fold(vec![0u64; 31], |mut acc, c| {
                acc.iter_mut().zip(c).for_each(|(a, b)| *a += b);
                acc
            })
        };
        assert_eq!(merge(&mut per.iter()), merge(&mut per.iter().rev()));
        let a = est.estimate(3).unwrap();
        let b = est.estimate(3).unwrap();
        assert_eq!(a, b);
    }
}
