//! Monte Carlo estimation of the decoherent walk law through its
//! sigma-I-Y representation: geometric measurement times `sigma`, a coin
//! chain `I` driven by segment marginals, and independent jumps `Y`.

mod estimator;
mod kernel;
mod schedule;

pub use estimator::{siy_estimate, SiyEstimator, SiySamples, YSampling, SIY_COMPONENT};
pub use kernel::{coin_marginal_and_jump_law, segment_kernel, CoinMarginal, JumpLaw, SegmentKernel};
pub use schedule::{sample_schedule, MeasurementSchedule};
