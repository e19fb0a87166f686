//! Walk parameters and initial states.

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Shift operator variant. Only the standard shift (coin 1 moves right,
/// coin 2 moves left) is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftKind {
    #[default]
    Standard,
}

/// Measurement basis of the decoherence channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MeasurementFamily {
    /// Joint position-and-coin basis.
    #[default]
    Total,
    /// Coin basis only.
    Coin,
    /// Position basis only.
    Position,
}

impl MeasurementFamily {
    pub const ALL: [MeasurementFamily; 3] = [Self::Total, Self::Coin, Self::Position];

    pub fn name(self) -> &'static str {
        match self {
            Self::Total => "total",
            Self::Coin => "coin",
            Self::Position => "position",
        }
    }
}

impl std::str::FromStr for MeasurementFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "total" => Ok(Self::Total),
            "coin" => Ok(Self::Coin),
            "position" => Ok(Self::Position),
            other => Err(format!(
                "unknown measurement family `{other}` (expected total, coin or position)"
            )),
        }
    }
}

/// Parameters of the time-inhomogeneous walk: coin family `(lambda, zeta)`,
/// decoherence strength `p` and horizon `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkParams {
    pub lambda: f64,
    pub zeta: f64,
    pub decoherence: f64,
    pub horizon: usize,
    pub shift_kind: ShiftKind,
    pub measurement_family: MeasurementFamily,
}

impl WalkParams {
    /// Builds validated parameters with the standard shift and total decoherence.
    pub fn new(lambda: f64, zeta: f64, decoherence: f64, horizon: usize) -> Result<Self> {
        let params = Self {
            lambda,
            zeta,
            decoherence,
            horizon,
            shift_kind: ShiftKind::Standard,
            measurement_family: MeasurementFamily::Total,
        };
        params.validate()?;
        Ok(params)
    }

    /// The homogeneous Hadamard walk: `lambda = 1/2, zeta = 0`.
    pub fn hadamard(decoherence: f64, horizon: usize) -> Result<Self> {
        Self::new(0.5, 0.0, decoherence, horizon)
    }

    pub fn with_family(mut self, family: MeasurementFamily) -> Self {
        self.measurement_family = family;
        self
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_decoherence(mut self, decoherence: f64) -> Self {
        self.decoherence = decoherence;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(invalid("lambda", format!("must be finite and >= 0, got {}", self.lambda)));
        }
        if !(self.zeta.is_finite() && self.zeta >= 0.0) {
            return Err(invalid("zeta", format!("must be finite and >= 0, got {}", self.zeta)));
        }
        if !(0.0..=1.0).contains(&self.decoherence) {
            return Err(invalid("p", format!("must lie in [0, 1], got {}", self.decoherence)));
        }
        if self.horizon == 0 {
            return Err(invalid("t", "horizon must be at least 1"));
        }
        Ok(())
    }

    /// Steps `n` in `1..=horizon` where `lambda / n^zeta > 1`, so the coin was clamped.
    /// The raw parameter is non-increasing in `n`, so the events form a prefix.
    pub fn clamp_events(&self) -> Vec<usize> {
        (1..=self.horizon)
            .take_while(|&n| crate::coin::raw_coin_parameter(n, self.lambda, self.zeta) > 1.0)
            .collect()
    }
}

/// Initial state `|0> (x) (a1 |1> + a2 |2>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    coin: [Complex64; 2],
}

impl InitialState {
    const NORM_TOL: f64 = 1e-12;

    pub fn new(a1: Complex64, a2: Complex64) -> Result<Self> {
        let norm = a1.norm_sqr() + a2.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(invalid(
                "init",
                format!("coin amplitudes must satisfy |a1|^2 + |a2|^2 = 1, got {norm}"),
            ));
        }
        Ok(Self { coin: [a1, a2] })
    }

    /// Basis coin state `|0, coin>` with `coin` in `{1, 2}`.
    pub fn basis(coin: u8) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match coin {
            1 => Self { coin: [one, zero] },
            2 => Self { coin: [zero, one] },
            _ => panic!("coin index must be 1 or 2, got {coin}"),
        }
    }

    /// `(|0,1> + |0,2>) / sqrt(2)`.
    pub fn symmetric() -> Self {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { coin: [a, a] }
    }

    /// `(|0,1> + i |0,2>) / sqrt(2)`.
    pub fn symmetric_imaginary() -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            coin: [Complex64::new(a, 0.0), Complex64::new(0.0, a)],
        }
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        self.coin
    }

    /// Probabilities of the two coin states.
    pub fn coin_weights(&self) -> [f64; 2] {
        [self.coin[0].norm_sqr(), self.coin[1].norm_sqr()]
    }

    /// The coin index when the state is a basis state, `None` for superpositions.
    pub fn basis_coin(&self) -> Option<u8> {
        let [w1, w2] = self.coin_weights();
        if w2 <= Self::NORM_TOL {
            Some(1)
        } else if w1 <= Self::NORM_TOL {
            Some(2)
        } else {
            None
        }
    }
}

impl Default for InitialState {
    fn default() -> Self {
        Self::basis(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(WalkParams::new(-0.1, 1.0, 0.5, 10).is_err());
        assert!(WalkParams::new(0.5, -1.0, 0.5, 10).is_err());
        assert!(WalkParams::new(0.5, 1.0, 1.5, 10).is_err());
        assert!(WalkParams::new(0.5, 1.0, 0.5, 0).is_err());
        assert!(WalkParams::new(0.5, 1.0, 0.0, 1).is_ok());
        assert!(WalkParams::new(0.5, 1.0, 1.0, 1).is_ok());
    }

    #[test]
    fn initial_state_normalization() {
        assert!(InitialState::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).is_err());
        assert_eq!(InitialState::symmetric().basis_coin(), None);
        assert_eq!(InitialState::basis(2).basis_coin(), Some(2));
    }

    #[test]
    fn clamp_events_are_reported() {
        let params = WalkParams::new(1.5, 1.0, 1.0, 10).unwrap();
        assert_eq!(params.clamp_events(), vec![1]);
        let params = WalkParams::new(0.5, 1.0, 1.0, 10).unwrap();
        assert!(params.clamp_events().is_empty());
    }
}
