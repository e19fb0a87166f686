//! Position distributions on the lattice `[-t, t]` and their rescaled views.

use crate::error::{invalid, Result, WalkError};

const NORMALIZATION_TOL: f64 = 1e-9;

/// Probability mass function of the walker's position at time `horizon`.
///
/// Masses are stored densely over `[-horizon, horizon]`, including the
/// positions that the parity constraint forces to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    horizon: usize,
    masses: Vec<f64>,
    stderr: Option<Vec<f64>>,
}

impl Distribution {
    /// Wraps dense masses over `[-horizon, horizon]`.
    pub fn new(horizon: usize, masses: Vec<f64>) -> Result<Self> {
        if masses.len() != 2 * horizon + 1 {
            return Err(invalid(
                "masses",
                format!("expected {} entries for horizon {horizon}, got {}", 2 * horizon + 1, masses.len()),
            ));
        }
        if let Some(bad) = masses.iter().find(|m| !(m.is_finite() && **m >= -1e-12)) {
            return Err(invalid("masses", format!("masses must be finite and nonnegative, found {bad}")));
        }
        let dist = Self {
            horizon,
            masses,
            stderr: None,
        };
        let total = dist.total_mass();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(invalid("masses", format!("masses sum to {total}, expected 1")));
        }
        Ok(dist)
    }

    /// Builds from `(position, mass)` pairs; positions outside the window are an error.
    pub fn from_points(horizon: usize, points: impl IntoIterator<Item = (i64, f64)>) -> Result<Self> {
        let mut masses = vec![0.0; 2 * horizon + 1];
        let t = horizon as i64;
        for (x, m) in points {
            if x.abs() > t {
                return Err(invalid("masses", format!("position {x} lies outside [-{t}, {t}]")));
            }
            masses[(x + t) as usize] += m;
        }
        Self::new(horizon, masses)
    }

    /// Point mass at `x`.
    pub fn point_mass(horizon: usize, x: i64) -> Result<Self> {
        Self::from_points(horizon, [(x, 1.0)])
    }

    /// Attaches per-point standard errors (dense, same layout as the masses).
    pub fn with_stderr(mut self, stderr: Vec<f64>) -> Self {
        assert_eq!(stderr.len(), self.masses.len(), "stderr layout must match masses");
        self.stderr = Some(stderr);
        self
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn stderr(&self) -> Option<&[f64]> {
        self.stderr.as_deref()
    }

    pub fn mass(&self, x: i64) -> f64 {
        let t = self.horizon as i64;
        if x.abs() > t {
            0.0
        } else {
            self.masses[(x + t) as usize]
        }
    }

    /// `(x, mass)` for every lattice point in `[-t, t]`, ascending.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let t = self.horizon as i64;
        self.masses.iter().enumerate().map(move |(k, &m)| (k as i64 - t, m))
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(x, m)| x as f64 * m).sum()
    }

    /// `E[X^2]`.
    pub fn second_moment(&self) -> f64 {
        self.iter().map(|(x, m)| (x * x) as f64 * m).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.iter().map(|(x, m)| (x as f64 - mean).powi(2) * m).sum()
    }

    /// True when every position carrying mass above `tol` satisfies `x + t` even.
    pub fn respects_parity(&self, tol: f64) -> bool {
        let t = self.horizon as i64;
        self.iter().all(|(x, m)| (x + t) % 2 == 0 || m.abs() <= tol)
    }

    /// Relabels the support `x -> x / t^gamma`.
    pub fn rescale(&self, gamma: f64) -> Result<RescaledDistribution> {
        RescaledDistribution::new(self.clone(), gamma)
    }
}

/// A distribution viewed on the lattice `Z / t^gamma`. Masses are unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledDistribution {
    base: Distribution,
    gamma: f64,
    scale: f64,
}

impl RescaledDistribution {
    pub fn new(base: Distribution, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(invalid("gamma", format!("must be positive, got {gamma}")));
        }
        let scale = (base.horizon as f64).powf(gamma);
        Ok(Self { base, gamma, scale })
    }

    pub fn base(&self) -> &Distribution {
        &self.base
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `t^gamma`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn rescaled_position(&self, x: i64) -> f64 {
        x as f64 / self.scale
    }

    /// `(x / t^gamma, mass)` ascending.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.base.iter().map(move |(x, m)| (x as f64 / self.scale, m))
    }

    pub fn total_mass(&self) -> f64 {
        self.base.total_mass()
    }

    pub fn mean(&self) -> f64 {
        self.base.mean() / self.scale
    }

    pub fn second_moment(&self) -> f64 {
        self.base.second_moment() / (self.scale * self.scale)
    }

    pub fn variance(&self) -> f64 {
        self.base.variance() / (self.scale * self.scale)
    }

    pub(crate) fn check_same_gamma(&self, other: &RescaledDistribution) -> Result<()> {
        if (self.gamma - other.gamma).abs() > 1e-12 {
            return Err(WalkError::IncompatibleRescaling {
                left: self.gamma,
                right: other.gamma,
            });
        }
        Ok(())
    }
}
