use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use super::special::{ln_gamma, regularized_incomplete_beta, standard_normal_cdf};

/// Continuous limit laws used as comparison targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceDensity {
    /// Beta(1/2, 1/2) on `[-1, 1]`.
    Arcsine,
    /// Beta(1, 1) on `[-1, 1]`.
    Uniform,
    /// Beta(3/2, 3/2) on `[-1, 1]`.
    Semicircle,
    /// Symmetric Beta(lambda, lambda) on `[-1, 1]`.
    BetaSymmetric(f64),
    /// Centered normal with the given variance.
    Gaussian { variance: f64 },
    /// `1 / (pi (1 + x) sqrt(1 - 2 x^2))` on `(-1/sqrt 2, 1/sqrt 2)`.
    KonnoHadamard,
}

impl ReferenceDensity {
    /// The Beta shape parameter, for the Beta family members.
    pub fn beta_shape(&self) -> Option<f64> {
        match *self {
            Self::Arcsine => Some(0.5),
            Self::Uniform => Some(1.0),
            Self::Semicircle => Some(1.5),
            Self::BetaSymmetric(lambda) => Some(lambda),
            _ => None,
        }
    }

    /// Closed support `[lo, hi]` (infinite for the Gaussian).
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Self::KonnoHadamard => (-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
            _ => (-1.0, 1.0),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if let Some(lambda) = self.beta_shape() {
            if x <= -1.0 || x >= 1.0 {
                return 0.0;
            }
            let ln_norm = ln_gamma(2.0 * lambda) - (2.0 * lambda - 1.0) * 2f64.ln() - 2.0 * ln_gamma(lambda);
            return ((lambda - 1.0) * (1.0 - x * x).ln() + ln_norm).exp();
        }
        match *self {
            Self::Gaussian { variance } => (-x * x / (2.0 * variance)).exp() / (2.0 * PI * variance).sqrt(),
            Self::KonnoHadamard => {
                if x.abs() >= FRAC_1_SQRT_2 {
                    0.0
                } else {
                    1.0 / (PI * (1.0 + x) * (1.0 - 2.0 * x * x).sqrt())
                }
            }
            _ => unreachable!("beta family handled above"),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if let Some(lambda) = self.beta_shape() {
            return regularized_incomplete_beta(lambda, lambda, ((x + 1.0) / 2.0).clamp(0.0, 1.0));
        }
        match *self {
            Self::Gaussian { variance } => standard_normal_cdf(x / variance.sqrt()),
            Self::KonnoHadamard => {
                if x <= -FRAC_1_SQRT_2 {
                    0.0
                } else if x >= FRAC_1_SQRT_2 {
                    1.0
                } else {
                    // x = sin(theta) / sqrt 2 reduces the integral to dtheta / (1 + sin(theta) / sqrt 2)
                    let theta = (SQRT_2 * x).asin();
                    (2.0 / PI) * ((SQRT_2 * (0.5 * theta).tan() + 1.0).atan() + PI / 8.0)
                }
            }
            _ => unreachable!("beta family handled above"),
        }
    }

    /// Variance of the law.
    pub fn variance(&self) -> f64 {
        if let Some(lambda) = self.beta_shape() {
            return 1.0 / (2.0 * lambda + 1.0);
        }
        match *self {
            Self::Gaussian { variance } => variance,
            Self::KonnoHadamard => {
                let second = 1.0 - FRAC_1_SQRT_2;
                second - second * second
            }
            _ => unreachable!("beta family handled above"),
        }
    }
}

/// Limiting variance `(p + 2 sqrt(1 + q^2) - 2) / p`, `q = 1 - p`, of the
/// decoherent Hadamard walk rescaled by `sqrt t`.
pub fn zhang_variance(p: f64) -> f64 {
    let q = 1.0 - p;
    (p + 2.0 * (1.0 + q * q).sqrt() - 2.0) / p
}

/// The commonly quoted Gaussian-regime variance `1 / (lambda (1 - zeta))`
/// for the classical walk with `0 < zeta < 1`, rescaled by `t^((1 + zeta) / 2)`.
///
/// The exact velocity autocorrelation does not converge to this value; see
/// [`coin_turning_variance`].
pub fn gaussian_regime_variance(lambda: f64, zeta: f64) -> f64 {
    1.0 / (lambda * (1.0 - zeta))
}

/// Limit of `Var(X_t) / t^(1 + zeta)` for the classical walk with
/// `0 <= zeta < 1`. Successive velocities decorrelate like
/// `prod (1 - 2 mu_k)`, so `Var(X_t) ~ sum_n 1 / mu_n ~ t^(1 + zeta) / (lambda (1 + zeta))`.
pub fn coin_turning_variance(lambda: f64, zeta: f64) -> f64 {
    1.0 / (lambda * (1.0 + zeta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::special::{integrate, integrate_tanh_sinh_gaps};

    /// Unnormalized Beta(lambda, lambda) kernel `(1 - x^2)^(lambda - 1)`,
    /// written as `((x + 1)(1 - x))` so endpoint gaps stay exact.
    fn kernel_integral(lambda: f64, upper: f64, g: impl Fn(f64) -> f64) -> f64 {
        integrate_tanh_sinh_gaps(
            |x, lo, hi| {
                let right = if upper == 1.0 { hi } else { 1.0 - x };
                (lo * right).powf(lambda - 1.0) * g(x)
            },
            -1.0,
            upper,
            1e-14,
        )
    }

    #[test]
    fn beta_densities_integrate_to_one() {
        for lambda in [0.5, 0.7, 1.0, 1.3, 1.5] {
            // pdf(0) is the normalizing constant of the kernel
            let d = ReferenceDensity::BetaSymmetric(lambda);
            let norm = d.pdf(0.0);
            let mass = norm * kernel_integral(lambda, 1.0, |_| 1.0);
            assert!((mass - 1.0).abs() < 1e-8, "lambda {lambda}: {mass}");
            let var = norm * kernel_integral(lambda, 1.0, |x| x * x);
            assert!((var - 1.0 / (2.0 * lambda + 1.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn beta_cdf_matches_quadrature() {
        for lambda in [0.5, 0.7, 1.3, 1.5] {
            let d = ReferenceDensity::BetaSymmetric(lambda);
            for x in [-0.8, -0.2, 0.0, 0.45, 0.9] {
                let q = d.pdf(0.0) * kernel_integral(lambda, x, |_| 1.0);
                assert!((q - d.cdf(x)).abs() < 1e-9, "lambda {lambda} x {x}: {q} vs {}", d.cdf(x));
            }
            assert!((d.cdf(0.0) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn konno_density_normalization_and_cdf() {
        let d = ReferenceDensity::KonnoHadamard;
        // x = sin(theta)/sqrt 2
        let moment = |k: i32, hi: f64| {
            integrate(
                |th: f64| {
                    let x = th.sin() * FRAC_1_SQRT_2;
                    x.powi(k) * FRAC_1_SQRT_2 / (PI * (1.0 + x))
                },
                -PI / 2.0,
                hi,
                1e-13,
            )
        };
        assert!((moment(0, PI / 2.0) - 1.0).abs() < 1e-10);
        for x in [-0.6, -0.1, 0.0, 0.3, 0.7] {
            let theta = (SQRT_2 * x).asin();
            assert!((moment(0, theta) - d.cdf(x)).abs() < 1e-10, "x = {x}");
        }
        let mean = moment(1, PI / 2.0);
        let second = moment(2, PI / 2.0);
        assert!((d.variance() - (second - mean * mean)).abs() < 1e-10);
    }

    #[test]
    fn gaussian_cdf() {
        let d = ReferenceDensity::Gaussian { variance: 4.0 };
        assert!((d.cdf(2.0) - 0.841_344_746_068_542_9).abs() < 1e-12);
        let mass = integrate(|x| d.pdf(x), -40.0, 40.0, 1e-12);
        assert!((mass - 1.0).abs() < 1e-9);
    }
}
