//! Two-parameter decay regression `c e^{-r t}` / `c t^{-r}` by damped
//! Gauss-Newton with a multiplicative (Levenberg-Marquardt) damping schedule.

use crate::error::{invalid, Result, WalkError};

/// Stop when an accepted step lowers the objective by less than this fraction.
pub const FIT_RELATIVE_TOL: f64 = 1e-12;
/// Stop when the scaled gradient `max_k |J_k . res| / (|J_k| |res|)` falls
/// below this. The scaling makes the test blind to the magnitude of `t^-r`.
pub const FIT_GRADIENT_TOL: f64 = 1e-10;
pub const FIT_MAX_ITERATIONS: usize = 500;

const DAMPING_START: f64 = 1e-3;
const DAMPING_FACTOR: f64 = 10.0;
const DAMPING_CEILING: f64 = 1e20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecayModel {
    /// `c e^{-r t}`
    ExponentialDecay,
    /// `c t^{-r}`
    RationalDecay,
}

impl DecayModel {
    pub fn name(self) -> &'static str {
        match self {
            Self::ExponentialDecay => "exponential",
            Self::RationalDecay => "rational",
        }
    }

    pub fn eval(self, c: f64, r: f64, t: f64) -> f64 {
        match self {
            Self::ExponentialDecay => c * (-r * t).exp(),
            Self::RationalDecay => c * t.powf(-r),
        }
    }

    /// `(d/dc, d/dr)` of the model.
    fn gradient(self, c: f64, r: f64, t: f64) -> [f64; 2] {
        match self {
            Self::ExponentialDecay => {
                let e = (-r * t).exp();
                [e, -c * t * e]
            }
            Self::RationalDecay => {
                let e = t.powf(-r);
                [e, -c * t.ln() * e]
            }
        }
    }
}

impl std::str::FromStr for DecayModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exponential" | "exp" => Ok(Self::ExponentialDecay),
            "rational" | "power" => Ok(Self::RationalDecay),
            other => Err(format!("unknown decay model `{other}` (expected exponential or rational)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub model: DecayModel,
    pub c: f64,
    pub r: f64,
    pub r_squared: f64,
    pub rmse: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Scaled gradient at the final iterate (see [`FIT_GRADIENT_TOL`]).
    pub gradient_norm: f64,
    /// Set when every observation is equal; the fit is then `r = 0`, `c = value`.
    pub degenerate: bool,
}

impl FitResult {
    pub fn predict(&self, t: f64) -> f64 {
        self.model.eval(self.c, self.r, t)
    }
}

fn sum_sq(series: &[(f64, f64)], model: DecayModel, c: f64, r: f64) -> f64 {
    series.iter().map(|&(t, y)| (y - model.eval(c, r, t)).powi(2)).sum()
}

/// Starting point from the last observation `(T, y_T)`: `c0 = 1` and the
/// rate that makes the model pass through it, `-ln(y_T)/T` or `-ln(y_T)/ln T`.
pub fn initial_guess(series: &[(f64, f64)], model: DecayModel) -> (f64, f64) {
    let Some(&(t, y)) = series.iter().max_by(|a, b| a.0.total_cmp(&b.0)) else {
        return (1.0, 0.0);
    };
    let r = match model {
        DecayModel::ExponentialDecay => -y.ln() / t,
        DecayModel::RationalDecay => -y.ln() / t.ln(),
    };
    (1.0, if r.is_finite() { r } else { 0.0 })
}

fn validate(series: &[(f64, f64)], model: DecayModel) -> Result<()> {
    if series.len() < 3 {
        return Err(WalkError::TooFewPoints {
            needed: 2,
            got: series.len(),
        });
    }
    for &(t, y) in series {
        if !(y.is_finite() && y > 0.0) {
            return Err(invalid("series", format!("values must be positive, got {y} at t = {t}")));
        }
        if !t.is_finite() || (model == DecayModel::RationalDecay && t <= 0.0) {
            return Err(invalid("series", format!("invalid abscissa {t}")));
        }
    }
    Ok(())
}

/// Least-squares fit of `model` to `series` from `init = (c0, r0)`.
///
/// Non-convergence is reported through `converged = false` with the best
/// iterate, not as an error.
pub fn fit_decay(series: &[(f64, f64)], model: DecayModel, init: (f64, f64)) -> Result<FitResult> {
    validate(series, model)?;

    let first = series[0].1;
    if series.iter().all(|&(_, y)| y == first) {
        let mut fit = FitResult {
            model,
            c: first,
            r: 0.0,
            r_squared: 0.0,
            rmse: 0.0,
            iterations: 0,
            converged: true,
            gradient_norm: 0.0,
            degenerate: true,
        };
        (fit.r_squared, fit.rmse) = goodness_of_fit(series, &fit)?;
        return Ok(fit);
    }

    let (mut c, mut r) = init;
    let mut ss = sum_sq(series, model, c, r);
    let mut damping = DAMPING_START;
    let mut converged = false;
    let mut iterations = 0;
    let mut gradient_norm = f64::INFINITY;

    while iterations < FIT_MAX_ITERATIONS {
        iterations += 1;
        // normal equations J^T J and J^T res
        let (mut a, mut g) = ([[0.0; 2]; 2], [0.0; 2]);
        for &(t, y) in series {
            let j = model.gradient(c, r, t);
            let res = y - model.eval(c, r, t);
            for p in 0..2 {
                g[p] += j[p] * res;
                for q in 0..2 {
                    a[p][q] += j[p] * j[q];
                }
            }
        }
        gradient_norm = scaled_gradient(&a, &g, ss);
        if ss == 0.0 || gradient_norm < FIT_GRADIENT_TOL {
            converged = true;
            break;
        }

        let mut accepted = false;
        while damping <= DAMPING_CEILING {
            let d0 = a[0][0] + damping * a[0][0].max(f64::MIN_POSITIVE);
            let d1 = a[1][1] + damping * a[1][1].max(f64::MIN_POSITIVE);
            let det = d0 * d1 - a[0][1] * a[1][0];
            if det.is_finite() && det != 0.0 {
                let dc = (g[0] * d1 - a[0][1] * g[1]) / det;
                let dr = (d0 * g[1] - a[1][0] * g[0]) / det;
                let (c_new, r_new) = (c + dc, r + dr);
                let ss_new = sum_sq(series, model, c_new, r_new);
                if ss_new.is_finite() && ss_new < ss {
                    let decrease = (ss - ss_new) / ss;
                    (c, r, ss) = (c_new, r_new, ss_new);
                    damping = (damping / DAMPING_FACTOR).max(1e-15);
                    accepted = true;
                    if decrease < FIT_RELATIVE_TOL {
                        converged = true;
                    }
                    break;
                }
            }
            damping *= DAMPING_FACTOR;
        }
        if converged {
            break;
        }
        if !accepted {
            // no downhill step at any damping: accept only a numerical minimum
            let scale: f64 = series.iter().map(|p| p.1 * p.1).sum();
            converged = gradient_norm < 1e-6 || ss <= 1e-24 * scale;
            break;
        }
    }

    let mut fit = FitResult {
        model,
        c,
        r,
        r_squared: 0.0,
        rmse: 0.0,
        iterations,
        converged,
        gradient_norm,
        degenerate: false,
    };
    (fit.r_squared, fit.rmse) = goodness_of_fit(series, &fit)?;
    Ok(fit)
}

fn scaled_gradient(a: &[[f64; 2]; 2], g: &[f64; 2], ss: f64) -> f64 {
    let res_norm = ss.sqrt();
    (0..2)
        .map(|k| {
            let col = a[k][k].sqrt();
            if col == 0.0 || res_norm == 0.0 {
                0.0
            } else {
                g[k].abs() / (col * res_norm)
            }
        })
        .fold(0.0, f64::max)
}

/// `R^2 = 1 - SS_res / SS_tot` and `RMSE = sqrt(SS_res / (N - 2))`.
pub fn goodness_of_fit(series: &[(f64, f64)], fit: &FitResult) -> Result<(f64, f64)> {
    let n = series.len();
    if n <= 2 {
        return Err(WalkError::TooFewPoints { needed: 2, got: n });
    }
    let mean = series.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let ss_tot: f64 = series.iter().map(|&(_, y)| (y - mean).powi(2)).sum();
    let ss_res = sum_sq(series, fit.model, fit.c, fit.r);
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    };
    Ok((r_squared, (ss_res / (n - 2) as f64).sqrt()))
}
