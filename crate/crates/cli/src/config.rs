//! Experiment configuration.
//!
//! Configuration files are plain text, one `key = value` per line; `#`
//! starts a comment. Command-line flags override file values. Unknown or
//! repeated keys are errors. Parameters swept over a grid accept a list
//! (`0.5, 1, 1.5`) or an inclusive range (`0.5:1.5:0.1`).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use qwalk_core::analysis::{DecayModel, Metric, ReferenceDensity};
use qwalk_core::decoherence::DEFAULT_EXACT_CAP;
use qwalk_core::siy::SiySamples;
use qwalk_core::{InitialState, MeasurementFamily, WalkParams};

use crate::error::{CliError, Result};

/// Every key the configuration grammar accepts.
pub const KEYS: &[&str] = &[
    "lambda", "zeta", "p", "t", "times", "family", "method", "init", "samples", "gamma", "alpha", "seed", "out",
    "cap", "statistic", "fit", "reference", "metric",
];

/// Raw key/value settings gathered from a file and from flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut settings = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let fail = |reason: String| CliError::ConfigFile {
                path: path.to_path_buf(),
                line: idx + 1,
                reason,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| fail(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(fail(format!("unknown key `{key}` (known keys: {})", KEYS.join(", "))));
            }
            if value.is_empty() {
                return Err(fail(format!("empty value for `{key}`")));
            }
            if settings.values.insert(key.to_string(), value.to_string()).is_some() {
                return Err(fail(format!("`{key}` given twice")));
            }
        }
        Ok(settings)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Set `key` (which must be a known key), replacing any earlier value.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        debug_assert!(KEYS.contains(&key), "unknown key {key}");
        self.values.insert(key.to_string(), value.into());
    }

    /// `self` with every value in `overrides` taking precedence.
    pub fn overridden_by(mut self, overrides: &Settings) -> Self {
        for (k, v) in &overrides.values {
            self.values.insert(k.clone(), v.clone());
        }
        self
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| CliError::config(key, format!("cannot parse `{v}`: {e}"))))
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// A list or inclusive range of reals.
    pub fn grid(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.raw(key).map(|v| parse_real_grid(v).map_err(|e| CliError::config(key, e))).transpose()
    }

    /// A list or inclusive range of positive integers.
    pub fn time_grid(&self, key: &str) -> Result<Option<Vec<usize>>> {
        self.raw(key).map(|v| parse_time_grid(v).map_err(|e| CliError::config(key, e))).transpose()
    }

    pub fn as_json(&self) -> serde_json::Value {
        serde_json::Value::Object(self.values.iter().map(|(k, v)| (k.clone(), v.clone().into())).collect())
    }
}

fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{}` is not a number", s.trim()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{}` is not finite", s.trim()))
    }
}

/// Drop the accumulated rounding of `start + k * step` (0.7000000000000001 -> 0.7).
fn tidy(v: f64) -> f64 {
    let rounded = (v * 1e12).round() / 1e12;
    if (rounded - v).abs() <= 1e-9 * v.abs().max(1.0) {
        rounded
    } else {
        v
    }
}

pub fn parse_real_grid(s: &str) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (parse_real(start)?, parse_real(stop)?, parse_real(step)?);
            if step <= 0.0 || stop < start {
                return Err(format!("range `{s}` needs start <= stop and a positive step"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            (0..=count).map(|k| tidy(start + step * k as f64)).collect()
        }
        [_] => s.split(',').map(parse_real).collect::<std::result::Result<Vec<_>, _>>()?,
        _ => return Err(format!("expected a list `a, b, c` or a range `start:stop:step`, got `{s}`")),
    };
    if values.is_empty() {
        return Err("empty grid".into());
    }
    Ok(values)
}

pub fn parse_time_grid(s: &str) -> std::result::Result<Vec<usize>, String> {
    let int = |v: &str| {
        v.trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| format!("`{}` is not a positive integer", v.trim()))
    };
    let parts: Vec<&str> = s.split(':').collect();
    let mut values = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (int(start)?, int(stop)?, int(step)?);
            if stop < start {
                return Err(format!("range `{s}` needs start <= stop"));
            }
            (start..=stop).step_by(step).collect()
        }
        [_] => s.split(',').map(int).collect::<std::result::Result<Vec<_>, _>>()?,
        _ => return Err(format!("expected a list `a, b, c` or a range `start:stop:step`, got `{s}`")),
    };
    values.sort_unstable();
    values.dedup();
    Ok(values)
}

/// Which engine produces the distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Trajectory,
    Siy,
    Classical,
    Pure,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Trajectory => "trajectory",
            Self::Siy => "siy",
            Self::Classical => "classical",
            Self::Pure => "pure",
        }
    }

    /// Deterministic methods report no standard errors.
    pub fn is_exact(self) -> bool {
        matches!(self, Self::Exact | Self::Classical | Self::Pure)
    }

    /// The method a sweep uses at decoherence `p` when none is configured.
    pub fn automatic(p: f64, horizon: usize, cap: usize) -> Self {
        if p == 0.0 {
            Self::Pure
        } else if p == 1.0 {
            Self::Classical
        } else if horizon <= cap {
            Self::Exact
        } else {
            Self::Trajectory
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Self::Exact),
            "trajectory" | "mc" => Ok(Self::Trajectory),
            "siy" | "sigma-i-y" => Ok(Self::Siy),
            "classical" => Ok(Self::Classical),
            "pure" => Ok(Self::Pure),
            other => Err(format!("unknown method `{other}` (exact, trajectory, siy, classical, pure)")),
        }
    }
}

/// Named initial coin states at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitSpec {
    Basis(u8),
    Symmetric,
    SymmetricImaginary,
}

impl InitSpec {
    pub fn name(self) -> &'static str {
        match self {
            Self::Basis(1) => "1",
            Self::Basis(_) => "2",
            Self::Symmetric => "symmetric",
            Self::SymmetricImaginary => "symmetric-i",
        }
    }

    pub fn state(self) -> InitialState {
        match self {
            Self::Basis(c) => InitialState::basis(c),
            Self::Symmetric => InitialState::symmetric(),
            Self::SymmetricImaginary => InitialState::symmetric_imaginary(),
        }
    }

    /// Basis states for the methods that need them; the mirror-symmetric
    /// state otherwise (its coin weights are the uniform `(1/2, 1/2)`).
    pub fn default_for(method: Method) -> Self {
        match method {
            Method::Pure | Method::Classical => Self::SymmetricImaginary,
            Method::Exact | Method::Trajectory | Method::Siy => Self::Basis(1),
        }
    }
}

impl FromStr for InitSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "1" | "up" => Ok(Self::Basis(1)),
            "2" | "down" => Ok(Self::Basis(2)),
            "symmetric" => Ok(Self::Symmetric),
            "symmetric-i" | "balanced" => Ok(Self::SymmetricImaginary),
            other => Err(format!("unknown initial state `{other}` (1, 2, symmetric, symmetric-i)")),
        }
    }
}

/// Monte Carlo budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Samples {
    None,
    Trajectories(usize),
    Siy(SiySamples),
}

impl Samples {
    pub fn as_json(&self) -> serde_json::Value {
        match self {
            Self::None => serde_json::Value::Null,
            Self::Trajectories(n) => serde_json::json!({ "trajectories": n }),
            Self::Siy(s) => serde_json::json!({ "n_sigma": s.n_sigma, "n_i": s.n_i, "n_y": s.n_y }),
        }
    }
}

pub const DEFAULT_TRAJECTORIES: usize = 100_000;

/// Sample counts for `method`: one count for trajectory, `n_sigma, n_i, n_y`
/// for siy, none for the exact methods.
pub fn parse_samples(method: Method, raw: Option<&str>) -> Result<Samples> {
    let counts = raw
        .map(|v| {
            v.split(',')
                .map(|s| s.trim().parse::<usize>().ok().filter(|&n| n > 0))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| CliError::config("samples", format!("expected positive integers, got `{v}`")))
        })
        .transpose()?;
    match (method, counts.as_deref()) {
        (Method::Trajectory, None) => Ok(Samples::Trajectories(DEFAULT_TRAJECTORIES)),
        (Method::Trajectory, Some([n])) => Ok(Samples::Trajectories(*n)),
        (Method::Siy, None) => Ok(Samples::Siy(SiySamples::default())),
        (Method::Siy, Some([n_sigma, n_i, n_y])) => Ok(Samples::Siy(SiySamples {
            n_sigma: *n_sigma,
            n_i: *n_i,
            n_y: *n_y,
        })),
        (Method::Trajectory, Some(_)) => Err(CliError::config("samples", "trajectory takes one count")),
        (Method::Siy, Some(_)) => Err(CliError::config("samples", "siy takes `n_sigma, n_i, n_y`")),
        (_, None) => Ok(Samples::None),
        (m, Some(_)) => Err(CliError::config("samples", format!("method {} is exact and takes no samples", m.name()))),
    }
}

fn parse_family(s: &str) -> std::result::Result<MeasurementFamily, String> {
    s.parse::<MeasurementFamily>().map_err(|e| e.to_string())
}

/// Everything needed to produce one distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub walk: WalkParams,
    pub method: Method,
    pub init: InitSpec,
    pub samples: Samples,
    pub gamma: f64,
    pub alpha: f64,
    pub seed: u64,
    pub cap: usize,
}

/// Shared settings of every command, resolved from raw values.
#[derive(Debug, Clone, PartialEq)]
pub struct Common {
    pub family: MeasurementFamily,
    pub gamma: f64,
    pub alpha: f64,
    pub seed: u64,
    pub cap: usize,
}

impl Common {
    pub fn resolve(s: &Settings) -> Result<Self> {
        let family = match s.raw("family") {
            Some(v) => parse_family(v).map_err(|e| CliError::config("family", e))?,
            None => MeasurementFamily::Total,
        };
        let gamma: f64 = s.get_or("gamma", 1.0)?;
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(CliError::config("gamma", format!("must be positive, got {gamma}")));
        }
        let alpha = s.get_or("alpha", qwalk_core::analysis::DEFAULT_ALPHA)?;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(CliError::config("alpha", format!("must lie in (0, 1), got {alpha}")));
        }
        Ok(Self {
            family,
            gamma,
            alpha,
            seed: s.get_or("seed", 0u64)?,
            cap: s.get_or("cap", DEFAULT_EXACT_CAP)?,
        })
    }
}

/// Reject method/parameter combinations before any computation.
pub fn check_method(method: Method, params: &WalkParams, init: InitSpec, cap: usize) -> Result<()> {
    let p = params.decoherence;
    let why = match method {
        Method::Pure if p != 0.0 => Some(format!("method pure is the p = 0 walk, got p = {p}; use exact or trajectory")),
        Method::Classical if p != 1.0 => {
            Some(format!("method classical is the p = 1 walk, got p = {p}; use exact or trajectory"))
        }
        Method::Classical if params.measurement_family != MeasurementFamily::Total => Some(format!(
            "method classical reproduces the total measurement only, got family {}",
            params.measurement_family.name()
        )),
        Method::Siy if p == 0.0 => Some("method siy needs p > 0; use pure for p = 0".to_string()),
        Method::Siy if params.measurement_family != MeasurementFamily::Total => Some(format!(
            "method siy needs family total, got {}; use exact or trajectory",
            params.measurement_family.name()
        )),
        Method::Siy if !matches!(init, InitSpec::Basis(_)) => {
            Some(format!("method siy needs a basis initial state (1 or 2), got {}", init.name()))
        }
        _ => None,
    };
    if let Some(reason) = why {
        return Err(CliError::config("method", reason));
    }
    if method == Method::Exact && params.horizon > cap {
        return Err(qwalk_core::WalkError::HorizonAboveCap {
            horizon: params.horizon,
            cap,
        }
        .into());
    }
    Ok(())
}

impl ExperimentConfig {
    /// Resolve the single-point configuration used by `simulate`.
    pub fn resolve(s: &Settings) -> Result<Self> {
        let common = Common::resolve(s)?;
        let method: Method = s
            .get("method")?
            .ok_or_else(|| CliError::config("method", "required (exact, trajectory, siy, classical, pure)"))?;
        let p = match (s.get::<f64>("p")?, method) {
            (Some(p), _) => p,
            (None, Method::Pure) => 0.0,
            (None, Method::Classical) => 1.0,
            (None, m) => return Err(CliError::config("p", format!("required for method {}", m.name()))),
        };
        let lambda = s.get("lambda")?.ok_or_else(|| CliError::config("lambda", "required"))?;
        let zeta = s.get("zeta")?.ok_or_else(|| CliError::config("zeta", "required"))?;
        let t = s.get("t")?.ok_or_else(|| CliError::config("t", "required"))?;
        let walk = WalkParams::new(lambda, zeta, p, t)?.with_family(common.family);
        let init = s.get("init")?.unwrap_or_else(|| InitSpec::default_for(method));
        check_method(method, &walk, init, common.cap)?;
        let samples = parse_samples(method, s.raw("samples"))?;
        Ok(Self {
            walk,
            method,
            init,
            samples,
            gamma: common.gamma,
            alpha: common.alpha,
            seed: common.seed,
            cap: common.cap,
        })
    }

    pub fn as_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lambda": self.walk.lambda,
            "zeta": self.walk.zeta,
            "p": self.walk.decoherence,
            "t": self.walk.horizon,
            "family": self.walk.measurement_family.name(),
            "shift": "standard",
            "method": self.method.name(),
            "init": self.init.name(),
            "samples": self.samples.as_json(),
            "gamma": self.gamma,
            "alpha": self.alpha,
            "seed": self.seed,
            "cap": self.cap,
        })
    }
}

/// Statistic recorded at each sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    AlphaT,
    Variance,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Self::AlphaT => "alpha_t",
            Self::Variance => "variance",
        }
    }
}

impl FromStr for Statistic {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "alpha_t" | "alpha-t" | "alphat" => Ok(Self::AlphaT),
            "variance" => Ok(Self::Variance),
            other => Err(format!("unknown statistic `{other}` (alpha_t, variance)")),
        }
    }
}

/// Decay models to fit, from `none`, `rational`, `exponential` or `both`.
pub fn parse_models(s: &str) -> std::result::Result<Vec<DecayModel>, String> {
    match s.to_ascii_lowercase().as_str() {
        "none" => Ok(vec![]),
        "both" => Ok(vec![DecayModel::RationalDecay, DecayModel::ExponentialDecay]),
        other => other.parse::<DecayModel>().map(|m| vec![m]).map_err(|e| e.to_string()),
    }
}

/// A reference density as written in a configuration, resolved against the
/// walk parameters where it needs them (`beta` uses `lambda`, `zhang` uses `p`).
pub fn parse_reference(s: &str, settings: &Settings) -> Result<ReferenceDensity> {
    let lower = s.to_ascii_lowercase();
    let (name, arg) = match lower.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (lower.trim(), None),
    };
    let number = |key: &str| -> Result<f64> {
        match arg {
            Some(a) => parse_real(a).map_err(|e| CliError::config("reference", e)),
            None => settings
                .get::<f64>(key)?
                .ok_or_else(|| CliError::config("reference", format!("`{name}` needs `{name}:<value>` or `{key}`"))),
        }
    };
    let density = match name {
        "arcsine" => ReferenceDensity::Arcsine,
        "uniform" => ReferenceDensity::Uniform,
        "semicircle" => ReferenceDensity::Semicircle,
        "konno" => ReferenceDensity::KonnoHadamard,
        "beta" => ReferenceDensity::BetaSymmetric(number("lambda")?),
        "gaussian" => ReferenceDensity::Gaussian { variance: number("variance")? },
        "zhang" => {
            let p = number("p")?;
            if !(p > 0.0 && p <= 1.0) {
                return Err(CliError::config("reference", format!("zhang needs 0 < p <= 1, got {p}")));
            }
            ReferenceDensity::Gaussian {
                variance: qwalk_core::analysis::zhang_variance(p),
            }
        }
        other => {
            return Err(CliError::config(
                "reference",
                format!("unknown reference `{other}` (arcsine, uniform, semicircle, konno, beta[:l], gaussian:v, zhang[:p])"),
            ))
        }
    };
    match density {
        ReferenceDensity::BetaSymmetric(l) if l.is_nan() || l <= 0.0 => {
            Err(CliError::config("reference", format!("beta shape must be positive, got {l}")))
        }
        ReferenceDensity::Gaussian { variance } if variance.is_nan() || variance <= 0.0 => {
            Err(CliError::config("reference", format!("variance must be positive, got {variance}")))
        }
        d => Ok(d),
    }
}

pub fn parse_metric(s: &str) -> Result<Metric> {
    s.parse::<Metric>().map_err(|e| CliError::config("metric", e.to_string()))
}
