//! The `simulate`, `sweep`, `fit` and `compare` commands.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use qwalk_core::analysis::{
    distribution_distance, fit_decay, initial_guess, tail_epsilon, Comparand, DecayModel, FitResult, Metric,
};
use qwalk_core::rates::default_fit_grid;
use qwalk_core::{Distribution, WalkParams};

use crate::config::{
    check_method, parse_metric, parse_models, parse_reference, parse_samples, Common, ExperimentConfig, InitSpec, Method, Samples,
    Settings, Statistic,
};
use crate::engine::Engine;
use crate::error::{CliError, Result};
use crate::output::{metadata_path, provenance, real, sibling, write_csv, write_distribution, write_json};

/// What a successful command reports on stdout.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub outputs: Vec<PathBuf>,
    pub summary: Value,
}

impl Report {
    pub fn to_json_line(&self) -> String {
        let outputs: Vec<String> = self.outputs.iter().map(|p| p.display().to_string()).collect();
        json!({ "status": "ok", "outputs": outputs, "summary": self.summary }).to_string()
    }
}

fn out_path(settings: &Settings, default: &str) -> PathBuf {
    PathBuf::from(settings.raw("out").unwrap_or(default))
}

fn metadata(command: &str, settings: &Settings, started: Instant, extra: Value) -> Value {
    let mut record = json!({
        "command": command,
        "settings": settings.as_json(),
        "provenance": provenance(),
        "wall_time_seconds": started.elapsed().as_secs_f64(),
    });
    if let (Value::Object(base), Value::Object(more)) = (&mut record, extra) {
        base.extend(more);
    }
    record
}

pub fn simulate(settings: &Settings) -> Result<Report> {
    let started = Instant::now();
    let config = ExperimentConfig::resolve(settings)?;
    let out = out_path(settings, "simulation.csv");
    let dist = Engine::from_config(&config).distribution(&config.walk)?;
    let rescaled = dist.rescale(config.gamma)?;
    write_distribution(&out, &rescaled, !config.method.is_exact())?;

    let meta_path = metadata_path(&out);
    let summary = json!({
        "total_mass": dist.total_mass(),
        "mean": rescaled.mean(),
        "variance": rescaled.variance(),
        "alpha_t": tail_epsilon(&dist, config.alpha)?.alpha_t,
    });
    let record = metadata(
        "simulate",
        settings,
        started,
        json!({
            "config": config.as_json(),
            "method": config.method.name(),
            "clamp_events": config.walk.clamp_events(),
            "seed": config.seed,
            "outputs": { "distribution": out.display().to_string() },
            "summary": summary.clone(),
        }),
    );
    write_json(&meta_path, &record)?;
    Ok(Report {
        outputs: vec![out, meta_path],
        summary,
    })
}

/// A sweep: the cartesian grid `lambda x zeta x p` (in that nesting order)
/// evaluated on a common time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub lambdas: Vec<f64>,
    pub zetas: Vec<f64>,
    pub ps: Vec<f64>,
    pub times: Vec<usize>,
    pub statistic: Statistic,
    pub models: Vec<DecayModel>,
    pub method: Option<Method>,
    pub init: Option<InitSpec>,
    pub samples: Option<String>,
    pub common: Common,
}

impl SweepPlan {
    pub fn resolve(s: &Settings) -> Result<Self> {
        let grid = |key: &str| s.grid(key)?.ok_or_else(|| CliError::config(key, "required"));
        let statistic = s.get_or("statistic", Statistic::AlphaT)?;
        let models = match s.raw("fit") {
            Some(v) => parse_models(v).map_err(|e| CliError::config("fit", e))?,
            None if statistic == Statistic::AlphaT => parse_models("both").expect("known"),
            None => vec![],
        };
        if statistic != Statistic::AlphaT && !models.is_empty() {
            return Err(CliError::config("fit", "decay fits apply to the alpha_t statistic only"));
        }
        let times = match (s.time_grid("times")?, s.get::<usize>("t")?) {
            (Some(times), _) => times,
            (None, Some(t)) => vec![t],
            (None, None) => default_fit_grid(),
        };
        let method: Option<Method> = s.get("method")?;
        let ps = match (s.grid("p")?, method) {
            (Some(ps), _) => ps,
            (None, Some(Method::Pure)) => vec![0.0],
            (None, Some(Method::Classical)) => vec![1.0],
            (None, _) => return Err(CliError::config("p", "required")),
        };
        Ok(Self {
            lambdas: grid("lambda")?,
            zetas: grid("zeta")?,
            ps,
            times,
            statistic,
            models,
            method,
            init: s.get("init")?,
            samples: s.raw("samples").map(str::to_string),
            common: Common::resolve(s)?,
        })
    }

    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        for &l in &self.lambdas {
            for &z in &self.zetas {
                for &p in &self.ps {
                    out.push((l, z, p));
                }
            }
        }
        out
    }

    fn horizon(&self) -> usize {
        self.times.iter().copied().max().unwrap_or(1)
    }

    fn engine(&self, params: &WalkParams) -> Result<Engine> {
        let method = self
            .method
            .unwrap_or_else(|| Method::automatic(params.decoherence, params.horizon, self.common.cap));
        let init = self.init.unwrap_or_else(|| InitSpec::default_for(method));
        check_method(method, params, init, self.common.cap)?;
        Ok(Engine {
            method,
            init,
            samples: parse_samples(method, self.samples.as_deref())?,
            seed: self.common.seed,
            cap: self.common.cap,
        })
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub lambda: f64,
    pub zeta: f64,
    pub p: f64,
    pub method: Method,
    pub init: InitSpec,
    pub clamp_events: Vec<usize>,
    /// `(t, value, standard error)` in time order.
    pub values: Vec<(usize, f64, Option<f64>)>,
    pub fits: Vec<(DecayModel, std::result::Result<FitResult, String>)>,
}

fn variance_stderr(d: &Distribution, gamma: f64, n: usize) -> Result<(f64, f64)> {
    let r = d.rescale(gamma)?;
    let mean = r.mean();
    let var = r.variance();
    let m4: f64 = r.iter().map(|(x, m)| m * (x - mean).powi(4)).sum();
    Ok((var, ((m4 - var * var).max(0.0) / n as f64).sqrt()))
}

pub fn evaluate_point(plan: &SweepPlan, lambda: f64, zeta: f64, p: f64) -> Result<PointResult> {
    let params = WalkParams::new(lambda, zeta, p, plan.horizon())?.with_family(plan.common.family);
    let engine = plan.engine(&params)?;
    let dists = engine.distributions_at(&params, &plan.times)?;
    let mut values = Vec::with_capacity(dists.len());
    for (d, &t) in dists.iter().zip(&plan.times) {
        values.push(match plan.statistic {
            Statistic::AlphaT => (t, tail_epsilon(d, plan.common.alpha)?.alpha_t, None),
            Statistic::Variance => match engine.samples {
                Samples::Trajectories(n) => {
                    let (v, se) = variance_stderr(d, plan.common.gamma, n)?;
                    (t, v, Some(se))
                }
                _ => (t, d.rescale(plan.common.gamma)?.variance(), None),
            },
        });
    }
    let series: Vec<(f64, f64)> = values.iter().map(|&(t, v, _)| (t as f64, v)).collect();
    let fits = plan
        .models
        .iter()
        .map(|&m| (m, fit_decay(&series, m, initial_guess(&series, m)).map_err(|e| e.to_string())))
        .collect();
    Ok(PointResult {
        lambda,
        zeta,
        p,
        method: engine.method,
        init: engine.init,
        clamp_events: params.clamp_events(),
        values,
        fits,
    })
}

pub const POINTS_HEADER: [&str; 7] = ["lambda", "zeta", "p", "t", "statistic", "value", "stderr"];
pub const COEFFICIENTS_HEADER: [&str; 9] = ["lambda", "zeta", "p", "model", "c", "r", "r_squared", "rmse", "converged"];

fn coefficient_row(
    key: [String; 3],
    model: DecayModel,
    fit: &std::result::Result<FitResult, String>,
) -> Vec<String> {
    let [l, z, p] = key;
    let mut row = vec![l, z, p, model.name().to_string()];
    match fit {
        Ok(f) => row.extend([real(f.c), real(f.r), real(f.r_squared), real(f.rmse), f.converged.to_string()]),
        Err(_) => row.extend([String::new(), String::new(), String::new(), String::new(), "false".into()]),
    }
    row
}

fn fit_json(model: DecayModel, fit: &std::result::Result<FitResult, String>) -> Value {
    match fit {
        Ok(f) => json!({
            "model": model.name(), "c": f.c, "r": f.r, "r_squared": f.r_squared, "rmse": f.rmse,
            "iterations": f.iterations, "converged": f.converged, "gradient_norm": f.gradient_norm,
            "degenerate": f.degenerate,
        }),
        Err(e) => json!({ "model": model.name(), "error": e }),
    }
}

fn point_key(pt: &PointResult) -> [String; 3] {
    [real(pt.lambda), real(pt.zeta), real(pt.p)]
}

pub fn sweep(settings: &Settings) -> Result<Report> {
    let started = Instant::now();
    let plan = SweepPlan::resolve(settings)?;
    let out = out_path(settings, "sweep.csv");
    let points = plan.points();
    // results come back in grid order whatever the completion order
    let results: Vec<Result<PointResult>> =
        points.par_iter().map(|&(l, z, p)| evaluate_point(&plan, l, z, p)).collect();

    let mut rows = Vec::new();
    let mut coefficients = Vec::new();
    let mut point_records = Vec::new();
    let mut failures = Vec::new();
    for (&(l, z, p), result) in points.iter().zip(&results) {
        match result {
            Ok(pt) => {
                for &(t, v, se) in &pt.values {
                    rows.push(vec![
                        real(l),
                        real(z),
                        real(p),
                        t.to_string(),
                        plan.statistic.name().to_string(),
                        real(v),
                        se.map(real).unwrap_or_default(),
                    ]);
                }
                for (model, fit) in &pt.fits {
                    coefficients.push(coefficient_row(point_key(pt), *model, fit));
                    if let Err(e) = fit {
                        failures.push(json!({ "lambda": l, "zeta": z, "p": p, "stage": "fit", "model": model.name(), "error": e }));
                    }
                }
                point_records.push(json!({
                    "lambda": l, "zeta": z, "p": p, "method": pt.method.name(), "init": pt.init.name(),
                    "clamp_events": pt.clamp_events,
                    "fits": pt.fits.iter().map(|(m, f)| fit_json(*m, f)).collect::<Vec<_>>(),
                }));
            }
            Err(e) => {
                eprintln!("{}", json!({ "warning": { "lambda": l, "zeta": z, "p": p, "message": e.to_string() } }));
                failures.push(json!({ "lambda": l, "zeta": z, "p": p, "stage": "simulate", "error": e.to_string() }));
            }
        }
    }

    write_csv(&out, &POINTS_HEADER, rows)?;
    let mut outputs = vec![out.clone()];
    let coeff_path = sibling(&out, "coefficients.csv");
    if !plan.models.is_empty() {
        write_csv(&coeff_path, &COEFFICIENTS_HEADER, coefficients)?;
        outputs.push(coeff_path.clone());
    }
    let meta_path = metadata_path(&out);
    let summary = json!({ "points": points.len(), "failures": failures.len() });
    let record = metadata(
        "sweep",
        settings,
        started,
        json!({
            "grid": {
                "lambda": plan.lambdas, "zeta": plan.zetas, "p": plan.ps, "times": plan.times,
                "family": plan.common.family.name(),
            },
            "statistic": plan.statistic.name(),
            "alpha": plan.common.alpha,
            "gamma": plan.common.gamma,
            "seed": plan.common.seed,
            "cap": plan.common.cap,
            "models": plan.models.iter().map(|m| m.name()).collect::<Vec<_>>(),
            "rmse_degrees_of_freedom": "N - 2",
            "fit_start": "c0 = 1, r0 = -ln(y_T)/T (exponential) or -ln(y_T)/ln(T) (rational) at the last grid time T",
            "seeding": "every Monte Carlo run in the sweep uses the master seed",
            "points": point_records,
            "failures": failures,
            "outputs": outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        }),
    );
    write_json(&meta_path, &record)?;
    outputs.push(meta_path);
    Ok(Report { outputs, summary })
}

/// Group key `[lambda, zeta, p]` (empty when absent) and its `(t, value)` points.
pub type Series = ([String; 3], Vec<(f64, f64)>);

/// `(t, value)` series read from a CSV with a `t` column and a `value` or
/// `alpha_t` column, grouped by `(lambda, zeta, p)` when those columns exist.
pub fn read_series(path: &Path) -> Result<Vec<Series>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::input(path, e.to_string()))?;
    let header = reader.headers().map_err(|e| CliError::input(path, e.to_string()))?.clone();
    let column = |name: &str| header.iter().position(|h| h.trim() == name);
    let t_col = column("t").ok_or_else(|| CliError::input(path, "missing column `t`"))?;
    let v_col = column("value")
        .or_else(|| column("alpha_t"))
        .ok_or_else(|| CliError::input(path, "missing column `value` (or `alpha_t`)"))?;
    let key_cols = [column("lambda"), column("zeta"), column("p")];

    let mut groups: Vec<Series> = Vec::new();
    let mut index: BTreeMap<[String; 3], usize> = BTreeMap::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::input(path, e.to_string()))?;
        let field = |k: usize| record.get(k).unwrap_or("").trim();
        let number = |k: usize| {
            field(k)
                .parse::<f64>()
                .map_err(|_| CliError::input(path, format!("row {}: `{}` is not a number", line + 2, field(k))))
        };
        let key = key_cols.map(|c| c.map(|k| field(k).to_string()).unwrap_or_default());
        let slot = *index.entry(key.clone()).or_insert_with(|| {
            groups.push((key, Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push((number(t_col)?, number(v_col)?));
    }
    if groups.is_empty() {
        return Err(CliError::input(path, "no data rows"));
    }
    Ok(groups)
}

pub fn fit(settings: &Settings, input: Option<&Path>) -> Result<Report> {
    let started = Instant::now();
    let out = out_path(settings, "fit.csv");
    let models = parse_models(settings.raw("fit").unwrap_or("both")).map_err(|e| CliError::config("fit", e))?;
    if models.is_empty() {
        return Err(CliError::config("fit", "nothing to fit"));
    }
    let (source, groups) = match input {
        Some(path) => (json!({ "series": path.display().to_string() }), read_series(path)?),
        None => {
            // a single sweep point, computed from the configuration
            let mut single = settings.clone();
            single.set("fit", "none");
            let plan = SweepPlan::resolve(&single)?;
            if plan.points().len() != 1 {
                return Err(CliError::config("lambda", "fit without an input series needs single lambda, zeta and p"));
            }
            let (l, z, p) = plan.points()[0];
            let pt = evaluate_point(&plan, l, z, p)?;
            let series = pt.values.iter().map(|&(t, v, _)| (t as f64, v)).collect();
            let source = json!({
                "computed": { "method": pt.method.name(), "init": pt.init.name(), "times": plan.times,
                              "statistic": plan.statistic.name(), "clamp_events": pt.clamp_events },
            });
            (source, vec![(point_key(&pt), series)])
        }
    };

    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for (key, series) in &groups {
        for &model in &models {
            let result = fit_decay(series, model, initial_guess(series, model)).map_err(|e| e.to_string());
            rows.push(coefficient_row(key.clone(), model, &result));
            fits.push(json!({ "key": key, "fit": fit_json(model, &result) }));
        }
    }
    write_csv(&out, &COEFFICIENTS_HEADER, rows)?;
    let meta_path = metadata_path(&out);
    let summary = json!({ "series": groups.len(), "fits": fits.len() });
    let record = metadata(
        "fit",
        settings,
        started,
        json!({ "source": source, "fits": fits, "rmse_degrees_of_freedom": "N - 2",
                "outputs": { "coefficients": out.display().to_string() } }),
    );
    write_json(&meta_path, &record)?;
    Ok(Report {
        outputs: vec![out, meta_path],
        summary,
    })
}

/// A distribution CSV (`x` and `prob` columns, as written by `simulate`).
pub fn read_distribution(path: &Path) -> Result<Distribution> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::input(path, e.to_string()))?;
    let header = reader.headers().map_err(|e| CliError::input(path, e.to_string()))?.clone();
    let column = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::input(path, format!("missing column `{name}`")))
    };
    let (x_col, p_col) = (column("x")?, column("prob")?);
    let mut points = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::input(path, e.to_string()))?;
        let bad = |what: &str| CliError::input(path, format!("row {}: bad {what}", line + 2));
        let x: i64 = record.get(x_col).and_then(|v| v.trim().parse().ok()).ok_or_else(|| bad("x"))?;
        let m: f64 = record.get(p_col).and_then(|v| v.trim().parse().ok()).ok_or_else(|| bad("prob"))?;
        points.push((x, m));
    }
    let horizon = points.iter().map(|(x, _)| x.unsigned_abs() as usize).max().ok_or_else(|| CliError::input(path, "no data rows"))?;
    Distribution::from_points(horizon.max(1), points).map_err(|e| CliError::input(path, e.to_string()))
}

pub fn compare(settings: &Settings, input: &Path, against: Option<&Path>) -> Result<Report> {
    let started = Instant::now();
    let common = Common::resolve(settings)?;
    let dist = read_distribution(input)?;
    let (metric, distance, target) = match (against, settings.raw("reference")) {
        (Some(_), Some(_)) => return Err(CliError::config("reference", "give either a reference or --against, not both")),
        (None, None) => return Err(CliError::config("reference", "required unless --against is given")),
        (Some(other), None) => {
            let metric = settings.raw("metric").map(parse_metric).transpose()?.unwrap_or(Metric::TotalVariation);
            let b = read_distribution(other)?;
            if b.horizon() != dist.horizon() {
                return Err(CliError::input(
                    other,
                    format!("horizon {} does not match {} in {}", b.horizon(), dist.horizon(), input.display()),
                ));
            }
            let d = distribution_distance(Comparand::Lattice(&dist), Comparand::Lattice(&b), metric)?;
            (metric, d, json!({ "against": other.display().to_string() }))
        }
        (None, Some(spec)) => {
            let metric = settings.raw("metric").map(parse_metric).transpose()?.unwrap_or(Metric::KolmogorovSmirnov);
            let reference = parse_reference(spec, settings)?;
            let rescaled = dist.rescale(common.gamma)?;
            let d = distribution_distance(Comparand::Rescaled(&rescaled), Comparand::Reference(&reference), metric)?;
            (metric, d, json!({ "reference": spec, "resolved": format!("{reference:?}"), "gamma": common.gamma }))
        }
    };
    let metric_name = match metric {
        Metric::TotalVariation => "tv",
        Metric::KolmogorovSmirnov => "ks",
    };
    let summary = json!({ "metric": metric_name, "distance": distance, "horizon": dist.horizon(), "target": target });
    let mut outputs = Vec::new();
    if let Some(out) = settings.raw("out") {
        let out = PathBuf::from(out);
        let record = metadata(
            "compare",
            settings,
            started,
            json!({ "input": input.display().to_string(), "result": summary.clone() }),
        );
        write_json(&out, &record)?;
        outputs.push(out);
    }
    Ok(Report { outputs, summary })
}
