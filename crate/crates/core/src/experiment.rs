//! Monte Carlo runners over simulated data: denoising accuracy sweeps, the
//! forecast comparison, and the grid-permutation check.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::denoise::{mise, Method};
use crate::error::Result;
use crate::forecast::{kl_forecast, mean_forecast, naive_forecast, normalized_error, Strategy};
use crate::linalg::derive_seed;
use crate::grid::CurveSeries;
use crate::model::{fit, fit_known, Fitted, PipelineConfig};
use crate::sim::{generate_dataset, theoretical_bounds, DgpConfig};

/// One long-format result record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub label: String,
    pub n: usize,
    pub lambda: f64,
    pub d: usize,
    pub p: usize,
    pub run: usize,
    pub seed: u64,
    pub method: String,
    pub metric: String,
    pub value: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub rows: Vec<Row>,
}

/// Aggregate of one `(label, p, method, metric)` group over runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub label: String,
    pub n: usize,
    pub lambda: f64,
    pub p: usize,
    pub method: String,
    pub metric: String,
    pub count: usize,
    pub failures: usize,
    pub mean: f64,
    pub std_error: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl ExperimentResult {
    /// Values of a metric for one method, optionally restricted to one configuration label.
    pub fn values(&self, label: Option<&str>, method: &str, metric: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.method == method && r.metric == metric && r.error.is_none())
            .filter(|r| label.is_none_or(|l| r.label == l))
            .map(|r| r.value)
            .collect()
    }

    pub fn failures(&self) -> Vec<&Row> {
        self.rows.iter().filter(|r| r.error.is_some()).collect()
    }

    pub fn summaries(&self) -> Vec<Summary> {
        let mut keys: Vec<(String, usize, String, String)> = Vec::new();
        for r in &self.rows {
            let key = (r.label.clone(), r.p, r.method.clone(), r.metric.clone());
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        keys.into_iter()
            .map(|(label, p, method, metric)| {
                let group: Vec<&Row> = self
                    .rows
                    .iter()
                    .filter(|r| r.label == label && r.p == p && r.method == method && r.metric == metric)
                    .collect();
                let mut v: Vec<f64> = group.iter().filter(|r| r.error.is_none()).map(|r| r.value).collect();
                v.sort_by(|a, b| a.total_cmp(b));
                let count = v.len();
                let mean = v.iter().sum::<f64>() / count as f64;
                let var = if count > 1 {
                    v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (count - 1) as f64
                } else {
                    f64::NAN
                };
                Summary {
                    n: group[0].n,
                    lambda: group[0].lambda,
                    label,
                    p,
                    method,
                    metric,
                    count,
                    failures: group.len() - count,
                    mean,
                    std_error: (var / count as f64).sqrt(),
                    median: quantile(&v, 0.5),
                    q1: quantile(&v, 0.25),
                    q3: quantile(&v, 0.75),
                }
            })
            .collect()
    }

    pub fn median(&self, label: Option<&str>, method: &str, metric: &str) -> f64 {
        let mut v = self.values(label, method, metric);
        v.sort_by(|a, b| a.total_cmp(b));
        quantile(&v, 0.5)
    }

    pub fn mean(&self, label: Option<&str>, method: &str, metric: &str) -> f64 {
        let v = self.values(label, method, metric);
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// One point of a sweep: data-generating configuration and estimation settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub dgp: DgpConfig,
    pub pipeline: PipelineConfig,
}

impl SweepPoint {
    /// Estimation with the true dimension pinned.
    pub fn pinned(dgp: DgpConfig, mut pipeline: PipelineConfig) -> Self {
        pipeline.pin_d = Some(dgp.d);
        Self { dgp, pipeline }
    }

    fn label(&self) -> String {
        self.dgp.label()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenoisingOptions {
    /// Also denoise with the true subspaces.
    pub oracle: bool,
    /// Denoise with the estimated subspaces.
    pub estimated: bool,
}

impl Default for DenoisingOptions {
    fn default() -> Self {
        Self { oracle: false, estimated: true }
    }
}

/// Seed of the simulated data for a run. Points sharing `dgp.seed` share data streams.
pub fn run_seed(base_seed: u64, dgp: &DgpConfig, run: usize) -> u64 {
    derive_seed(base_seed, &[dgp.seed, run as u64])
}

struct RowFactory<'a> {
    point: &'a SweepPoint,
    label: String,
    run: usize,
    seed: u64,
}

impl RowFactory<'_> {
    fn row(&self, method: &str, metric: &str, value: f64) -> Row {
        Row {
            label: self.label.clone(),
            n: self.point.dgp.n,
            lambda: self.point.dgp.lambda,
            d: self.point.dgp.d,
            p: self.point.pipeline.noise.p,
            run: self.run,
            seed: self.seed,
            method: method.to_string(),
            metric: metric.to_string(),
            value,
            error: None,
        }
    }

    fn failure(&self, method: &str, message: String) -> Row {
        Row { error: Some(message), ..self.row(method, "error", f64::NAN) }
    }
}

fn denoising_run(point: &SweepPoint, opts: DenoisingOptions, run: usize, base_seed: u64) -> Vec<Row> {
    let seed = run_seed(base_seed, &point.dgp, run);
    let rf = RowFactory { point, label: point.label(), run, seed };
    let cfg = DgpConfig { seed, ..point.dgp.clone() };
    let data = match generate_dataset(&cfg) {
        Ok(d) => d,
        Err(e) => return vec![rf.failure("data", e.to_string())],
    };
    let lambda = cfg.lambda;
    let mut rows = Vec::new();
    let record = |rows: &mut Vec<Row>, method: &str, value: f64| {
        rows.push(rf.row(method, "mise", value));
        if lambda > 0.0 {
            rows.push(rf.row(method, "mise_over_lambda", value / lambda));
        }
    };

    if opts.estimated {
        match fit(&data.y, &point.pipeline, derive_seed(seed, &[2])) {
            Ok(fitted) => {
                if let Some(ds) = &fitted.dynspace {
                    rows.push(rf.row("estimate", "d_hat", ds.d_hat as f64));
                }
                if let Some(nm) = &fitted.noise {
                    rows.push(rf.row("estimate", "d_eps", nm.d_eps() as f64));
                    rows.push(rf.row("estimate", "d_par", nm.d_par() as f64));
                    rows.push(rf.row("estimate", "d_perp", nm.d_perp() as f64));
                }
                for method in [Method::Orthogonal, Method::MiseOptimal] {
                    match fitted.denoise(&data.y, method).and_then(|r| Ok((mise(&data.x, &r.denoised)?, r))) {
                        Ok((m, r)) => {
                            record(&mut rows, method.name(), m);
                            if method == Method::MiseOptimal {
                                rows.push(rf.row(method.name(), "lambda_hat", r.lambda_hat));
                                rows.push(rf.row(method.name(), "lambda_trace", r.lambda_trace));
                            }
                        }
                        Err(e) => rows.push(rf.failure(method.name(), e.to_string())),
                    }
                }
            }
            Err(e) => rows.push(rf.failure("estimate", e.to_string())),
        }
    }

    if opts.oracle {
        match fit_known(&data.y, &data.truth.oracle(), &point.pipeline.noise) {
            Ok(fitted) => {
                for method in [Method::Orthogonal, Method::MiseOptimal] {
                    let name = format!("oracle-{}", method.name());
                    match fitted.denoise_series(&data.y, method).and_then(|x| mise(&data.x, &x)) {
                        Ok(m) => record(&mut rows, &name, m),
                        Err(e) => rows.push(rf.failure(&name, e.to_string())),
                    }
                }
            }
            Err(e) => rows.push(rf.failure("oracle", e.to_string())),
        }
    }
    rows
}

/// In-sample denoising accuracy over a sweep of configurations.
///
/// Runs are independent tasks; rows come back ordered by (point, run) regardless of scheduling.
pub fn run_denoising_experiment(sweep: &[SweepPoint], opts: DenoisingOptions, runs: usize, base_seed: u64) -> ExperimentResult {
    let tasks: Vec<(usize, usize)> = (0..sweep.len()).flat_map(|i| (0..runs).map(move |r| (i, r))).collect();
    let rows = tasks
        .par_iter()
        .map(|&(i, r)| denoising_run(&sweep[i], opts, r, base_seed))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    ExperimentResult { rows }
}

fn strategy_errors(y: &CurveSeries, target: &CurveSeries, fitted: &Fitted, p: usize) -> Result<Vec<(Strategy, f64)>> {
    let d = fitted.d();
    let mut out = Vec::with_capacity(Strategy::ALL.len());
    for s in Strategy::ALL {
        let forecast = match s {
            Strategy::Mean => mean_forecast(y, p)?,
            Strategy::Naive => naive_forecast(y, p)?,
            Strategy::KarhunenLoeve => kl_forecast(y, d, p)?,
            Strategy::MiseOptimal => kl_forecast(&fitted.denoise_series(y, Method::MiseOptimal)?, d, p)?,
            Strategy::Orthogonal => kl_forecast(&fitted.denoise_series(y, Method::Orthogonal)?, d, p)?,
        };
        out.push((s, normalized_error(target, &forecast, p)?));
    }
    Ok(out)
}

/// Normalized one-step forecast errors of all strategies on one simulated sample.
///
/// The VAR order is the pipeline's `p`; denoising uses the pipeline's pinned dimension
/// or the true one.
pub fn forecast_errors(point: &SweepPoint, seed: u64) -> Result<Vec<(Strategy, f64)>> {
    let cfg = DgpConfig { seed, ..point.dgp.clone() };
    let data = generate_dataset(&cfg)?;
    let d = point.pipeline.pin_d.unwrap_or(cfg.d);
    let pipeline = PipelineConfig { pin_d: Some(d), ..point.pipeline.clone() };
    let fitted = fit(&data.y, &pipeline, derive_seed(seed, &[2]))?;
    strategy_errors(&data.y, &data.x, &fitted, point.pipeline.noise.p)
}

/// Forecast errors on observed data, scored against the observations themselves.
pub fn observed_forecast_errors(y: &CurveSeries, pipeline: &PipelineConfig, seed: u64) -> Result<Vec<(Strategy, f64)>> {
    let fitted = fit(y, pipeline, seed)?;
    strategy_errors(y, y, &fitted, pipeline.noise.p)
}

/// Forecast comparison over `runs` samples; a final `bound` row holds the theoretical lower bound.
pub fn run_forecast_experiment(point: &SweepPoint, runs: usize, base_seed: u64) -> ExperimentResult {
    let label = point.label();
    let mut rows: Vec<Row> = (0..runs)
        .into_par_iter()
        .map(|run| {
            let seed = run_seed(base_seed, &point.dgp, run);
            let rf = RowFactory { point, label: label.clone(), run, seed };
            match forecast_errors(point, seed) {
                Ok(v) => v.into_iter().map(|(s, e)| rf.row(s.name(), "delta_f", e)).collect(),
                Err(e) => vec![rf.failure("forecast", e.to_string())],
            }
        })
        .collect::<Vec<Vec<Row>>>()
        .into_iter()
        .flatten()
        .collect();
    let rf = RowFactory { point, label, run: 0, seed: base_seed };
    match theoretical_bounds(&point.dgp) {
        Ok(b) => rows.push(rf.row("bound", "delta_f", b.forecast_bound)),
        Err(e) => rows.push(rf.failure("bound", e.to_string())),
    }
    ExperimentResult { rows }
}

/// Closed-form floors of a sweep point as `bound-orthogonal` and `bound-mise-optimal` rows.
pub fn bound_rows(point: &SweepPoint) -> Vec<Row> {
    let rf = RowFactory { point, label: point.label(), run: 0, seed: point.dgp.seed };
    let lambda = point.dgp.lambda;
    match theoretical_bounds(&point.dgp) {
        Ok(b) => {
            let mut rows = Vec::new();
            for (method, value) in [("bound-orthogonal", b.ortho_min), ("bound-mise-optimal", b.opt_min)] {
                rows.push(rf.row(method, "mise", value));
                if lambda > 0.0 {
                    rows.push(rf.row(method, "mise_over_lambda", value / lambda));
                }
            }
            rows
        }
        Err(e) => vec![rf.failure("bound", e.to_string())],
    }
}

/// A uniformly random permutation of `0..n`.
pub fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    perm
}

/// Run the full pipeline on a sample and on its grid-permuted copy with the same seed;
/// return the largest deviation between the first output and the un-permuted second output.
pub fn shuffle_check(point: &SweepPoint, perm: &[usize], seed: u64) -> Result<f64> {
    let cfg = DgpConfig { seed, ..point.dgp.clone() };
    let data = generate_dataset(&cfg)?;
    let fit_seed = derive_seed(seed, &[2]);
    let plain = fit(&data.y, &point.pipeline, fit_seed)?.denoise_series(&data.y, Method::MiseOptimal)?;
    let shuffled_y = data.y.permute_columns(perm);
    let shuffled = fit(&shuffled_y, &point.pipeline, fit_seed)?.denoise_series(&shuffled_y, Method::MiseOptimal)?;
    let mut inverse = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inverse[p] = i;
    }
    let restored = shuffled.permute_columns(&inverse);
    Ok((plain.data() - restored.data()).amax())
}

/// `shuffle_check` on `count` samples, each with its own random permutation.
pub fn run_shuffle_experiment(point: &SweepPoint, count: usize, base_seed: u64) -> ExperimentResult {
    let label = point.label();
    let rows = (0..count)
        .into_par_iter()
        .map(|run| {
            let seed = run_seed(base_seed, &point.dgp, run);
            let rf = RowFactory { point, label: label.clone(), run, seed };
            let perm = random_permutation(point.dgp.grid_points, derive_seed(seed, &[3]));
            match shuffle_check(point, &perm, seed) {
                Ok(dev) => rf.row(Method::MiseOptimal.name(), "max_deviation", dev),
                Err(e) => rf.failure(Method::MiseOptimal.name(), e.to_string()),
            }
        })
        .collect();
    ExperimentResult { rows }
}
