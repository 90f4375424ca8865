//! Command-line front end: argument and config-file parsing, and the
//! `simulate`, `denoise`, `dimension`, `forecast` and `reproduce` workflows.
//!
//! Precedence is flags over config file over built-in defaults. Every run writes
//! `manifest.json` with the resolved settings; passing that manifest back via
//! `--config` reproduces the data files byte for byte.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::denoise::Method;
use crate::dynspace::{estimate_dynspace, DfpcaParams};
use crate::error::{Error, Result};
use crate::experiment::{
    bound_rows, observed_forecast_errors, run_denoising_experiment, run_forecast_experiment, run_shuffle_experiment,
    DenoisingOptions, ExperimentResult, Row, SweepPoint,
};
use crate::grid::{CurveSeries, Grid};
use crate::model::{fit, PipelineConfig};
use crate::noise::NoiseParams;
use crate::panel::{load_csv, preprocess, save_results, DenoiseSummary, Layout, Output, RawPanel};
use crate::sim::{generate_dataset, theoretical_bounds, DgpConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COMPUTE: i32 = 2;

/// Sample sizes of the convergence sweeps.
pub const SWEEP_N: [usize; 5] = [200, 400, 800, 1600, 3200];
/// Noise levels of the noise-level sweep.
pub const SWEEP_LAMBDA: [f64; 7] = [0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.6];
/// Noise levels of the forecast table.
pub const TABLE_LAMBDA: [f64; 3] = [0.05, 0.2, 0.4];
const SWEEP_D: [usize; 3] = [2, 4, 6];
const DEFAULT_RUNS: usize = 50;
const SYNTHETIC_START: &str = "2000-01-01";

#[derive(Debug, Parser)]
#[command(name = "fdenoise", version, about = "Denoise curve time series and reproduce the simulation study")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write simulated Y, X and noise panels.
    Simulate(Settings),
    /// Estimate the model from a CSV panel and write the denoised curves.
    Denoise(Settings),
    /// Run the bootstrap dimension test only.
    Dimension(Settings),
    /// Compare the five forecasting strategies on a CSV panel or simulated data.
    Forecast(Settings),
    /// Run one of the named simulation experiments.
    Reproduce {
        experiment: Experiment,
        #[command(flatten)]
        settings: Settings,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Experiment {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Table1,
    #[value(name = "appendixE")]
    #[serde(rename = "appendixE")]
    AppendixE,
    Shuffle,
}

/// Every tunable of every command. Unset fields fall back to the config file, then defaults.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    /// JSON config file (or a manifest from an earlier run).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Built-in VAR model (paper-d2, paper-d4, paper-d6, alt-d4).
    #[arg(long)]
    pub model: Option<String>,
    /// Signal dimension of the simulated data.
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of noise components.
    #[arg(long)]
    pub d_eps: Option<usize>,
    /// Geometric decay of the noise variances.
    #[arg(long)]
    pub a: Option<f64>,
    /// Noise share of the integrated variance.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Number of curves (time points).
    #[arg(long)]
    pub n: Option<usize>,
    /// Evaluation points per curve.
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Comma-separated tilt angles, one per noise component.
    #[arg(long, value_delimiter = ',')]
    pub theta: Option<Vec<f64>>,
    /// Number of lags in the dynamical operator.
    #[arg(long)]
    pub q: Option<usize>,
    /// Comma-separated lag weights, one per lag.
    #[arg(long, value_delimiter = ',')]
    pub c: Option<Vec<f64>>,
    /// Bootstrap replicates.
    #[arg(long = "B")]
    #[serde(rename = "B")]
    pub b: Option<usize>,
    /// Significance level of the dimension test.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Lag order of the loading VAR.
    #[arg(long)]
    pub p: Option<usize>,
    /// Explained-variance cutoff for the noise space.
    #[arg(long)]
    pub tau_eps: Option<f64>,
    /// Cutoff for the parallel noise modes.
    #[arg(long)]
    pub tau_par: Option<f64>,
    /// Cutoff for the perpendicular noise modes.
    #[arg(long)]
    pub tau_perp: Option<f64>,
    /// Monte Carlo runs per configuration.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Base seed; every run derives its own stream from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,
    /// CSV panel to read.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// wide or long.
    #[arg(long)]
    pub layout: Option<String>,
    /// Seasonal kernel bandwidth in days; enables preprocessing.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// Directory for the result files and manifest.
    #[arg(long)]
    #[serde(skip)]
    pub output_dir: Option<PathBuf>,
    /// Use this dimension instead of the bootstrap estimate.
    #[arg(long)]
    pub pin_d: Option<usize>,
    /// Estimate d by bootstrap in the denoising sweeps instead of pinning the truth.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub estimate_d: Option<bool>,
    /// Add the oracle variant to denoising sweeps.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub oracle: Option<bool>,
    /// orthogonal or mise-optimal.
    #[arg(long)]
    pub method: Option<String>,
}

macro_rules! overlay {
    ($base:expr, $over:expr, $($f:ident),*) => {
        Settings { $($f: $over.$f.or($base.$f)),* }
    };
}

impl Settings {
    /// Fields set in `over` win.
    fn overlay(self, over: Settings) -> Settings {
        overlay!(
            self, over, config, model, d, d_eps, a, lambda, n, grid_points, theta, q, c, b, alpha, p, tau_eps, tau_par,
            tau_perp, runs, seed, jobs, input, layout, bandwidth, output_dir, pin_d, estimate_d, oracle, method
        )
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn runs(&self) -> usize {
        self.runs.unwrap_or(DEFAULT_RUNS)
    }

    fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    fn layout(&self) -> Result<Layout> {
        self.layout.as_deref().unwrap_or("wide").parse()
    }

    fn method(&self) -> Result<Method> {
        self.method.as_deref().unwrap_or("mise-optimal").parse()
    }

    fn pipeline(&self) -> PipelineConfig {
        let df = DfpcaParams::default();
        let nz = NoiseParams::default();
        let q = self.q.unwrap_or(df.q);
        PipelineConfig {
            dfpca: DfpcaParams {
                q,
                c: self.c.clone().unwrap_or_else(|| vec![1.0; q]),
                b: self.b.unwrap_or(df.b),
                alpha: self.alpha.unwrap_or(df.alpha),
                ..df
            },
            noise: NoiseParams {
                p: self.p.unwrap_or(nz.p),
                tau_eps: self.tau_eps.unwrap_or(nz.tau_eps),
                tau_par: self.tau_par.unwrap_or(nz.tau_par),
                tau_perp: self.tau_perp.unwrap_or(nz.tau_perp),
            },
            pin_d: self.pin_d,
        }
    }

    /// Simulation settings with single-valued `d`, `n` and `lambda`.
    fn dgp(&self, d: usize, n: usize, lambda: f64) -> DgpConfig {
        let base = DgpConfig::default();
        DgpConfig {
            d,
            d_eps: self.d_eps.unwrap_or(base.d_eps),
            a: self.a.unwrap_or(base.a),
            lambda,
            thetas: self.theta.clone(),
            model: self.model.clone(),
            n,
            grid_points: self.grid_points.unwrap_or(base.grid_points),
            seed: 0,
            ..base
        }
    }

    fn single_dgp(&self) -> DgpConfig {
        let base = DgpConfig::default();
        let mut cfg = self.dgp(
            self.d.unwrap_or(base.d),
            self.n.unwrap_or(base.n),
            self.lambda.unwrap_or(base.lambda),
        );
        cfg.seed = self.seed();
        cfg
    }

    /// Record every default that applies, so the manifest is self-contained.
    fn fill_defaults(&mut self, command: &str) {
        let pipeline = self.pipeline();
        let dgp = DgpConfig::default();
        self.q = Some(pipeline.dfpca.q);
        self.c = Some(pipeline.dfpca.c);
        self.b = Some(pipeline.dfpca.b);
        self.alpha = Some(pipeline.dfpca.alpha);
        if command != "reproduce" {
            self.p = Some(pipeline.noise.p);
        }
        self.tau_eps = Some(pipeline.noise.tau_eps);
        self.tau_par = Some(pipeline.noise.tau_par);
        self.tau_perp = Some(pipeline.noise.tau_perp);
        self.seed = Some(self.seed());
        self.d_eps = Some(self.d_eps.unwrap_or(dgp.d_eps));
        self.a = Some(self.a.unwrap_or(dgp.a));
        self.grid_points = Some(self.grid_points.unwrap_or(dgp.grid_points));
        if self.input.is_some() {
            self.layout = Some(self.layout.clone().unwrap_or_else(|| "wide".into()));
        }
        match command {
            "denoise" => self.method = Some(self.method.clone().unwrap_or_else(|| "mise-optimal".into())),
            "reproduce" => self.runs = Some(self.runs()),
            "forecast" if self.input.is_none() => self.runs = Some(self.runs()),
            _ => {}
        }
        if command != "reproduce" && self.input.is_none() {
            self.d = Some(self.d.unwrap_or(dgp.d));
            self.n = Some(self.n.unwrap_or(dgp.n));
            self.lambda = Some(self.lambda.unwrap_or(dgp.lambda));
        }
    }

    fn validate(&self, command: &str) -> Result<()> {
        self.layout()?;
        self.method()?;
        self.pipeline().validate()?;
        if let Some(b) = self.bandwidth {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::InvalidConfig(format!("bandwidth {b} must be positive")));
            }
        }
        if self.runs == Some(0) {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidConfig("jobs must be at least 1".into()));
        }
        if command == "denoise" && self.input.is_none() {
            return Err(Error::InvalidConfig("denoise needs --input".into()));
        }
        if self.input.is_none() && command != "reproduce" {
            self.single_dgp().validate()?;
        }
        Ok(())
    }
}

/// Parse a config file. Manifests are accepted and their recorded settings used.
pub fn load_settings(path: &Path) -> Result<Settings> {
    let value: serde_json::Value = serde_json::from_str(&fs::read_to_string(path)?)?;
    let settings = match value.get("config").and_then(|c| c.get("settings")) {
        Some(s) if value.get("data_files").is_some() => s.clone(),
        _ => value,
    };
    serde_json::from_value(settings).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
}

/// Run the command line and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            eprintln!("{}", e.to_string().lines().next().unwrap_or("usage error"));
            return EXIT_USAGE;
        }
    };
    let (name, experiment, flags) = match cli.command {
        Command::Simulate(s) => ("simulate", None, s),
        Command::Denoise(s) => ("denoise", None, s),
        Command::Dimension(s) => ("dimension", None, s),
        Command::Forecast(s) => ("forecast", None, s),
        Command::Reproduce { experiment, settings } => ("reproduce", Some(experiment), settings),
    };
    let settings = match resolve(flags, name) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = settings.jobs {
        pool = pool.num_threads(j);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_COMPUTE;
        }
    };
    match pool.install(|| execute(name, experiment, &settings)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_COMPUTE
        }
    }
}

fn resolve(flags: Settings, command: &str) -> Result<Settings> {
    let base = match &flags.config {
        Some(path) => load_settings(path)?,
        None => Settings::default(),
    };
    let mut settings = base.overlay(flags);
    settings.validate(command)?;
    settings.fill_defaults(command);
    Ok(settings)
}

fn manifest_config(command: &str, experiment: Option<Experiment>, settings: &Settings) -> serde_json::Value {
    serde_json::json!({
        "command": command,
        "experiment": experiment,
        "version": env!("CARGO_PKG_VERSION"),
        "settings": settings,
    })
}

fn execute(command: &str, experiment: Option<Experiment>, s: &Settings) -> Result<()> {
    let out = s.output_dir();
    let config = manifest_config(command, experiment, s);
    match (command, experiment) {
        ("simulate", _) => simulate(s, &out, config),
        ("denoise", _) => denoise(s, &out, config),
        ("dimension", _) => dimension(s, &out, config),
        ("forecast", _) => forecast(s, &out, config),
        (_, Some(e)) => {
            let result = reproduce(e, s)?;
            print_summary(&result);
            save_results(Output::Experiment(&result), &out, config)?;
            println!("wrote {}", out.display());
            Ok(())
        }
        _ => unreachable!("clap only yields known subcommands"),
    }
}

fn day_labels(n: usize) -> Vec<String> {
    let start = NaiveDate::parse_from_str(SYNTHETIC_START, "%Y-%m-%d").expect("valid constant date");
    start.iter_days().take(n).map(|d| d.format("%Y-%m-%d").to_string()).collect()
}

fn series_panel(series: &CurveSeries, dates: &[String]) -> RawPanel {
    RawPanel {
        dates: dates.to_vec(),
        matrix: series.data().clone(),
        column_labels: (0..series.grid().len()).map(|j| format!("v{j}")).collect(),
    }
}

fn simulate(s: &Settings, out: &Path, config: serde_json::Value) -> Result<()> {
    let cfg = s.single_dgp();
    let data = generate_dataset(&cfg)?;
    let dates = day_labels(cfg.n);
    let panels = [
        ("y.csv", series_panel(&data.y, &dates)),
        ("x.csv", series_panel(&data.x, &dates)),
        ("eps.csv", series_panel(&data.eps, &dates)),
    ];
    let bounds = theoretical_bounds(&cfg)?;
    let summary = serde_json::json!({
        "dgp": cfg,
        "g_eps": cfg.g_eps(),
        "g_x": cfg.g_x(&cfg.var_model()?)?,
        "integrated_variance_y": data.y.integrated_variance(),
        "bounds": bounds,
    });
    let named: Vec<(&str, &RawPanel)> = panels.iter().map(|(n, p)| (*n, p)).collect();
    save_results(Output::Panels { panels: &named, summary: &summary }, out, config)?;
    println!("wrote {} curves of {} points to {}", cfg.n, cfg.grid_points, out.display());
    Ok(())
}

/// Load `--input`, preprocessing when a bandwidth is given.
fn load_input(s: &Settings) -> Result<(CurveSeries, Vec<String>)> {
    let path = s.input.as_ref().ok_or_else(|| Error::InvalidConfig("missing --input".into()))?;
    let panel = load_csv(path, s.layout()?)?;
    let series = match s.bandwidth {
        Some(bw) => preprocess(&panel, bw)?.0,
        None => CurveSeries::new(Grid::unit(panel.matrix.ncols())?, panel.matrix.clone())?,
    };
    Ok((series, panel.dates))
}

/// The observed series: `--input` if given, otherwise one simulated sample.
fn observed(s: &Settings) -> Result<(CurveSeries, Vec<String>)> {
    if s.input.is_some() {
        load_input(s)
    } else {
        let cfg = s.single_dgp();
        Ok((generate_dataset(&cfg)?.y, day_labels(cfg.n)))
    }
}

fn denoise(s: &Settings, out: &Path, config: serde_json::Value) -> Result<()> {
    let (y, dates) = load_input(s)?;
    let fitted = fit(&y, &s.pipeline(), s.seed())?;
    let result = fitted.denoise(&y, s.method()?)?;
    let summary = DenoiseSummary::new(&fitted, &result);
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    save_results(Output::Denoised { series: &result.denoised, dates: Some(&dates), summary: &summary }, out, config)?;
    println!(
        "d = {}, lambda_hat = {:.4}, removed proportion = {:.3}; wrote {}",
        summary.d_hat,
        summary.lambda_hat,
        summary.removed_proportion,
        out.display()
    );
    Ok(())
}

fn dimension(s: &Settings, out: &Path, config: serde_json::Value) -> Result<()> {
    let (y, _) = observed(s)?;
    let est = estimate_dynspace(&y, &s.pipeline().dfpca, s.seed())?;
    let summary = serde_json::json!({
        "d_hat": est.d_hat,
        "eigenvalues": est.eigenvalues.iter().take(20).collect::<Vec<_>>(),
        "tests": est.test_trace,
    });
    save_results(Output::Panels { panels: &[], summary: &summary }, out, config)?;
    println!("d_hat = {}", est.d_hat);
    Ok(())
}

fn forecast(s: &Settings, out: &Path, config: serde_json::Value) -> Result<()> {
    let result = if s.input.is_some() {
        let (y, _) = load_input(s)?;
        let pipeline = s.pipeline();
        let rows = observed_forecast_errors(&y, &pipeline, s.seed())?
            .into_iter()
            .map(|(strategy, value)| Row {
                label: "observed".into(),
                n: y.len(),
                lambda: f64::NAN,
                d: pipeline.pin_d.unwrap_or(0),
                p: pipeline.noise.p,
                run: 0,
                seed: s.seed(),
                method: strategy.name().into(),
                metric: "delta_f".into(),
                value,
                error: None,
            })
            .collect();
        ExperimentResult { rows }
    } else {
        let point = SweepPoint { dgp: s.single_dgp(), pipeline: s.pipeline() };
        run_forecast_experiment(&point, s.runs(), s.seed())
    };
    print_summary(&result);
    save_results(Output::Experiment(&result), out, config)?;
    Ok(())
}

fn values_or<T: Copy>(single: Option<T>, defaults: &[T]) -> Vec<T> {
    match single {
        Some(v) => vec![v],
        None => defaults.to_vec(),
    }
}

/// Tilt angles with every shared component set to `angle`, the rest 0.
fn uniform_tilt(d: usize, d_eps: usize, angle: f64) -> Vec<f64> {
    (1..=d_eps).map(|j| if j <= d.min(d_eps) { angle } else { 0.0 }).collect()
}

/// Default tilt with component 2 turned into the signal space.
fn zero_second_tilt(d: usize, d_eps: usize) -> Vec<f64> {
    let mut t = uniform_tilt(d, d_eps, PI / 4.0);
    if t.len() > 1 {
        t[1] = 0.0;
    }
    t
}

/// The configurations of a named experiment.
pub fn experiment_sweep(e: Experiment, s: &Settings) -> Vec<SweepPoint> {
    let mut pipeline = s.pipeline();
    let estimate_d = s.estimate_d.unwrap_or(false);
    let lambda = s.lambda.unwrap_or(0.2);
    let mut points = Vec::new();
    let make = |mut dgp: DgpConfig, pipeline: &PipelineConfig| {
        if s.theta.is_none() {
            match e {
                Experiment::Fig5 => dgp.thetas = Some(zero_second_tilt(dgp.d, dgp.d_eps)),
                Experiment::Fig6 => dgp.thetas = Some(uniform_tilt(dgp.d, dgp.d_eps, PI / 2.0)),
                _ => {}
            }
        }
        if estimate_d {
            SweepPoint { dgp, pipeline: pipeline.clone() }
        } else {
            SweepPoint::pinned(dgp, pipeline.clone())
        }
    };
    match e {
        Experiment::Fig2 | Experiment::Fig4 | Experiment::Fig5 | Experiment::Fig6 => {
            for d in values_or(s.d, &SWEEP_D) {
                for n in values_or(s.n, &SWEEP_N) {
                    points.push(make(s.dgp(d, n, lambda), &pipeline));
                }
            }
        }
        Experiment::Fig3 => {
            for l in values_or(s.lambda, &SWEEP_LAMBDA) {
                points.push(make(s.dgp(s.d.unwrap_or(4), s.n.unwrap_or(800), l), &pipeline));
            }
        }
        Experiment::AppendixE => {
            let orders = values_or(s.p, &[1, 2, 3]);
            for d in values_or(s.d, &SWEEP_D) {
                for n in values_or(s.n, &SWEEP_N) {
                    for &p in &orders {
                        pipeline.noise.p = p;
                        points.push(make(s.dgp(d, n, lambda), &pipeline));
                    }
                }
            }
        }
        Experiment::Table1 => {
            for l in values_or(s.lambda, &TABLE_LAMBDA) {
                let dgp = s.dgp(s.d.unwrap_or(4), s.n.unwrap_or(800), l);
                points.push(SweepPoint::pinned(dgp, pipeline.clone()));
            }
        }
        Experiment::Shuffle => {
            let dgp = s.dgp(s.d.unwrap_or(4), s.n.unwrap_or(400), lambda);
            points.push(SweepPoint { dgp, pipeline: pipeline.clone() });
        }
    }
    points
}

/// Run a named experiment.
pub fn reproduce(e: Experiment, s: &Settings) -> Result<ExperimentResult> {
    let sweep = experiment_sweep(e, s);
    for point in &sweep {
        point.dgp.validate()?;
    }
    let runs = s.runs();
    let seed = s.seed();
    let oracle = s.oracle.unwrap_or(!matches!(e, Experiment::Fig4 | Experiment::AppendixE));
    let result = match e {
        Experiment::Table1 => {
            let rows = sweep.iter().flat_map(|p| run_forecast_experiment(p, runs, seed).rows).collect();
            ExperimentResult { rows }
        }
        Experiment::Shuffle => run_shuffle_experiment(&sweep[0], s.runs.unwrap_or(5), seed),
        _ => {
            let mut result = run_denoising_experiment(&sweep, DenoisingOptions { oracle, estimated: true }, runs, seed);
            if matches!(e, Experiment::Fig2 | Experiment::Fig3 | Experiment::Fig5 | Experiment::Fig6) {
                result.rows.extend(sweep.iter().flat_map(bound_rows));
            }
            result
        }
    };
    Ok(result)
}

fn print_summary(result: &ExperimentResult) {
    let mut last = String::new();
    for s in result.summaries() {
        if !["mise_over_lambda", "delta_f", "lambda_hat", "max_deviation"].contains(&s.metric.as_str()) {
            continue;
        }
        if s.label != last {
            println!("{} p={}", s.label, s.p);
            last = s.label.clone();
        }
        println!(
            "  {:<22} {:<17} median {:>10.5}  mean {:>10.5} ± {:.2e}  (n={}, failed={})",
            s.method, s.metric, s.median, s.mean, s.std_error, s.count, s.failures
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let file = Settings { d: Some(4), lambda: Some(0.3), ..Default::default() };
        let flags = Settings { lambda: Some(0.1), ..Default::default() };
        let merged = file.overlay(flags);
        assert_eq!(merged.d, Some(4));
        assert_eq!(merged.lambda, Some(0.1));
    }

    #[test]
    fn unknown_config_key_is_rejected() {
        let err = serde_json::from_str::<Settings>(r#"{"lambda": 0.2, "bogus": 1}"#).unwrap_err();
        assert!(err.to_string().contains("bogus"));
        let ok: Settings = serde_json::from_str(r#"{"tau-eps": 0.02, "B": 50, "pin-d": 2}"#).unwrap();
        assert_eq!(ok.b, Some(50));
        assert_eq!(ok.pin_d, Some(2));
    }

    #[test]
    fn tilt_presets() {
        assert_eq!(zero_second_tilt(2, 4), vec![PI / 4.0, 0.0, 0.0, 0.0]);
        assert_eq!(uniform_tilt(4, 8, PI / 2.0)[3], PI / 2.0);
        assert_eq!(uniform_tilt(4, 8, PI / 2.0)[4], 0.0);
    }

    #[test]
    fn sweeps_have_expected_size() {
        let s = Settings::default();
        assert_eq!(experiment_sweep(Experiment::Fig2, &s).len(), 15);
        assert_eq!(experiment_sweep(Experiment::Fig3, &s).len(), 7);
        assert_eq!(experiment_sweep(Experiment::AppendixE, &s).len(), 45);
        assert_eq!(experiment_sweep(Experiment::Table1, &s).len(), 3);
        let pinned = Settings { d: Some(2), n: Some(200), ..Default::default() };
        assert_eq!(experiment_sweep(Experiment::Fig5, &pinned)[0].pipeline.pin_d, Some(2));
    }
}
