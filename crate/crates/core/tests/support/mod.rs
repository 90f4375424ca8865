//! Shared helpers for the integration tests: independent oracles, random inputs,
//! and the invariant checks run both by proptest and by the acceptance report.
#![allow(dead_code)]

use std::f64::consts::PI;

use chrono::NaiveDate;
use fdenoise::covariance::{lagged_autocov, operator_eigenvalues};
use fdenoise::denoise::{mise_minimum, omega_matrices};
use fdenoise::dynspace::dynspace_with_dimension;
use fdenoise::model::removed_proportion;
use fdenoise::noise::positive_part;
use fdenoise::panel::RawPanel;
use fdenoise::{
    denoise_orthogonal, estimate_noise_model, fit, preprocess, theoretical_bounds, CurveSeries, DfpcaParams,
    DgpConfig, Grid, Kernel, NoiseParams, PipelineConfig,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// MISE-optimal reconstruction computed directly from grid covariances:
/// `P y - Cov(P eps, Q eps) Cov(Q eps)^+ Q y`, with `P` the projector on the span of
/// `psi` and `Q = I - P`.
pub fn mise_optimal_oracle(y: &DMatrix<f64>, sigma_eps: &DMatrix<f64>, psi: &DMatrix<f64>, w: f64) -> DMatrix<f64> {
    let n = sigma_eps.nrows();
    let p = psi * psi.transpose() * w;
    let q = DMatrix::identity(n, n) - &p;
    let cross = &p * sigma_eps * q.transpose();
    let perp = &q * sigma_eps * q.transpose();
    let tol = 1e-10 * perp.amax();
    let b = cross * perp.pseudo_inverse(tol).expect("pseudo-inverse");
    let mut out = DMatrix::zeros(y.nrows(), y.ncols());
    for t in 0..y.nrows() {
        let row = y.row(t).transpose();
        let x = &p * &row - &b * (&q * &row);
        out.set_row(t, &x.transpose());
    }
    out
}

/// Noise scale from the series sum, term by term.
pub fn g_eps_oracle(lambda: f64, a: f64, d_eps: usize) -> f64 {
    let total: f64 = (0..d_eps).map(|j| a.powi(-2 * j as i32)).sum();
    (lambda / total).sqrt()
}

/// A random series on a small grid: smooth random harmonics plus white noise.
pub fn random_series(n: usize, points: usize, seed: u64) -> CurveSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = Grid::unit(points).expect("grid");
    let harmonics = 3;
    let mut xi = vec![0.0; harmonics];
    let rho: f64 = rng.random_range(0.2..0.9);
    let data = DMatrix::from_fn(n, points, |_, _| 0.0);
    let mut data = data;
    for t in 0..n {
        for v in xi.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v = rho * *v + z;
        }
        for i in 0..points {
            let u = grid.point(i);
            let mut value = 0.0;
            for (j, v) in xi.iter().enumerate() {
                value += v * (2.0 * PI * (j + 1) as f64 * u).cos() / (j + 1) as f64;
            }
            let z: f64 = rng.sample(StandardNormal);
            data[(t, i)] = value + 0.3 * z;
        }
    }
    CurveSeries::new(grid, data).expect("finite data")
}

#[derive(Debug, Clone)]
pub struct SeriesInput {
    pub n: usize,
    pub points: usize,
    pub seed: u64,
    pub d: usize,
}

impl SeriesInput {
    pub fn series(&self) -> CurveSeries {
        random_series(self.n, self.points, self.seed)
    }
}

pub fn series_input() -> impl Strategy<Value = SeriesInput> {
    (30usize..80, 8usize..20, any::<u64>(), 1usize..4).prop_map(|(n, points, seed, d)| SeriesInput { n, points, seed, d })
}

#[derive(Debug, Clone)]
pub struct DgpInput {
    pub d: usize,
    pub lambda: f64,
    pub thetas: Vec<f64>,
    pub a: f64,
}

pub fn dgp_input() -> impl Strategy<Value = DgpInput> {
    (prop::sample::select(vec![2usize, 4, 6]), 0.0f64..=1.0, prop::collection::vec(0.0f64..=PI / 2.0, 8), 1.05f64..3.0)
        .prop_map(|(d, lambda, thetas, a)| DgpInput { d, lambda, thetas, a })
}

fn check(cond: bool, msg: String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg))
    }
}

fn err(e: fdenoise::Error) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

/// Estimated dynamical-space and noise bases are orthonormal.
pub fn prop_orthonormal(input: &SeriesInput) -> Result<(), TestCaseError> {
    let y = input.series();
    let est = dynspace_with_dimension(&y, input.d, &DfpcaParams::default()).map_err(err)?;
    check(est.basis.gram_deviation() < 1e-8, format!("dynamical basis deviation {:e}", est.basis.gram_deviation()))?;
    let model = estimate_noise_model(&y, &est.basis, &NoiseParams::default());
    if let Ok(model) = model {
        for (name, s) in [("noise", &model.positive.basis), ("par", &model.split.par), ("perp", &model.split.perp)] {
            check(s.gram_deviation() < 1e-8, format!("{name} basis deviation {:e}", s.gram_deviation()))?;
        }
    }
    Ok(())
}

fn min_relative_eigen(k: &Kernel) -> f64 {
    let ev = operator_eigenvalues(k).expect("symmetric kernel");
    let top = ev.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if top == 0.0 {
        0.0
    } else {
        ev.iter().cloned().fold(f64::INFINITY, f64::min) / top
    }
}

/// Sample covariance and the positive part of the noise covariance are PSD.
pub fn prop_psd(input: &SeriesInput) -> Result<(), TestCaseError> {
    let y = input.series();
    let cov = lagged_autocov(&y, 0).map_err(err)?;
    check(min_relative_eigen(&cov) > -1e-10, "sample covariance not PSD".into())?;
    // An indefinite kernel: covariance minus a multiple of its leading rank-one part.
    let values = cov.values() - DMatrix::identity(input.points, input.points) * (cov.trace() / 2.0);
    let k = Kernel::new(*y.grid(), values).map_err(err)?;
    if let Ok(pp) = positive_part(&k, 0.0) {
        check(min_relative_eigen(&pp.kernel) > -1e-10, "positive part has a negative eigenvalue".into())?;
    }
    Ok(())
}

/// Population floors satisfy `0 <= opt_min <= ortho_min <= lambda` and the forecast bound lies in (0, 1].
pub fn prop_bounds_range(input: &DgpInput) -> Result<(), TestCaseError> {
    let cfg = DgpConfig { d: input.d, lambda: input.lambda, a: input.a, thetas: Some(input.thetas.clone()), ..Default::default() };
    let b = theoretical_bounds(&cfg).map_err(err)?;
    let tol = 1e-12;
    check(b.opt_min >= -tol, format!("opt_min {}", b.opt_min))?;
    check(b.opt_min <= b.ortho_min + tol, format!("opt {} > ortho {}", b.opt_min, b.ortho_min))?;
    check(b.ortho_min <= input.lambda + tol, format!("ortho {} > lambda", b.ortho_min))?;
    check(b.forecast_bound > 0.0 && b.forecast_bound <= 1.0, format!("forecast bound {}", b.forecast_bound))?;
    let share = removed_proportion(input.lambda, b.opt_min);
    check((0.0..=1.0).contains(&share), format!("removed share {share}"))
}

/// On estimated quantities: MISE-optimal floor never exceeds the orthogonal one and the
/// split dimensions stay within their ambient spaces.
pub fn prop_dominance(input: &SeriesInput) -> Result<(), TestCaseError> {
    let y = input.series();
    let psi = dynspace_with_dimension(&y, input.d, &DfpcaParams::default()).map_err(err)?.basis;
    let Ok(model) = estimate_noise_model(&y, &psi, &NoiseParams::default()) else {
        return Ok(());
    };
    check(model.d_par() <= psi.dim().min(model.d_eps()), "d_par too large".into())?;
    check(model.d_perp() <= model.d_eps(), "d_perp too large".into())?;
    let Ok(omegas) = omega_matrices(&model.positive.kernel, &model.split.par, &model.split.perp) else {
        return Ok(());
    };
    let (opt, ortho) = mise_minimum(&omegas).map_err(err)?;
    check(opt <= ortho * (1.0 + 1e-10) + 1e-15, format!("opt {opt} > ortho {ortho}"))
}

/// Fitting twice with one seed gives identical output.
pub fn prop_determinism(input: &SeriesInput) -> Result<(), TestCaseError> {
    let y = input.series();
    let cfg = PipelineConfig {
        dfpca: DfpcaParams { b: 10, d_start: Some(3), ..Default::default() },
        ..Default::default()
    };
    let a = fit(&y, &cfg, input.seed);
    let b = fit(&y, &cfg, input.seed);
    match (a, b) {
        (Ok(a), Ok(b)) => check(a == b, "fits differ".into()),
        (Err(a), Err(b)) => check(a.to_string() == b.to_string(), "errors differ".into()),
        _ => Err(TestCaseError::fail("one fit failed, the other succeeded")),
    }
}

/// Orthogonal denoising is a projection, and preprocessing a panel at its fixed point
/// (zero daily means) changes nothing on a second pass.
pub fn prop_idempotence(input: &SeriesInput) -> Result<(), TestCaseError> {
    let y = input.series();
    let psi = dynspace_with_dimension(&y, input.d, &DfpcaParams::default()).map_err(err)?.basis;
    let once = denoise_orthogonal(&y, &psi).map_err(err)?;
    let twice = denoise_orthogonal(&once, &psi).map_err(err)?;
    check((once.data() - twice.data()).amax() < 1e-10 * (1.0 + once.data().amax()), "projection not idempotent".into())?;

    let mut m = y.data().clone();
    for mut row in m.row_iter_mut() {
        let mean = row.mean();
        row.add_scalar_mut(-mean);
    }
    let start = NaiveDate::from_ymd_opt(2001, 1, 1).unwrap();
    let dates = start.iter_days().take(m.nrows()).map(|d| d.to_string()).collect();
    let panel = RawPanel::new(dates, m).map_err(err)?;
    let (first, _) = preprocess(&panel, 15.0).map_err(err)?;
    let again = RawPanel::new(panel.dates.clone(), first.data().clone()).map_err(err)?;
    let (second, _) = preprocess(&again, 15.0).map_err(err)?;
    check((first.data() - second.data()).amax() < 1e-12, "preprocess not idempotent".into())
}
