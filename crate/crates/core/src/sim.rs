//! Simulated curve time series: a VAR-driven signal on trigonometric basis
//! curves plus white noise whose space is tilted against the signal space by
//! per-component angles. Population subspaces, covariances and bounds are
//! available in closed form.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::covariance::Kernel;
use crate::denoise::{omega_matrices, OmegaSet};
use crate::error::{Error, Result};
use crate::grid::{CurveSeries, Grid, Subspace};
use crate::linalg::derive_seed;
use crate::model::KnownStructure;
use crate::var::{builtin, builtin_for_dim, simulate_var, VarModel, DEFAULT_BURN_IN};

/// `|cos|` or `|sin|` below this counts as an exact zero of the tilt angle.
const ANGLE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgpConfig {
    /// Signal dimension.
    pub d: usize,
    /// Noise dimension.
    pub d_eps: usize,
    /// Geometric decay of the noise variances.
    pub a: f64,
    /// Noise level in `[0, 1]`.
    pub lambda: f64,
    /// Tilt angles, one per noise component; the default rule applies when `None`.
    pub thetas: Option<Vec<f64>>,
    /// Built-in VAR model name; the fixed model for `d` when `None`.
    pub model: Option<String>,
    pub n: usize,
    pub grid_points: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl Default for DgpConfig {
    fn default() -> Self {
        Self {
            d: 2,
            d_eps: 8,
            a: 1.5,
            lambda: 0.2,
            thetas: None,
            model: None,
            n: 800,
            grid_points: 200,
            burn_in: DEFAULT_BURN_IN,
            seed: 0,
        }
    }
}

impl DgpConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::unit(self.grid_points)
    }

    /// Resolved tilt angles: `pi / 4` for the components shared with the signal, 0 otherwise.
    pub fn thetas(&self) -> Vec<f64> {
        match &self.thetas {
            Some(t) => t.clone(),
            None => (1..=self.d_eps).map(|j| if j <= self.d.min(self.d_eps) { PI / 4.0 } else { 0.0 }).collect(),
        }
    }

    pub fn var_model(&self) -> Result<VarModel> {
        match &self.model {
            Some(name) => builtin(name),
            None => builtin_for_dim(self.d),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidConfig(format!("lambda = {} outside [0, 1]", self.lambda)));
        }
        if self.d == 0 || self.d_eps == 0 {
            return Err(Error::InvalidConfig("d and d_eps must be positive".into()));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidConfig(format!("a = {} must be positive", self.a)));
        }
        if self.thetas().len() != self.d_eps {
            return Err(Error::InvalidConfig(format!("{} angles for d_eps = {}", self.thetas().len(), self.d_eps)));
        }
        if 2 * self.d.max(self.d_eps) >= self.grid_points {
            return Err(Error::InvalidConfig(format!(
                "{} grid points cannot resolve frequency {}",
                self.grid_points,
                self.d.max(self.d_eps)
            )));
        }
        if self.n < 2 {
            return Err(Error::InvalidConfig("series length n must be at least 2".into()));
        }
        let model = self.var_model()?;
        if model.dim() != self.d {
            return Err(Error::InvalidConfig(format!("model has dimension {}, d = {}", model.dim(), self.d)));
        }
        Ok(())
    }

    /// Noise scale `g_eps`, making the integrated noise variance equal to `lambda`.
    pub fn g_eps(&self) -> f64 {
        (self.lambda / geometric_sum(self.a, self.d_eps)).sqrt()
    }

    /// Noise variance of component `j` (1-based): `g_eps^2 / a^(2(j-1))`.
    pub fn noise_variance(&self, j: usize) -> f64 {
        self.g_eps().powi(2) / self.a.powi(2 * (j as i32 - 1))
    }

    /// Signal scale `g_X`, making the integrated signal variance equal to `1 - lambda`.
    pub fn g_x(&self, model: &VarModel) -> Result<f64> {
        let total = model.stationary_cov()?.trace();
        Ok(((1.0 - self.lambda) / total).sqrt())
    }

    pub fn label(&self) -> String {
        let theta = match &self.thetas {
            None => "default".to_string(),
            Some(t) => t.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join("/"),
        };
        format!(
            "d={} lambda={} n={} theta={} model={}",
            self.d,
            self.lambda,
            self.n,
            theta,
            self.model.as_deref().unwrap_or("default")
        )
    }
}

/// `sum_{j=1}^{m} a^{-2(j-1)}`.
pub fn geometric_sum(a: f64, m: usize) -> f64 {
    let r = a.powi(-2);
    if (r - 1.0).abs() < 1e-15 {
        m as f64
    } else {
        (1.0 - r.powi(m as i32)) / (1.0 - r)
    }
}

/// `cos(2 pi j u) + sin(2 pi j u)`.
pub fn signal_curve(grid: &Grid, j: usize) -> DVector<f64> {
    tilted_curve(grid, j, 0.0)
}

/// `(cos t + sin t) cos(2 pi j u) + (cos t - sin t) sin(2 pi j u)`.
pub fn tilted_curve(grid: &Grid, j: usize, theta: f64) -> DVector<f64> {
    let (c, s) = (theta.cos(), theta.sin());
    let f = 2.0 * PI * j as f64;
    DVector::from_iterator(grid.len(), grid.points().into_iter().map(|u| (c + s) * (f * u).cos() + (c - s) * (f * u).sin()))
}

/// `cos(2 pi j u) - sin(2 pi j u)`, orthogonal to every signal curve.
pub fn complement_curve(grid: &Grid, j: usize) -> DVector<f64> {
    tilted_curve(grid, j, PI / 2.0)
}

fn columns(grid: &Grid, curves: Vec<DVector<f64>>) -> DMatrix<f64> {
    if curves.is_empty() {
        return DMatrix::zeros(grid.len(), 0);
    }
    DMatrix::from_columns(&curves)
}

/// Population structure of a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Truth {
    /// Signal basis curves with their stationary variances.
    pub psi: Subspace,
    /// Noise basis curves with their variances.
    pub noise: Subspace,
    pub par: Subspace,
    pub perp: Subspace,
    pub sigma_eps: Kernel,
    pub omegas: OmegaSet,
}

impl Truth {
    pub fn new(cfg: &DgpConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid()?;
        let model = cfg.var_model()?;
        let gx2 = cfg.g_x(&model)?.powi(2);
        let s0 = model.stationary_cov()?;
        let thetas = cfg.thetas();
        let shared = cfg.d.min(cfg.d_eps);

        let psi_curves = (1..=cfg.d).map(|j| signal_curve(&grid, j)).collect();
        let psi = Subspace::new(grid, columns(&grid, psi_curves), (0..cfg.d).map(|i| gx2 * s0[(i, i)]).collect())?;

        let noise_curves = (1..=cfg.d_eps).map(|j| tilted_curve(&grid, j, thetas[j - 1])).collect();
        let noise = Subspace::new(grid, columns(&grid, noise_curves), (1..=cfg.d_eps).map(|j| cfg.noise_variance(j)).collect())?;

        let mut par_curves = Vec::new();
        let mut par_values = Vec::new();
        let mut perp_curves = Vec::new();
        let mut perp_values = Vec::new();
        for j in 1..=cfg.d_eps {
            let (c, s) = (thetas[j - 1].cos(), thetas[j - 1].sin());
            let v = cfg.noise_variance(j);
            if j <= shared {
                if c.abs() > ANGLE_EPS {
                    par_curves.push(signal_curve(&grid, j));
                    par_values.push(v * c * c);
                }
                if s.abs() > ANGLE_EPS {
                    perp_curves.push(complement_curve(&grid, j));
                    perp_values.push(v * s * s);
                }
            } else {
                perp_curves.push(tilted_curve(&grid, j, thetas[j - 1]));
                perp_values.push(v);
            }
        }
        let par = Subspace::new(grid, columns(&grid, par_curves), par_values)?;
        let perp = Subspace::new(grid, columns(&grid, perp_curves), perp_values)?;
        let sigma_eps = Kernel::from_subspace(&noise);
        let omegas = if cfg.lambda == 0.0 {
            OmegaSet {
                omega_par: DMatrix::zeros(par.dim(), par.dim()),
                omega_perp: DMatrix::zeros(perp.dim(), perp.dim()),
                omega_par_perp: DMatrix::zeros(par.dim(), perp.dim()),
                alpha_hat: DMatrix::zeros(par.dim(), perp.dim()),
                condition: 1.0,
            }
        } else {
            omega_matrices(&sigma_eps, &par, &perp)?
        };
        Ok(Self { psi, noise, par, perp, sigma_eps, omegas })
    }

    /// Known structure with the noise covariance left to be estimated.
    pub fn oracle(&self) -> KnownStructure {
        KnownStructure { psi: self.psi.clone(), par: self.par.clone(), perp: self.perp.clone(), sigma_eps: None }
    }

    /// Known structure including the population noise covariance.
    pub fn population(&self) -> KnownStructure {
        KnownStructure { sigma_eps: Some(self.sigma_eps.clone()), ..self.oracle() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub y: CurveSeries,
    pub x: CurveSeries,
    pub eps: CurveSeries,
    /// Signal loadings `xi_t` (before scaling by `g_X`).
    pub xi: DMatrix<f64>,
    pub truth: Truth,
}

/// Draw one sample of signal, noise and observed curves.
pub fn generate_dataset(cfg: &DgpConfig) -> Result<Dataset> {
    let truth = Truth::new(cfg)?;
    let model = cfg.var_model()?;
    let grid = cfg.grid()?;
    let xi = simulate_var(&model, cfg.n, cfg.burn_in, derive_seed(cfg.seed, &[0]))?;
    let x = &xi * truth.psi.basis().transpose() * cfg.g_x(&model)?;

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[1]));
    let scales: Vec<f64> = (1..=cfg.d_eps).map(|j| cfg.noise_variance(j).sqrt()).collect();
    let z = DMatrix::from_fn(cfg.n, cfg.d_eps, |_, j| {
        let z: f64 = StandardNormal.sample(&mut rng);
        scales[j] * z
    });
    let eps = z * truth.noise.basis().transpose();
    let y = &x + &eps;
    Ok(Dataset {
        y: CurveSeries::new(grid, y)?,
        x: CurveSeries::new(grid, x)?,
        eps: CurveSeries::new(grid, eps)?,
        xi,
        truth,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    /// Minimal MISE of MISE-optimal denoising: variance of noise components lying entirely in the signal space.
    pub opt_min: f64,
    /// Minimal MISE of orthogonal denoising: all noise variance inside the signal space.
    pub ortho_min: f64,
    /// Lower bound of the normalized one-step forecast error: `Tr[Omega] / Tr[Sigma_0]`.
    pub forecast_bound: f64,
}

/// Closed-form population bounds of a configuration.
pub fn theoretical_bounds(cfg: &DgpConfig) -> Result<Bounds> {
    cfg.validate()?;
    let thetas = cfg.thetas();
    let shared = cfg.d.min(cfg.d_eps);
    let mut opt_min = 0.0;
    let mut ortho_min = 0.0;
    for j in 1..=shared {
        let (c, s) = (thetas[j - 1].cos(), thetas[j - 1].sin());
        let v = cfg.noise_variance(j);
        ortho_min += v * c * c;
        if s.abs() <= ANGLE_EPS {
            opt_min += v;
        }
    }
    let model = cfg.var_model()?;
    let forecast_bound = model.innovation_cov().trace() / model.stationary_cov()?.trace();
    Ok(Bounds { opt_min, ortho_min, forecast_bound })
}
