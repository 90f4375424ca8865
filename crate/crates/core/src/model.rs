//! End-to-end estimation: dynamical space, noise model and Omega regression
//! fitted from one observed series, plus the oracle variant that takes known
//! subspaces instead.

use serde::{Deserialize, Serialize};

use crate::covariance::Kernel;
use crate::denoise::{denoise_mise_optimal, denoise_orthogonal, mise_minimum, noise_level, omega_matrices, Method, OmegaSet};
use crate::dynspace::{dynspace_with_dimension, estimate_dynspace, DfpcaParams, DynSpaceEstimate};
use crate::error::Result;
use crate::grid::{CurveSeries, Subspace};
use crate::noise::{estimate_noise_model, estimate_sigma0, noise_covariance, proxy_loadings, NoiseModel, NoiseParams};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub dfpca: DfpcaParams,
    pub noise: NoiseParams,
    /// Use this dimension instead of running the bootstrap cascade.
    pub pin_d: Option<usize>,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.dfpca.validate()?;
        self.noise.validate()
    }
}

/// Subspaces and (optionally) the noise covariance supplied from outside, e.g. the
/// population quantities of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownStructure {
    pub psi: Subspace,
    pub par: Subspace,
    pub perp: Subspace,
    /// When absent the noise covariance is estimated from the data with `psi` as dynamical basis.
    pub sigma_eps: Option<Kernel>,
}

/// Everything needed to denoise a series.
#[derive(Debug, Clone, PartialEq)]
pub struct Fitted {
    pub psi: Subspace,
    pub par: Subspace,
    pub perp: Subspace,
    pub omegas: OmegaSet,
    /// `Tr[Sigma_eps^+]` (or of the supplied kernel).
    pub noise_trace: f64,
    pub dynspace: Option<DynSpaceEstimate>,
    pub noise: Option<NoiseModel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseResult {
    pub denoised: CurveSeries,
    pub method: Method,
    /// Estimated minimal MISE of the chosen method.
    pub mise_min_estimate: f64,
    /// Residual-based noise level.
    pub lambda_hat: f64,
    /// Trace-based noise level.
    pub lambda_trace: f64,
    /// Mean integrated squared difference between input and output.
    pub removed_variance: f64,
    /// Estimated noise variance left in the output (the MISE-optimal minimum).
    pub remaining_variance: f64,
    pub warnings: Vec<String>,
}

impl DenoiseResult {
    /// Share of the estimated total noise variance that was removed.
    pub fn removed_proportion(&self) -> f64 {
        removed_proportion(self.removed_variance, self.remaining_variance)
    }
}

pub fn removed_proportion(removed: f64, remaining: f64) -> f64 {
    let total = removed + remaining;
    if total > 0.0 {
        removed / total
    } else {
        0.0
    }
}

/// Estimate the full model from `y`.
pub fn fit(y: &CurveSeries, cfg: &PipelineConfig, seed: u64) -> Result<Fitted> {
    cfg.validate()?;
    let dynspace = match cfg.pin_d {
        Some(d) => dynspace_with_dimension(y, d, &cfg.dfpca)?,
        None => estimate_dynspace(y, &cfg.dfpca, seed)?,
    };
    let psi = dynspace.basis.clone();
    let noise = estimate_noise_model(y, &psi, &cfg.noise)?;
    let omegas = omega_matrices(&noise.positive.kernel, &noise.split.par, &noise.split.perp)?;
    Ok(Fitted {
        par: noise.split.par.clone(),
        perp: noise.split.perp.clone(),
        noise_trace: noise.positive.trace(),
        psi,
        omegas,
        dynspace: Some(dynspace),
        noise: Some(noise),
    })
}

/// Fit with known subspaces; only the noise covariance (if not supplied) is estimated.
pub fn fit_known(y: &CurveSeries, known: &KnownStructure, noise: &NoiseParams) -> Result<Fitted> {
    noise.validate()?;
    let sigma_eps = match &known.sigma_eps {
        Some(k) => k.clone(),
        None => {
            let sigma0 = estimate_sigma0(&proxy_loadings(y, &known.psi)?, noise.p)?;
            noise_covariance(y, &known.psi, &sigma0)?
        }
    };
    let omegas = omega_matrices(&sigma_eps, &known.par, &known.perp)?;
    Ok(Fitted {
        psi: known.psi.clone(),
        par: known.par.clone(),
        perp: known.perp.clone(),
        omegas,
        noise_trace: sigma_eps.trace(),
        dynspace: None,
        noise: None,
    })
}

impl Fitted {
    pub fn d(&self) -> usize {
        self.psi.dim()
    }

    pub fn denoise_series(&self, y: &CurveSeries, method: Method) -> Result<CurveSeries> {
        match method {
            Method::Orthogonal => denoise_orthogonal(y, &self.psi),
            Method::MiseOptimal => denoise_mise_optimal(y, &self.psi, &self.omegas, &self.par, &self.perp),
        }
    }

    /// Denoise `y` and report the noise-level diagnostics.
    pub fn denoise(&self, y: &CurveSeries, method: Method) -> Result<DenoiseResult> {
        let denoised = self.denoise_series(y, method)?;
        let (opt_min, ortho_min) = mise_minimum(&self.omegas)?;
        let x_opt = match method {
            Method::MiseOptimal => denoised.clone(),
            Method::Orthogonal => self.denoise_series(y, Method::MiseOptimal)?,
        };
        let (lambda_hat, lambda_trace) = noise_level(y, &x_opt, opt_min, self.noise_trace)?;
        let width = y.grid().width();
        let removed_variance = y.sub(&denoised)?.mean_integrated_square();
        let mise_min_estimate = match method {
            Method::MiseOptimal => opt_min,
            Method::Orthogonal => ortho_min,
        } / width;
        Ok(DenoiseResult {
            denoised,
            method,
            mise_min_estimate,
            lambda_hat,
            lambda_trace,
            removed_variance,
            remaining_variance: mise_min_estimate,
            warnings: self.omegas.warnings(),
        })
    }
}
