//! Orthogonal and MISE-optimal denoising, the Omega regression that connects
//! them, the attainable MISE minima, and noise-level estimates.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::covariance::Kernel;
use crate::error::{Error, Result};
use crate::grid::{CurveSeries, Subspace};
use crate::linalg::{condition_number, solve_guarded, symmetrize};

/// Condition number of `Omega_perp` above which a warning is attached to results.
pub const WARN_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Orthogonal,
    MiseOptimal,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Orthogonal => "orthogonal",
            Method::MiseOptimal => "mise-optimal",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orthogonal" => Ok(Method::Orthogonal),
            "mise-optimal" => Ok(Method::MiseOptimal),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

/// Noise covariances within and across the parallel and perpendicular noise bases,
/// and the regression coefficients of parallel on perpendicular noise.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaSet {
    pub omega_par: DMatrix<f64>,
    pub omega_perp: DMatrix<f64>,
    pub omega_par_perp: DMatrix<f64>,
    /// `-Omega_par_perp Omega_perp^{-1}`; `d_par x d_perp`.
    pub alpha_hat: DMatrix<f64>,
    /// Condition number of `Omega_perp` (1 when empty).
    pub condition: f64,
}

impl OmegaSet {
    pub fn d_par(&self) -> usize {
        self.omega_par.nrows()
    }

    pub fn d_perp(&self) -> usize {
        self.omega_perp.nrows()
    }

    pub fn warnings(&self) -> Vec<String> {
        if self.condition > WARN_CONDITION {
            vec![format!(
                "perpendicular noise covariance is ill-conditioned (condition number {:.3e}); denoising may be poor",
                self.condition
            )]
        } else {
            Vec::new()
        }
    }
}

/// Contract the noise covariance against the parallel and perpendicular bases and solve for the regression.
pub fn omega_matrices(sigma_eps: &Kernel, par: &Subspace, perp: &Subspace) -> Result<OmegaSet> {
    let omega_par = symmetrize(&sigma_eps.contract(par, par)?);
    let omega_perp = symmetrize(&sigma_eps.contract(perp, perp)?);
    let omega_par_perp = sigma_eps.contract(par, perp)?;
    let (alpha_hat, condition) = if perp.dim() == 0 || par.dim() == 0 {
        (DMatrix::zeros(par.dim(), 0), 1.0)
    } else {
        let condition = condition_number(&omega_perp);
        let x = solve_guarded(&omega_perp, &omega_par_perp.transpose()).map_err(Error::SingularOmegaPerp)?;
        (-x.transpose(), condition)
    };
    Ok(OmegaSet { omega_par, omega_perp, omega_par_perp, alpha_hat, condition })
}

/// Row-wise orthogonal projection onto the dynamical space (no mean removal).
pub fn denoise_orthogonal(y: &CurveSeries, psi: &Subspace) -> Result<CurveSeries> {
    psi.project_series(y)
}

/// Orthogonal projection plus the regression of parallel noise on the observed perpendicular noise.
///
/// Falls back to the orthogonal projection when either noise component is empty.
pub fn denoise_mise_optimal(
    y: &CurveSeries,
    psi: &Subspace,
    omegas: &OmegaSet,
    par: &Subspace,
    perp: &Subspace,
) -> Result<CurveSeries> {
    let projected = denoise_orthogonal(y, psi)?;
    if par.dim() == 0 || perp.dim() == 0 {
        return Ok(projected);
    }
    if omegas.alpha_hat.shape() != (par.dim(), perp.dim()) {
        return Err(Error::DimensionMismatch("regression coefficients do not match the noise bases".into()));
    }
    let residual = y.data() - projected.data();
    let perp_scores = perp.coefficients(&CurveSeries::new(*y.grid(), residual)?)?;
    let correction = perp_scores * omegas.alpha_hat.transpose() * par.basis().transpose();
    CurveSeries::new(*y.grid(), projected.into_data() + correction)
}

/// Minimal MISE of MISE-optimal and orthogonal denoising, clamped at zero.
pub fn mise_minimum(omegas: &OmegaSet) -> Result<(f64, f64)> {
    let ortho = omegas.omega_par.trace();
    let explained = if omegas.d_perp() == 0 || omegas.d_par() == 0 {
        0.0
    } else {
        let x = solve_guarded(&omegas.omega_perp, &omegas.omega_par_perp.transpose()).map_err(Error::SingularOmegaPerp)?;
        (&omegas.omega_par_perp * x).trace()
    };
    Ok(((ortho - explained).max(0.0), ortho.max(0.0)))
}

/// Noise level from the residual decomposition and from the trace of the noise covariance.
///
/// `opt_min` and `noise_trace` are integrals over the interval; like the variance
/// they are divided by its width. Returns `(lambda_resid, lambda_trace)`.
pub fn noise_level(y: &CurveSeries, x_opt: &CurveSeries, opt_min: f64, noise_trace: f64) -> Result<(f64, f64)> {
    let var = y.integrated_variance();
    if var <= 0.0 {
        return Err(Error::ZeroVarianceInput);
    }
    let width = y.grid().width();
    let removed = y.sub(x_opt)?.mean_integrated_square();
    Ok(((opt_min / width + removed) / var, noise_trace / width / var))
}

/// Mean over time of the integrated squared difference, divided by the interval width.
pub fn mise(truth: &CurveSeries, estimate: &CurveSeries) -> Result<f64> {
    Ok(truth.sub(estimate)?.mean_integrated_square())
}
