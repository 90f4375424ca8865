//! Noise structure: loading autocovariances, Yule-Walker recovery of the lag-0
//! loading covariance, the noise covariance kernel and its positive part, and
//! the split of the noise space into components inside and orthogonal to the
//! dynamical space.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::covariance::{demeaned, lag_product, lagged_autocov, Kernel};
use crate::error::{Error, Result};
use crate::grid::{CurveSeries, Subspace};
use crate::linalg::{lstsq_min_norm, solve_guarded, sym_eigen_desc, symmetrize, CONDITION_LIMIT};

/// Relative singular-value cutoff for the block Yule-Walker system.
const BLOCK_RCOND: f64 = 1e-12;
/// Eigenvalues below this fraction of the spectral radius count as zero, not positive.
const POSITIVE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Lag order of the loading VAR.
    pub p: usize,
    /// Explained-variance threshold for the noise space.
    pub tau_eps: f64,
    /// Threshold for the component of the noise space inside the dynamical space.
    pub tau_par: f64,
    /// Threshold for the component orthogonal to the dynamical space.
    pub tau_perp: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self { p: 1, tau_eps: 0.01, tau_par: 0.01, tau_perp: 0.01 }
    }
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::InvalidConfig("lag order p must be at least 1".into()));
        }
        for (name, v) in [("tau-eps", self.tau_eps), ("tau-par", self.tau_par), ("tau-perp", self.tau_perp)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} = {v} must be a non-negative number")));
            }
        }
        Ok(())
    }
}

/// Scores `chi_t = <Y_t - mean, psi_i>` of a series on a basis (`n x d`).
#[derive(Debug, Clone, PartialEq)]
pub struct LoadingSeries {
    pub values: DMatrix<f64>,
}

pub fn proxy_loadings(y: &CurveSeries, basis: &Subspace) -> Result<LoadingSeries> {
    y.grid().check_same(basis.grid())?;
    let values = demeaned(y) * basis.basis() * y.grid().weight();
    Ok(LoadingSeries { values })
}

/// Lag-`k` loading autocovariance `sum_t chi_t chi_{t+k}^T / (n - k - 1)`.
pub fn loading_autocov(l: &LoadingSeries, k: usize) -> Result<DMatrix<f64>> {
    let v = &l.values;
    let means: Vec<f64> = v.column_iter().map(|c| c.mean()).collect();
    let centered = DMatrix::from_fn(v.nrows(), v.ncols(), |t, i| v[(t, i)] - means[i]);
    lag_product(&centered, k)
}

/// Recover the lag-0 covariance of a VAR(`p`) process from its lag `1..=2p` autocovariances.
///
/// `lags[k - 1]` holds `Sigma_k = E[xi_t xi_{t+k}^T]`.
pub fn reconstruct_sigma0(lags: &[DMatrix<f64>], p: usize) -> Result<DMatrix<f64>> {
    if p == 0 || lags.len() < 2 * p {
        return Err(Error::InvalidConfig(format!("order {p} needs {} lagged covariances, got {}", 2 * p, lags.len())));
    }
    let d = lags[0].nrows();
    if lags.iter().any(|m| m.shape() != (d, d)) {
        return Err(Error::DimensionMismatch("lagged covariances must be d x d".into()));
    }
    let sigma = |k: usize| &lags[k - 1];
    let sigma0 = if p == 1 {
        let x = solve_guarded(sigma(2), sigma(1)).map_err(|condition| Error::SingularLagMatrix { lag: 2, condition })?;
        sigma(1) * x
    } else {
        // Rows m = p+1..2p of the Yule-Walker equations, sum_j Sigma_{m-j} A_j^T = Sigma_m,
        // involve only positive lags. Unknowns are stacked as [A_1^T; ...; A_p^T].
        let mut g = DMatrix::zeros(d * p, d * p);
        let mut rhs = DMatrix::zeros(d * p, d);
        for i in 1..=p {
            for j in 1..=p {
                g.view_mut(((i - 1) * d, (j - 1) * d), (d, d)).copy_from(sigma(p + i - j));
            }
            rhs.view_mut(((i - 1) * d, 0), (d, d)).copy_from(sigma(p + i));
        }
        let x = lstsq_min_norm(&g, &rhs, BLOCK_RCOND);
        let a_t = |l: usize| x.view(((l - 1) * d, 0), (d, d)).into_owned();
        let mut lhs = sigma(p).clone();
        for l in 1..p {
            lhs -= sigma(p - l) * a_t(l);
        }
        // Sigma_0 A_p^T = lhs  <=>  A_p Sigma_0 = lhs^T.
        let s = solve_guarded(&a_t(p).transpose(), &lhs.transpose())
            .map_err(|condition| Error::SingularLagMatrix { lag: p, condition })?;
        s.transpose()
    };
    Ok(symmetrize(&sigma0))
}

/// Lag-0 loading covariance of the signal, estimated from nonzero lags only.
pub fn estimate_sigma0(loadings: &LoadingSeries, p: usize) -> Result<DMatrix<f64>> {
    let lags = (1..=2 * p).map(|k| loading_autocov(loadings, k)).collect::<Result<Vec<_>>>()?;
    reconstruct_sigma0(&lags, p)
}

/// `Sigma_eps = Sigma_Y - sum_ij psi_i (Sigma_0)_ij psi_j`; may be indefinite.
pub fn noise_covariance(y: &CurveSeries, basis: &Subspace, sigma0: &DMatrix<f64>) -> Result<Kernel> {
    let d = basis.dim();
    if sigma0.shape() != (d, d) {
        return Err(Error::DimensionMismatch(format!("sigma0 is {:?}, basis has {d} curves", sigma0.shape())));
    }
    let sy = lagged_autocov(y, 0)?;
    let psi = basis.basis();
    let signal = Kernel::new(*y.grid(), psi * sigma0 * psi.transpose())?;
    Kernel::new(*y.grid(), symmetrize(&sy.sub(&signal)?.into_values()))
}

/// The truncated noise covariance and its eigenpairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivePart {
    pub kernel: Kernel,
    /// Noise eigencurves with their (positive) eigenvalues.
    pub basis: Subspace,
}

impl PositivePart {
    pub fn d_eps(&self) -> usize {
        self.basis.dim()
    }

    /// `Tr[Sigma_eps^+]`, the sum of kept eigenvalues.
    pub fn trace(&self) -> f64 {
        self.basis.eigenvalues().iter().sum()
    }
}

/// Keep the leading positive eigenpairs whose share of the positive-eigenvalue sum is at least `tau`.
pub fn positive_part(sigma_eps: &Kernel, tau: f64) -> Result<PositivePart> {
    let grid = *sigma_eps.grid();
    let w = grid.weight();
    let (values, vectors) = sym_eigen_desc(&symmetrize(&sigma_eps.operator_matrix()));
    let floor = POSITIVE_FLOOR * values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let total: f64 = values.iter().filter(|v| **v > floor).sum();
    if total <= 0.0 {
        return Err(Error::NoPositiveEigenvalues);
    }
    let kept = values.iter().take_while(|v| **v > floor && **v / total >= tau).count();
    let basis = Subspace::new(grid, vectors.columns(0, kept) / w.sqrt(), values[..kept].to_vec())?;
    Ok(PositivePart { kernel: Kernel::from_subspace(&basis), basis })
}

/// Noise-space components inside (`par`) and orthogonal to (`perp`) the dynamical space.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSplit {
    pub par: Subspace,
    pub perp: Subspace,
}

fn keep_leading(values: &[f64], denom: f64, tau: f64) -> usize {
    if denom <= 0.0 {
        return 0;
    }
    values.iter().take_while(|v| **v > 0.0 && **v / denom >= tau).count()
}

/// Decompose the positive noise covariance relative to the dynamical space spanned by `psi`.
pub fn split_subspaces(noise: &PositivePart, psi: &Subspace, tau_par: f64, tau_perp: f64) -> Result<SubspaceSplit> {
    let grid = *psi.grid();
    grid.check_same(noise.kernel.grid())?;
    let w = grid.weight();
    let trace = noise.trace();

    let omega_psi = symmetrize(&noise.kernel.contract(psi, psi)?);
    let (par_values, par_vectors) = sym_eigen_desc(&omega_psi);
    let d_par = keep_leading(&par_values, trace, tau_par);
    let par = Subspace::new(grid, psi.basis() * par_vectors.columns(0, d_par), par_values[..d_par].to_vec())?;

    // (I - P) phi_i sqrt(lambda_i) for every noise eigencurve.
    let phi = noise.basis.basis();
    let scaled = DMatrix::from_fn(phi.nrows(), phi.ncols(), |i, j| phi[(i, j)] * noise.basis.eigenvalues()[j].sqrt());
    let along = psi.basis() * (psi.basis().tr_mul(&scaled) * w);
    let g = scaled - along;
    let (mu, v) = sym_eigen_desc(&symmetrize(&(g.tr_mul(&g) * w)));
    let d_perp = keep_leading(&mu, trace, tau_perp);
    let mut curves = &g * v.columns(0, d_perp);
    for (j, mut col) in curves.column_iter_mut().enumerate() {
        col /= mu[j].sqrt();
    }
    let perp = Subspace::new(grid, curves, mu[..d_perp].to_vec())?;
    Ok(SubspaceSplit { par, perp })
}

/// Everything estimated about the noise given a dynamical-space basis.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub sigma0_eta: DMatrix<f64>,
    /// Untruncated noise covariance estimate.
    pub sigma_eps: Kernel,
    pub positive: PositivePart,
    pub split: SubspaceSplit,
}

impl NoiseModel {
    pub fn d_eps(&self) -> usize {
        self.positive.d_eps()
    }

    pub fn d_par(&self) -> usize {
        self.split.par.dim()
    }

    pub fn d_perp(&self) -> usize {
        self.split.perp.dim()
    }
}

pub fn estimate_noise_model(y: &CurveSeries, psi: &Subspace, params: &NoiseParams) -> Result<NoiseModel> {
    params.validate()?;
    let sigma0_eta = if psi.dim() == 0 {
        DMatrix::zeros(0, 0)
    } else {
        estimate_sigma0(&proxy_loadings(y, psi)?, params.p)?
    };
    let sigma_eps = noise_covariance(y, psi, &sigma0_eta)?;
    let positive = positive_part(&sigma_eps, params.tau_eps)?;
    let split = split_subspaces(&positive, psi, params.tau_par, params.tau_perp)?;
    Ok(NoiseModel { sigma0_eta, sigma_eps, positive, split })
}

/// Condition-number ceiling shared with the Omega regression.
pub const OMEGA_CONDITION_LIMIT: f64 = CONDITION_LIMIT;
