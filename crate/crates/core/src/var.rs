//! Vector autoregressive models: representation, stationarity, simulation,
//! random stable models, least-squares fitting and one-step forecasts.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, psd_sqrt, symmetrize};

/// Default number of discarded initial simulation steps.
pub const DEFAULT_BURN_IN: usize = 500;
/// Draw limit for [`random_stable_var`].
pub const MAX_DRAWS: usize = 1000;
/// Seed of the near-unit-root stand-in model `alt-d4`.
pub const ALT_D4_SEED: u64 = 20_240_905;
/// Spectral radius of `alt-d4`.
pub const ALT_D4_RHO: f64 = 0.95;

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 4] = ["paper-d2", "paper-d4", "paper-d6", "alt-d4"];

#[derive(Debug, Clone, PartialEq)]
pub struct VarModel {
    coeffs: Vec<DMatrix<f64>>,
    innovation_cov: DMatrix<f64>,
}

impl VarModel {
    pub fn new(coeffs: Vec<DMatrix<f64>>, innovation_cov: DMatrix<f64>) -> Result<Self> {
        let d = innovation_cov.nrows();
        if coeffs.is_empty() {
            return Err(Error::InvalidConfig("VAR order must be at least 1".into()));
        }
        if innovation_cov.ncols() != d || coeffs.iter().any(|a| a.shape() != (d, d)) {
            return Err(Error::DimensionMismatch("VAR matrices must all be d x d".into()));
        }
        let asym = (&innovation_cov - innovation_cov.transpose()).amax();
        if asym > 1e-12 * innovation_cov.amax().max(1.0) || min_eigenvalue(&innovation_cov) < -1e-12 {
            return Err(Error::InvalidConfig("innovation covariance must be symmetric PSD".into()));
        }
        Ok(Self { coeffs, innovation_cov })
    }

    pub fn var1(a: DMatrix<f64>, omega: DMatrix<f64>) -> Result<Self> {
        Self::new(vec![a], omega)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn dim(&self) -> usize {
        self.innovation_cov.nrows()
    }

    pub fn coeffs(&self) -> &[DMatrix<f64>] {
        &self.coeffs
    }

    pub fn innovation_cov(&self) -> &DMatrix<f64> {
        &self.innovation_cov
    }

    /// `dp x dp` companion matrix of the stacked state `(xi_t, ..., xi_{t-p+1})`.
    pub fn companion(&self) -> DMatrix<f64> {
        let (d, p) = (self.dim(), self.order());
        let mut f = DMatrix::zeros(d * p, d * p);
        for (l, a) in self.coeffs.iter().enumerate() {
            f.view_mut((0, l * d), (d, d)).copy_from(a);
        }
        for i in d..d * p {
            f[(i, i - d)] = 1.0;
        }
        f
    }

    pub fn spectral_radius(&self) -> f64 {
        spectral_radius(&self.companion())
    }

    pub fn is_stationary(&self) -> bool {
        self.spectral_radius() < 1.0
    }

    fn companion_cov(&self) -> Result<DMatrix<f64>> {
        let rho = self.spectral_radius();
        if rho >= 1.0 {
            return Err(Error::NonStationaryModel(rho));
        }
        let (d, p) = (self.dim(), self.order());
        let f = self.companion();
        let mut q = DMatrix::zeros(d * p, d * p);
        q.view_mut((0, 0), (d, d)).copy_from(&self.innovation_cov);
        Ok(lyapunov(&f, &q))
    }

    /// Stationary covariance `Sigma_0 = E[xi_t xi_t^T]`.
    pub fn stationary_cov(&self) -> Result<DMatrix<f64>> {
        let d = self.dim();
        Ok(self.companion_cov()?.view((0, 0), (d, d)).into_owned())
    }

    /// Autocovariances `Sigma_k = E[xi_t xi_{t+k}^T]` for `k = 0..=max_lag`.
    pub fn autocovariances(&self, max_lag: usize) -> Result<Vec<DMatrix<f64>>> {
        let d = self.dim();
        let ft = self.companion().transpose();
        let mut state = self.companion_cov()?;
        let mut out = Vec::with_capacity(max_lag + 1);
        for _ in 0..=max_lag {
            out.push(state.view((0, 0), (d, d)).into_owned());
            state = &state * &ft;
        }
        Ok(out)
    }
}

/// Solve `S = F S F^T + Q` through the Kronecker-vectorized linear system.
pub fn lyapunov(f: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    let m = f.nrows();
    let sys = DMatrix::<f64>::identity(m * m, m * m) - f.kronecker(f);
    let rhs = DVector::from_column_slice(q.as_slice());
    let vec = sys.lu().solve(&rhs).expect("stationary model gives a regular Lyapunov system");
    symmetrize(&DMatrix::from_column_slice(m, m, vec.as_slice()))
}

pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Simulate `n` observations (rows) after discarding `burn_in` steps.
///
/// The initial state is drawn from the stationary distribution.
pub fn simulate_var(model: &VarModel, n: usize, burn_in: usize, seed: u64) -> Result<DMatrix<f64>> {
    let (d, p) = (model.dim(), model.order());
    let state_cov = model.companion_cov()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = |k: usize| DVector::from_fn(k, |_, _| StandardNormal.sample(&mut rng));

    let mut state = psd_sqrt(&state_cov) * normal(d * p);
    let chol = psd_sqrt(model.innovation_cov());
    let mut out = DMatrix::zeros(n, d);
    for step in 0..burn_in + n {
        let mut next = &chol * normal(d);
        for (l, a) in model.coeffs().iter().enumerate() {
            next += a * state.rows(l * d, d);
        }
        if p > 1 {
            let keep = state.rows(0, d * (p - 1)).into_owned();
            state.rows_mut(d, d * (p - 1)).copy_from(&keep);
        }
        state.rows_mut(0, d).copy_from(&next);
        if step >= burn_in {
            out.row_mut(step - burn_in).copy_from(&next.transpose());
        }
    }
    Ok(out)
}

/// Draw a VAR(1) model with spectral radius `rho` and stationary covariance `diag(lambdas)`.
///
/// Coefficient matrices are redrawn until the implied innovation covariance is PSD.
pub fn random_stable_var(lambdas: &[f64], rho: f64, seed: u64) -> Result<VarModel> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidConfig(format!("rho = {rho} outside (0, 1)")));
    }
    if lambdas.is_empty() || lambdas.iter().any(|l| l.is_nan() || *l <= 0.0) {
        return Err(Error::InvalidConfig("lambdas must be positive".into()));
    }
    let d = lambdas.len();
    let sigma0 = DMatrix::from_diagonal(&DVector::from_column_slice(lambdas));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DRAWS {
        let raw = DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(&mut rng));
        let r = spectral_radius(&raw);
        if r == 0.0 {
            continue;
        }
        let a = raw * (rho / r);
        let omega = symmetrize(&(&sigma0 - &a * &sigma0 * a.transpose()));
        if min_eigenvalue(&omega) >= 0.0 {
            return VarModel::var1(a, omega);
        }
    }
    Err(Error::RetryLimitExceeded(MAX_DRAWS))
}

/// Multivariate least-squares fit without intercept.
pub fn fit_var(series: &DMatrix<f64>, p: usize) -> Result<VarModel> {
    let (n, d) = series.shape();
    if p == 0 {
        return Err(Error::InvalidConfig("VAR order must be at least 1".into()));
    }
    if n <= d * p + 2 {
        return Err(Error::InsufficientHistory { needed: d * p + 3, got: n });
    }
    let rows = n - p;
    let z = DMatrix::from_fn(rows, d * p, |r, c| series[(r + p - 1 - c / d, c % d)]);
    let y = series.rows(p, rows).into_owned();
    let svd = z.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smax == 0.0 || smin <= 1e-12 * smax {
        return Err(Error::RankDeficientRegressors);
    }
    let b = svd.solve(&y, 0.0).map_err(|_| Error::RankDeficientRegressors)?;
    let resid = &y - &z * &b;
    let omega = symmetrize(&(resid.tr_mul(&resid) / (n - p - d * p) as f64));
    let coeffs = (0..p).map(|l| b.rows(l * d, d).transpose()).collect();
    VarModel::new(coeffs, omega)
}

/// `sum_l A_l xi_{T-l}` where the last row of `history` is `xi_{T-1}`.
pub fn forecast_one_step(model: &VarModel, history: &DMatrix<f64>) -> Result<DVector<f64>> {
    let p = model.order();
    let h = history.nrows();
    if h < p {
        return Err(Error::InsufficientHistory { needed: p, got: h });
    }
    if history.ncols() != model.dim() {
        return Err(Error::DimensionMismatch("history width differs from model dimension".into()));
    }
    let mut out = DVector::zeros(model.dim());
    for (l, a) in model.coeffs().iter().enumerate() {
        out += a * history.row(h - 1 - l).transpose();
    }
    Ok(out)
}

/// Stationary variances used to build the fixed models: `(0.7, 0.2)` for `d = 2`,
/// otherwise linearly spaced from 0.7 down to 0.2.
pub fn builtin_lambdas(d: usize) -> Vec<f64> {
    if d == 1 {
        return vec![0.7];
    }
    (1..=d)
        .map(|i| 0.2 * (i - 1) as f64 / (d - 1) as f64 + 0.7 * (d - i) as f64 / (d - 1) as f64)
        .collect()
}

/// Fixed models by name: `paper-d2`, `paper-d4`, `paper-d6`, and the reconstructed
/// near-unit-root `alt-d4`.
pub fn builtin(name: &str) -> Result<VarModel> {
    let (d, a, omega): (usize, &[f64], &[f64]) = match name {
        "paper-d2" => (2, &D2_A, &D2_OMEGA),
        "paper-d4" => (4, &D4_A, &D4_OMEGA),
        "paper-d6" => (6, &D6_A, &D6_OMEGA),
        "alt-d4" => return random_stable_var(&builtin_lambdas(4), ALT_D4_RHO, ALT_D4_SEED),
        other => return Err(Error::UnknownModel(other.to_string())),
    };
    VarModel::var1(DMatrix::from_row_slice(d, d, a), DMatrix::from_row_slice(d, d, omega))
}

/// Default fixed model for a signal dimension.
pub fn builtin_for_dim(d: usize) -> Result<VarModel> {
    match d {
        2 => builtin("paper-d2"),
        4 => builtin("paper-d4"),
        6 => builtin("paper-d6"),
        _ => Err(Error::InvalidConfig(format!("no built-in model for d = {d}"))),
    }
}

const D2_A: [f64; 4] = [0.14275022, -0.61629756, -0.4615736, -0.49825869];
const D2_OMEGA: [f64; 4] = [0.60977113, -0.01529231, -0.01529231, 0.00121252];

#[rustfmt::skip]
const D4_A: [f64; 16] = [
    -0.40475218, 0.56881667, -0.01251201, -0.33319225,
    0.36328118, 0.23656237, 0.17826015, 0.47609812,
    0.04062105, -0.13439131, -0.3596354, -0.24931481,
    -0.31412948, 0.08911365, -0.36549673, 0.20076313,
];
#[rustfmt::skip]
const D4_OMEGA: [f64; 16] = [
    0.39050087, 0.06370578, 0.0340153, -0.10433378,
    0.06370578, 0.35412048, 0.05387206, 0.07341199,
    0.0340153, 0.05387206, 0.2960237, -0.02286662,
    -0.10433378, 0.07341199, -0.02286662, 0.06964716,
];
#[rustfmt::skip]
const D6_A: [f64; 36] = [
    0.37504966, 0.08142893, -0.07435684, -0.03887785, 0.25655029, 0.25170869,
    -0.14126954, -0.19192149, -0.0982056, -0.37670302, 0.16884435, -0.38686508,
    0.00451676, -0.32514261, -0.22975774, 0.12353677, 0.27258333, 0.26566839,
    0.44140703, -0.08094657, 0.05391765, -0.09386828, 0.03307928, -0.14231888,
    0.3419833, -0.20556356, 0.19934397, 0.08967538, 0.0027988, 0.22842928,
    0.01997925, 0.10989784, 0.29140585, -0.007507, 0.38542961, 0.19185898,
];
#[rustfmt::skip]
const D6_OMEGA: [f64; 36] = [
    0.56177209, 0.04343599, -0.0262747, -0.10676641, -0.0826483, -0.03922044,
    0.04343599, 0.46386005, -0.02291322, 0.01014503, 0.05098028, 0.02312988,
    -0.0262747, -0.02291322, 0.36764981, -0.00149778, -0.03508077, 0.01351097,
    -0.10676641, 0.01014503, -0.00149778, 0.25032321, -0.11118431, -0.00733749,
    -0.0826483, 0.05098028, -0.03508077, -0.11118431, 0.15925535, -0.02909279,
    -0.03922044, 0.02312988, 0.01351097, -0.00733749, -0.02909279, 0.09806406,
];
