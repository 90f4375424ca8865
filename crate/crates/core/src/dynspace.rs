//! Estimation of the dynamical space: its dimension via a cascade of bootstrap
//! tests on the DFPCA eigenvalues, and its orthonormal basis.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covariance::{demeaned, dfpca_from_centered, dfpca_kernel, Kernel};
use crate::error::{Error, Result};
use crate::grid::{CurveSeries, Subspace};
use crate::linalg::{derive_seed, sym_eigen_desc, sym_eigenvalues_desc, symmetrize};

/// Eigenvalue ratio `lambda_{d0+1} / lambda_1` below which the cascade may start.
pub const START_RATIO: f64 = 1e-6;
/// Upper bound for the cascade's starting dimension.
pub const MAX_START: usize = 20;
/// Eigenvalues below this fraction of the largest one are treated as exact zeros.
pub const ZERO_FLOOR: f64 = 1e-12;
/// Replicates evaluated between early-stopping checks.
const CHUNK: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfpcaParams {
    /// Number of lags entering the DFPCA operator.
    pub q: usize,
    /// Lag weights `c_1..c_q`.
    pub c: Vec<f64>,
    /// Bootstrap replicates per test.
    pub b: usize,
    /// Significance level.
    pub alpha: f64,
    /// Starting dimension of the cascade; chosen from the spectrum when `None`.
    pub d_start: Option<usize>,
    /// Stop drawing replicates once the test decision can no longer change.
    pub early_stop: bool,
}

impl Default for DfpcaParams {
    fn default() -> Self {
        Self { q: 2, c: vec![1.0, 1.0], b: 100, alpha: 0.05, d_start: None, early_stop: true }
    }
}

impl DfpcaParams {
    pub fn validate(&self) -> Result<()> {
        if self.q == 0 || self.c.len() != self.q {
            return Err(Error::InvalidConfig(format!("need q >= 1 lag weights, got q = {} and {} weights", self.q, self.c.len())));
        }
        if self.b == 0 {
            return Err(Error::InvalidConfig("bootstrap size B must be positive".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!("alpha = {} outside (0, 1)", self.alpha)));
        }
        Ok(())
    }
}

/// One step of the test cascade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub d0: usize,
    pub reject: bool,
    /// Number of replicates whose eigenvalue the observed one exceeds.
    pub exceed_count: usize,
    /// Replicates actually drawn (less than `B` when stopped early).
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynSpaceEstimate {
    pub d_hat: usize,
    /// The first `d_hat` eigencurves of the DFPCA operator.
    pub basis: Subspace,
    /// All operator eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    pub test_trace: Vec<TestOutcome>,
}

/// DFPCA operator and its full eigendecomposition, shared by the cascade's tests.
struct Decomposition {
    centered: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    /// Eigencurves as columns, unit discrete norm.
    curves: DMatrix<f64>,
    w: f64,
}

impl Decomposition {
    fn new(y: &CurveSeries, params: &DfpcaParams) -> Result<Self> {
        params.validate()?;
        let k = dfpca_kernel(y, params.q, &params.c)?;
        let w = y.grid().weight();
        let (eigenvalues, vectors) = sym_eigen_desc(&symmetrize(&k.operator_matrix()));
        Ok(Self { centered: demeaned(y), eigenvalues, curves: vectors / w.sqrt(), w })
    }

    fn subspace(&self, y: &CurveSeries, d: usize) -> Result<Subspace> {
        Subspace::new(*y.grid(), self.curves.columns(0, d).into_owned(), self.eigenvalues[..d].to_vec())
    }
}

fn floored(values: &[f64], i: usize) -> f64 {
    let top = values.first().copied().unwrap_or(0.0).max(0.0);
    let v = values.get(i).copied().unwrap_or(0.0);
    if v <= ZERO_FLOOR * top {
        0.0
    } else {
        v
    }
}

/// Smallest `d0` with `lambda_{d0+1} / lambda_1 < START_RATIO`, capped at [`MAX_START`] and `N - 1`.
pub fn default_d_start(eigenvalues: &[f64]) -> usize {
    let cap = MAX_START.min(eigenvalues.len().saturating_sub(1));
    let top = eigenvalues.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return 0;
    }
    (0..cap).find(|&d0| eigenvalues[d0] / top < START_RATIO).unwrap_or(cap)
}

fn run_test(dec: &Decomposition, d0: usize, params: &DfpcaParams, seed: u64) -> Result<TestOutcome> {
    let n = dec.centered.nrows();
    let observed = floored(&dec.eigenvalues, d0);
    let psi = dec.curves.columns(0, d0);
    let loadings = &dec.centered * psi * dec.w;
    let fitted = loadings * psi.transpose();
    let residuals = &dec.centered - &fitted;

    let replicate = |rep: usize| -> Result<bool> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[d0 as u64, rep as u64]));
        let mut star = fitted.clone();
        for t in 0..n {
            let s = rng.random_range(0..n);
            let mut row = star.row_mut(t);
            row += residuals.row(s);
        }
        let star = demean_rows(star);
        let k = dfpca_from_centered(&star, dec.w, &params.c)?;
        let values = sym_eigenvalues_desc(&(k * dec.w));
        Ok(observed > floored(&values, d0))
    };

    let threshold = (1.0 - params.alpha) * params.b as f64;
    let chunk = if params.early_stop { CHUNK } else { params.b };
    let mut exceed = 0usize;
    let mut drawn = 0usize;
    while drawn < params.b {
        let end = (drawn + chunk).min(params.b);
        let hits: Vec<bool> = (drawn..end).into_par_iter().map(replicate).collect::<Result<_>>()?;
        exceed += hits.iter().filter(|h| **h).count();
        drawn = end;
        if params.early_stop {
            let settled_reject = exceed as f64 > threshold;
            let settled_accept = ((exceed + params.b - drawn) as f64) <= threshold;
            if settled_reject || settled_accept {
                break;
            }
        }
    }
    Ok(TestOutcome { d0, reject: exceed as f64 > threshold, exceed_count: exceed, replicates: drawn })
}

fn demean_rows(mut m: DMatrix<f64>) -> DMatrix<f64> {
    for mut col in m.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
    m
}

/// Bootstrap test of `H0: lambda_{d0+1} = 0` for the DFPCA operator of `y`.
pub fn bootstrap_test(y: &CurveSeries, d0: usize, params: &DfpcaParams, seed: u64) -> Result<TestOutcome> {
    let dec = Decomposition::new(y, params)?;
    if d0 >= dec.eigenvalues.len() {
        return Err(Error::InvalidConfig(format!("d0 = {d0} must be below the grid size")));
    }
    run_test(&dec, d0, params, seed)
}

/// Estimate the dimension by the descending test cascade and return the leading eigencurves.
pub fn estimate_dynspace(y: &CurveSeries, params: &DfpcaParams, seed: u64) -> Result<DynSpaceEstimate> {
    let dec = Decomposition::new(y, params)?;
    let d_start = params.d_start.unwrap_or_else(|| default_d_start(&dec.eigenvalues));
    if d_start >= dec.eigenvalues.len() {
        return Err(Error::InvalidConfig(format!("d_start = {d_start} must be below the grid size")));
    }
    let mut trace = Vec::new();
    let mut d_hat = 0;
    for d0 in (0..=d_start).rev() {
        let outcome = run_test(&dec, d0, params, seed)?;
        trace.push(outcome);
        if outcome.reject {
            d_hat = d0 + 1;
            break;
        }
    }
    Ok(DynSpaceEstimate { d_hat, basis: dec.subspace(y, d_hat)?, eigenvalues: dec.eigenvalues, test_trace: trace })
}

/// Basis of a dynamical space of known dimension `d`, without testing.
pub fn dynspace_with_dimension(y: &CurveSeries, d: usize, params: &DfpcaParams) -> Result<DynSpaceEstimate> {
    let dec = Decomposition::new(y, params)?;
    if d > dec.eigenvalues.len() {
        return Err(Error::InvalidConfig(format!("d = {d} exceeds the grid size")));
    }
    Ok(DynSpaceEstimate { d_hat: d, basis: dec.subspace(y, d)?, eigenvalues: dec.eigenvalues, test_trace: Vec::new() })
}

/// Leading eigenvalues of an already computed DFPCA kernel.
pub fn kernel_eigenvalues(k: &Kernel) -> Vec<f64> {
    sym_eigenvalues_desc(&symmetrize(&k.operator_matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_dimension_rule() {
        assert_eq!(default_d_start(&[1.0, 0.5, 1e-7, 0.0]), 2);
        assert_eq!(default_d_start(&[0.0, 0.0]), 0);
        let slow: Vec<f64> = (0..40).map(|i| 0.9_f64.powi(i)).collect();
        assert_eq!(default_d_start(&slow), MAX_START);
        assert_eq!(default_d_start(&[1.0, 0.9, 0.8]), 2);
    }

    #[test]
    fn zero_floor_applies_relative_to_top() {
        assert_eq!(floored(&[1.0, 1e-14], 1), 0.0);
        assert_eq!(floored(&[1.0, 1e-6], 1), 1e-6);
        assert_eq!(floored(&[1.0], 3), 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(DfpcaParams::default().validate().is_ok());
        let bad = DfpcaParams { alpha: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = DfpcaParams { q: 2, c: vec![1.0], ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
