//! Sample means, lagged autocovariance kernels, the DFPCA operator, and
//! eigendecomposition of symmetric kernels.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::{Curve, CurveSeries, Grid, Subspace};
use crate::linalg::{relative_asymmetry, sym_eigen_desc, sym_eigenvalues_desc, symmetrize};

/// Relative asymmetry above which a kernel is refused by [`eig_sym`].
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Eigenvalues with their orthonormal eigencurves, descending.
pub type Spectrum = Subspace;

/// A discretized integral-operator kernel `K(u_i, u_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    grid: Grid,
    values: DMatrix<f64>,
}

impl Kernel {
    pub fn new(grid: Grid, values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() != grid.len() || values.ncols() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "kernel is {}x{}, grid has {} points",
                values.nrows(),
                values.ncols(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: DMatrix::zeros(grid.len(), grid.len()) }
    }

    /// `sum_j eigenvalue_j * b_j(u) b_j(v)` over the curves of a subspace.
    pub fn from_subspace(sub: &Subspace) -> Self {
        let b = sub.basis();
        let scaled = DMatrix::from_fn(b.nrows(), b.ncols(), |i, j| b[(i, j)] * sub.eigenvalues()[j]);
        Self { grid: *sub.grid(), values: scaled * b.transpose() }
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, values: DMatrix<f64>) -> Self {
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_values(self) -> DMatrix<f64> {
        self.values
    }

    pub fn relative_asymmetry(&self) -> f64 {
        relative_asymmetry(&self.values)
    }

    /// `(K f)(u) = integral K(u, v) f(v) dv`.
    pub fn apply(&self, f: &Curve) -> Result<Curve> {
        self.grid.check_same(f.grid())?;
        let v = &self.values * DVector::from_column_slice(f.values()) * self.grid.weight();
        Curve::new(self.grid, v.iter().copied().collect())
    }

    /// Operator trace `integral K(u, u) du`.
    pub fn trace(&self) -> f64 {
        self.values.trace() * self.grid.weight()
    }

    /// Double integral `integral integral b_i(u) K(u, v) b_j(v) du dv` for all basis pairs.
    pub fn contract(&self, left: &Subspace, right: &Subspace) -> Result<DMatrix<f64>> {
        self.grid.check_same(left.grid())?;
        self.grid.check_same(right.grid())?;
        let w = self.grid.weight();
        Ok(left.basis().tr_mul(&(&self.values * right.basis())) * (w * w))
    }

    /// Matrix of the discretized operator, `w K`.
    pub fn operator_matrix(&self) -> DMatrix<f64> {
        &self.values * self.grid.weight()
    }

    pub fn sub(&self, other: &Kernel) -> Result<Kernel> {
        self.grid.check_same(&other.grid)?;
        Ok(Self::from_parts_unchecked(self.grid, &self.values - &other.values))
    }

    /// Operator norm of the discretized operator.
    pub fn operator_norm(&self) -> f64 {
        let sym = symmetrize(&self.values);
        sym_eigenvalues_desc(&sym)
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
            * self.grid.weight()
    }

    pub fn permute(&self, perm: &[usize]) -> Kernel {
        let n = self.grid.len();
        let values = DMatrix::from_fn(n, n, |i, j| self.values[(perm[i], perm[j])]);
        Self::from_parts_unchecked(self.grid, values)
    }
}

pub fn sample_mean(y: &CurveSeries) -> Result<Curve> {
    if y.is_empty() {
        return Err(Error::EmptySeries);
    }
    let means = y.data().column_iter().map(|c| c.mean()).collect();
    Curve::new(*y.grid(), means)
}

/// Data matrix with the sample mean removed from every row.
pub fn demeaned(y: &CurveSeries) -> DMatrix<f64> {
    let data = y.data();
    let means: Vec<f64> = data.column_iter().map(|c| c.mean()).collect();
    DMatrix::from_fn(data.nrows(), data.ncols(), |t, i| data[(t, i)] - means[i])
}

/// `sum_{t < n-k} x_t^T x_{t+k} / (n - k - 1)` for the rows `x_t` of a demeaned matrix.
pub(crate) fn lag_product(centered: &DMatrix<f64>, k: usize) -> Result<DMatrix<f64>> {
    let n = centered.nrows();
    if n < k + 2 {
        return Err(Error::SeriesTooShort { n, lag: k });
    }
    let m = n - k;
    let head = centered.rows(0, m);
    let tail = centered.rows(k, m);
    Ok(head.tr_mul(&tail) / (m - 1) as f64)
}

/// Lag-`k` sample autocovariance kernel, divisor `n - k - 1`. Lag 0 gives the sample covariance.
pub fn lagged_autocov(y: &CurveSeries, k: usize) -> Result<Kernel> {
    let centered = demeaned(y);
    Ok(Kernel::from_parts_unchecked(*y.grid(), lag_product(&centered, k)?))
}

/// `N_k = integral M_k(u, z) M_k(v, z) dz`, symmetrized.
fn composed(m: &DMatrix<f64>, w: f64) -> DMatrix<f64> {
    symmetrize(&(m * m.transpose() * w))
}

/// The DFPCA operator `K = sum_l c_l N_l` built from lags `1..=q`.
pub fn dfpca_kernel(y: &CurveSeries, q: usize, c: &[f64]) -> Result<Kernel> {
    if c.len() != q {
        return Err(Error::DimensionMismatch(format!("{} lag weights for q = {q}", c.len())));
    }
    if q == 0 || c.iter().all(|v| *v == 0.0) {
        return Err(Error::AllZeroCoefficients);
    }
    if y.len() < q + 2 {
        return Err(Error::SeriesTooShort { n: y.len(), lag: q });
    }
    Ok(Kernel::from_parts_unchecked(*y.grid(), dfpca_from_centered(&demeaned(y), y.grid().weight(), c)?))
}

pub(crate) fn dfpca_from_centered(centered: &DMatrix<f64>, w: f64, c: &[f64]) -> Result<DMatrix<f64>> {
    let n = centered.ncols();
    let mut k = DMatrix::zeros(n, n);
    for (l, &cl) in c.iter().enumerate() {
        if cl == 0.0 {
            continue;
        }
        let m = lag_product(centered, l + 1)?;
        k += composed(&m, w) * cl;
    }
    Ok(k)
}

fn check_symmetric(k: &Kernel) -> Result<()> {
    let asym = k.relative_asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(Error::AsymmetricKernel(asym));
    }
    Ok(())
}

/// Top-`m` eigenpairs of a symmetric kernel's integral operator.
///
/// Eigencurves are scaled to unit discrete norm; each has its largest-magnitude
/// entry positive.
pub fn eig_sym(k: &Kernel, m: usize) -> Result<Spectrum> {
    check_symmetric(k)?;
    let grid = k.grid;
    let w = grid.weight();
    let (values, vectors) = sym_eigen_desc(&symmetrize(&k.operator_matrix()));
    let m = m.min(values.len());
    let basis = vectors.columns(0, m) / w.sqrt();
    Subspace::new(grid, basis, values[..m].to_vec())
}

/// All eigenvalues of the kernel's integral operator, descending.
pub fn operator_eigenvalues(k: &Kernel) -> Result<Vec<f64>> {
    check_symmetric(k)?;
    Ok(sym_eigenvalues_desc(&symmetrize(&k.operator_matrix())))
}
