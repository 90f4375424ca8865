//! Discretization of the curve domain and projection primitives.
//!
//! Curves are sampled on a left-endpoint equidistant grid `u_i = a + i (b - a) / N`
//! and integrals are Riemann sums with constant weight `w = (b - a) / N`. With this
//! rule the trigonometric bases used in the simulations are exactly orthonormal.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Tolerance on the Gram-matrix deviation from the identity for a basis to count as orthonormal.
pub const ORTHONORMAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::InvalidInterval { a, b });
        }
        if n < 2 {
            return Err(Error::InvalidSize(n));
        }
        Ok(Self { a, b, n })
    }

    /// The unit interval sampled at 200 points, as in the simulation study.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new(0.0, 1.0, n)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of sample points `N`.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Interval width `b - a`.
    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// Quadrature weight `(b - a) / N`.
    pub fn weight(&self) -> f64 {
        self.width() / self.n as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.a + (i as f64 / self.n as f64) * self.width()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// A single sampled curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    grid: Grid,
    values: Vec<f64>,
}

impl Curve {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "curve has {} values, grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.points().into_iter().map(f).collect())
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &Curve, beta: f64) -> Result<Curve> {
        self.grid.check_same(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| alpha * x + beta * y)
            .collect();
        Curve::new(self.grid, values)
    }

    pub fn norm(&self) -> f64 {
        inner_product(self, self).expect("same grid").sqrt()
    }
}

/// Riemann-sum approximation of the L2 inner product.
pub fn inner_product(f: &Curve, g: &Curve) -> Result<f64> {
    f.grid.check_same(&g.grid)?;
    let s: f64 = f.values.iter().zip(&g.values).map(|(x, y)| x * y).sum();
    Ok(f.grid.weight() * s)
}

/// Orthogonal projection of `y` onto the span of an orthonormal `basis`.
///
/// Returns the coefficients `<y, basis_j>` and the projected curve.
pub fn project(y: &Curve, basis: &[Curve]) -> Result<(Vec<f64>, Curve)> {
    let sub = Subspace::from_curves(y.grid, basis, vec![0.0; basis.len()])?;
    let coeffs: Vec<f64> = basis.iter().map(|b| inner_product(y, b)).collect::<Result<_>>()?;
    let parallel = sub.synthesize(&coeffs);
    Ok((coeffs, parallel))
}

/// A curve time series: `n` curves stored as the rows of an `n x N` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSeries {
    grid: Grid,
    data: DMatrix<f64>,
}

impl CurveSeries {
    pub fn new(grid: Grid, data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 {
            return Err(Error::EmptySeries);
        }
        if data.ncols() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "series has {} columns, grid has {} points",
                data.ncols(),
                grid.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, data })
    }

    pub fn from_curves(curves: &[Curve]) -> Result<Self> {
        let first = curves.first().ok_or(Error::EmptySeries)?;
        let grid = first.grid;
        let mut data = DMatrix::zeros(curves.len(), grid.len());
        for (t, c) in curves.iter().enumerate() {
            grid.check_same(&c.grid)?;
            for (i, v) in c.values.iter().enumerate() {
                data[(t, i)] = *v;
            }
        }
        Self::new(grid, data)
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, data: DMatrix<f64>) -> Self {
        Self { grid, data }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<f64> {
        self.data
    }

    /// Series length `n`.
    pub fn len(&self) -> usize {
        self.data.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.data.nrows() == 0
    }

    pub fn curve(&self, t: usize) -> Curve {
        Curve { grid: self.grid, values: self.data.row(t).iter().copied().collect() }
    }

    pub fn curves(&self) -> Vec<Curve> {
        (0..self.len()).map(|t| self.curve(t)).collect()
    }

    /// Row-wise difference `self - other`.
    pub fn sub(&self, other: &CurveSeries) -> Result<CurveSeries> {
        self.grid.check_same(&other.grid)?;
        if self.data.shape() != other.data.shape() {
            return Err(Error::DimensionMismatch("series shapes differ".into()));
        }
        Ok(Self::from_parts_unchecked(self.grid, &self.data - &other.data))
    }

    /// Mean over time of the integrated squared curves, divided by the interval width.
    pub fn mean_integrated_square(&self) -> f64 {
        let w = self.grid.weight() / self.grid.width();
        self.data.iter().map(|v| v * v).sum::<f64>() * w / self.len() as f64
    }

    /// Integrated sample variance (divisor `n - 1`), divided by the interval width.
    pub fn integrated_variance(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let w = self.grid.weight() / self.grid.width();
        let mut total = 0.0;
        for col in self.data.column_iter() {
            let m = col.mean();
            total += col.iter().map(|v| (v - m) * (v - m)).sum::<f64>();
        }
        total * w / (n - 1) as f64
    }

    /// Apply a permutation to the grid coordinate: column `i` of the result is column `perm[i]`.
    pub fn permute_columns(&self, perm: &[usize]) -> CurveSeries {
        let data = DMatrix::from_fn(self.len(), self.grid.len(), |t, i| self.data[(t, perm[i])]);
        Self::from_parts_unchecked(self.grid, data)
    }
}

/// An ordered orthonormal family of curves with associated eigenvalues.
///
/// The curves are stored as the columns of an `N x k` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    grid: Grid,
    basis: DMatrix<f64>,
    eigenvalues: Vec<f64>,
}

impl Subspace {
    pub fn new(grid: Grid, basis: DMatrix<f64>, eigenvalues: Vec<f64>) -> Result<Self> {
        if basis.nrows() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "basis has {} rows, grid has {} points",
                basis.nrows(),
                grid.len()
            )));
        }
        if eigenvalues.len() != basis.ncols() {
            return Err(Error::DimensionMismatch("one eigenvalue per basis curve required".into()));
        }
        let sub = Self { grid, basis, eigenvalues };
        let dev = sub.gram_deviation();
        if dev > ORTHONORMAL_TOL {
            return Err(Error::NonOrthonormalBasis { deviation: dev });
        }
        Ok(sub)
    }

    pub fn empty(grid: Grid) -> Self {
        Self { grid, basis: DMatrix::zeros(grid.len(), 0), eigenvalues: Vec::new() }
    }

    pub fn from_curves(grid: Grid, curves: &[Curve], eigenvalues: Vec<f64>) -> Result<Self> {
        let mut basis = DMatrix::zeros(grid.len(), curves.len());
        for (j, c) in curves.iter().enumerate() {
            grid.check_same(&c.grid)?;
            basis.set_column(j, &DVector::from_column_slice(&c.values));
        }
        Self::new(grid, basis, eigenvalues)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Basis curves as columns (`N x k`).
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn curve(&self, j: usize) -> Curve {
        Curve { grid: self.grid, values: self.basis.column(j).iter().copied().collect() }
    }

    pub fn curves(&self) -> Vec<Curve> {
        (0..self.dim()).map(|j| self.curve(j)).collect()
    }

    /// Largest absolute entry of `w B^T B - I`.
    pub fn gram_deviation(&self) -> f64 {
        let k = self.dim();
        if k == 0 {
            return 0.0;
        }
        let gram = self.basis.transpose() * &self.basis * self.grid.weight();
        (gram - DMatrix::<f64>::identity(k, k)).amax()
    }

    /// Keep the first `k` curves.
    pub fn truncate(&self, k: usize) -> Subspace {
        let k = k.min(self.dim());
        Self {
            grid: self.grid,
            basis: self.basis.columns(0, k).into_owned(),
            eigenvalues: self.eigenvalues[..k].to_vec(),
        }
    }

    /// `sum_j coeffs_j * basis_j`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Curve {
        let c = DVector::from_column_slice(coeffs);
        let v = &self.basis * c;
        Curve { grid: self.grid, values: v.iter().copied().collect() }
    }

    /// Coefficient matrix `<Y_t, basis_j>` for every row of `series` (`n x k`).
    pub fn coefficients(&self, series: &CurveSeries) -> Result<DMatrix<f64>> {
        self.grid.check_same(&series.grid)?;
        Ok(series.data() * &self.basis * self.grid.weight())
    }

    /// Row-wise orthogonal projection of `series` onto the span.
    pub fn project_series(&self, series: &CurveSeries) -> Result<CurveSeries> {
        let coeffs = self.coefficients(series)?;
        Ok(CurveSeries::from_parts_unchecked(self.grid, coeffs * self.basis.transpose()))
    }

    /// Kernel values of the orthogonal projector `sum_j b_j(u) b_j(v)`.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    pub fn permute_rows(&self, perm: &[usize]) -> Subspace {
        let basis = DMatrix::from_fn(self.grid.len(), self.dim(), |i, j| self.basis[(perm[i], j)]);
        Self { grid: self.grid, basis, eigenvalues: self.eigenvalues.clone() }
    }
}
