//! One-step curve forecasts: mean, naive, and Karhunen-Loeve expansions whose
//! scores follow a fitted VAR model.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::covariance::{demeaned, eig_sym, lagged_autocov, sample_mean};
use crate::error::{Error, Result};
use crate::grid::CurveSeries;
use crate::var::{fit_var, forecast_one_step};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Mean,
    Naive,
    KarhunenLoeve,
    MiseOptimal,
    Orthogonal,
}

impl Strategy {
    pub const ALL: [Strategy; 5] =
        [Strategy::Mean, Strategy::Naive, Strategy::KarhunenLoeve, Strategy::MiseOptimal, Strategy::Orthogonal];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Mean => "mean",
            Strategy::Naive => "naive",
            Strategy::KarhunenLoeve => "karhunen-loeve",
            Strategy::MiseOptimal => "mise-optimal",
            Strategy::Orthogonal => "orthogonal",
        }
    }
}

/// Forecasts of rows `start..n` from the sample mean of `y`.
pub fn mean_forecast(y: &CurveSeries, start: usize) -> Result<DMatrix<f64>> {
    let mean = sample_mean(y)?;
    let n = y.len();
    Ok(DMatrix::from_fn(n.saturating_sub(start), y.grid().len(), |_, i| mean.values()[i]))
}

/// Forecasts of rows `start..n` by the previous curve.
pub fn naive_forecast(y: &CurveSeries, start: usize) -> Result<DMatrix<f64>> {
    if start == 0 {
        return Err(Error::InsufficientHistory { needed: 1, got: 0 });
    }
    Ok(y.data().rows(start - 1, y.len() - start).into_owned())
}

/// Forecasts of rows `p..n`: project on the leading `d` eigencurves of the sample
/// covariance, fit a VAR(`p`) to the centered scores, and map predicted scores back.
pub fn kl_forecast(series: &CurveSeries, d: usize, p: usize) -> Result<DMatrix<f64>> {
    let n = series.len();
    let mean = sample_mean(series)?;
    let spectrum = eig_sym(&lagged_autocov(series, 0)?, d)?;
    let basis = spectrum.basis();
    let scores = demeaned(series) * basis * series.grid().weight();
    let model = fit_var(&scores, p)?;
    let mut out = DMatrix::zeros(n - p, series.grid().len());
    for t in p..n {
        let history = scores.rows(t - p, p).into_owned();
        let predicted = forecast_one_step(&model, &history)?;
        let curve = basis * predicted;
        for i in 0..series.grid().len() {
            out[(t - p, i)] = mean.values()[i] + curve[i];
        }
    }
    Ok(out)
}

/// `sum_t integral (X_t - F_t)^2 / sum_t integral X_t^2` over rows `start..n` of `x`.
pub fn normalized_error(x: &CurveSeries, forecasts: &DMatrix<f64>, start: usize) -> Result<f64> {
    let rows = x.len() - start;
    if forecasts.shape() != (rows, x.grid().len()) {
        return Err(Error::DimensionMismatch("forecast matrix shape".into()));
    }
    let target = x.data().rows(start, rows);
    let err = (target - forecasts).norm_squared();
    let scale = target.norm_squared();
    if scale == 0.0 {
        return Err(Error::ZeroVarianceInput);
    }
    Ok(err / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn naive_and_mean_shapes() {
        let g = Grid::unit(4).unwrap();
        let y = CurveSeries::new(g, DMatrix::from_fn(5, 4, |t, i| (t + i) as f64)).unwrap();
        let nv = naive_forecast(&y, 1).unwrap();
        assert_eq!(nv.nrows(), 4);
        assert_eq!(nv.row(0), y.data().row(0));
        let m = mean_forecast(&y, 1).unwrap();
        assert_eq!(m[(0, 0)], 2.0);
        assert_eq!(normalized_error(&y, &y.data().rows(1, 4).into_owned(), 1).unwrap(), 0.0);
    }

    #[test]
    fn kl_forecast_is_exact_for_deterministic_rotation() {
        use std::f64::consts::PI;
        let g = Grid::unit(32).unwrap();
        let (c, s) = ((0.3_f64).cos() * 0.9, (0.3_f64).sin() * 0.9);
        let mut xi = vec![(1.0, 0.0)];
        for t in 1..60 {
            let (a, b) = xi[t - 1];
            xi.push((c * a - s * b, s * a + c * b));
        }
        let data = DMatrix::from_fn(60, 32, |t, i| {
            let u = g.point(i);
            xi[t].0 * (2.0 * PI * u).cos() + xi[t].1 * (2.0 * PI * u).sin()
        });
        let y = CurveSeries::new(g, data).unwrap();
        let f = kl_forecast(&y, 2, 1).unwrap();
        // Centering makes the score recursion affine; with an intercept-free fit the error is small, not zero.
        assert!(normalized_error(&y, &f, 1).unwrap() < 0.05);
    }
}
