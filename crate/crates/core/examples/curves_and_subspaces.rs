//! Curves on a grid, inner products, and projection onto a subspace.

use std::f64::consts::PI;

use fdenoise::grid::{inner_product, project};
use fdenoise::{Curve, Grid, Result};

fn main() -> Result<()> {
    let grid = Grid::unit(200)?;
    let cos = Curve::from_fn(grid, |u| 2f64.sqrt() * (2.0 * PI * u).cos())?;
    let sin = Curve::from_fn(grid, |u| 2f64.sqrt() * (2.0 * PI * u).sin())?;
    println!("<cos, cos> = {:.6}, <cos, sin> = {:.2e}", inner_product(&cos, &cos)?, inner_product(&cos, &sin)?);

    let y = Curve::from_fn(grid, |u| 3.0 * (2.0 * PI * u).cos() + u)?;
    let (coeffs, parallel) = project(&y, &[cos, sin])?;
    let residual = y.combine(1.0, &parallel, -1.0)?;
    println!("coefficients {coeffs:.4?}");
    println!("|y| = {:.4}, |projection| = {:.4}, |residual| = {:.4}", y.norm(), parallel.norm(), residual.norm());
    Ok(())
}
