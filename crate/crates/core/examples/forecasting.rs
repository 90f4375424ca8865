//! One-step forecasts from raw, projected and denoised curves.

use fdenoise::experiment::forecast_errors;
use fdenoise::{theoretical_bounds, DgpConfig, PipelineConfig, Result, SweepPoint};

fn main() -> Result<()> {
    let dgp = DgpConfig { d: 4, n: 800, lambda: 0.4, ..Default::default() };
    let point = SweepPoint::pinned(dgp.clone(), PipelineConfig::default());
    for (strategy, err) in forecast_errors(&point, 21)? {
        println!("{:<15} Delta_F = {err:.4}", strategy.name());
    }
    println!("{:<15} Delta_F = {:.4}", "lower bound", theoretical_bounds(&dgp)?.forecast_bound);
    Ok(())
}
