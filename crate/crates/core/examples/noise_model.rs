//! Estimate the noise covariance and split the noise space into the parts inside
//! and orthogonal to the dynamical space.

use fdenoise::dynspace::dynspace_with_dimension;
use fdenoise::{estimate_noise_model, generate_dataset, DfpcaParams, DgpConfig, NoiseParams, Result};

fn main() -> Result<()> {
    let cfg = DgpConfig { d: 2, n: 3200, lambda: 0.2, seed: 9, ..Default::default() };
    let data = generate_dataset(&cfg)?;
    let psi = dynspace_with_dimension(&data.y, cfg.d, &DfpcaParams::default())?.basis;
    let model = estimate_noise_model(&data.y, &psi, &NoiseParams::default())?;

    println!("estimated Sigma0 of the loadings:\n{}", model.sigma0_eta);
    println!("Tr Sigma_eps+ = {:.4} (population {:.4})", model.positive.trace(), data.truth.sigma_eps.trace());
    println!("dimensions: noise {}, parallel {}, perpendicular {}", model.d_eps(), model.d_par(), model.d_perp());
    Ok(())
}
