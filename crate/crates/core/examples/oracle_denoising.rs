//! Denoise with the true subspaces (estimated noise covariance) and with the full
//! population model, next to the closed-form floors.

use fdenoise::{fit_known, generate_dataset, mise, theoretical_bounds, DgpConfig, Method, NoiseParams, Result};

fn main() -> Result<()> {
    let cfg = DgpConfig { d: 2, n: 800, lambda: 0.2, thetas: Some(vec![0.785, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]), seed: 4, ..Default::default() };
    let data = generate_dataset(&cfg)?;
    let bounds = theoretical_bounds(&cfg)?;
    for (name, known) in [("oracle", data.truth.oracle()), ("population", data.truth.population())] {
        let fitted = fit_known(&data.y, &known, &NoiseParams::default())?;
        for method in [Method::Orthogonal, Method::MiseOptimal] {
            let x_hat = fitted.denoise_series(&data.y, method)?;
            println!("{name:<10} {:<13} MISE {:.5}", method.name(), mise(&data.x, &x_hat)?);
        }
    }
    println!("floors: orthogonal {:.5}, MISE-optimal {:.5}", bounds.ortho_min, bounds.opt_min);
    Ok(())
}
