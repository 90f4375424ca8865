//! Built-in VAR models, their stationary covariance, and recovering it from lagged
//! autocovariances alone.

use fdenoise::noise::reconstruct_sigma0;
use fdenoise::var::{fit_var, BUILTIN_NAMES};
use fdenoise::{builtin, simulate_var, Result};

fn main() -> Result<()> {
    for name in BUILTIN_NAMES {
        let model = builtin(name)?;
        let lags = model.autocovariances(2)?;
        let sigma0 = &lags[0];
        let rebuilt = reconstruct_sigma0(&lags[1..], 1)?;
        println!(
            "{name}: spectral radius {:.3}, Tr Sigma0 {:.4}, reconstruction error {:.1e}",
            model.spectral_radius(),
            sigma0.trace(),
            (&rebuilt - sigma0).amax()
        );
    }

    let model = builtin("paper-d2")?;
    let xi = simulate_var(&model, 5000, 500, 11)?;
    let fitted = fit_var(&xi, 1)?;
    println!("true A:\n{}fitted A:{}", model.coeffs()[0], fitted.coeffs()[0]);
    Ok(())
}
