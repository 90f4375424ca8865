//! Fit the whole pipeline to simulated data and compare orthogonal with MISE-optimal
//! denoising against the known signal.

use fdenoise::{fit, generate_dataset, mise, DgpConfig, Method, PipelineConfig, Result};

fn main() -> Result<()> {
    let cfg = DgpConfig { d: 2, n: 1600, lambda: 0.2, seed: 3, ..Default::default() };
    let data = generate_dataset(&cfg)?;
    let pipeline = PipelineConfig { pin_d: Some(cfg.d), ..Default::default() };
    let fitted = fit(&data.y, &pipeline, 1)?;

    println!("noise level {:.2}, raw MISE {:.4}", cfg.lambda, mise(&data.x, &data.y)?);
    for method in [Method::Orthogonal, Method::MiseOptimal] {
        let out = fitted.denoise(&data.y, method)?;
        let err = mise(&data.x, &out.denoised)?;
        println!(
            "{:<13} MISE {:.4}  MISE/lambda {:.3}  estimated floor {:.4}",
            method.name(),
            err,
            err / cfg.lambda,
            out.mise_min_estimate
        );
    }
    let opt = fitted.denoise(&data.y, Method::MiseOptimal)?;
    println!("lambda_hat {:.4}, removed share of the noise {:.3}", opt.lambda_hat, opt.removed_proportion());
    Ok(())
}
