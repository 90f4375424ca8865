//! Permuting the grid points before estimation gives the same denoised curves.

use fdenoise::experiment::random_permutation;
use fdenoise::{shuffle_check, DgpConfig, PipelineConfig, Result, SweepPoint};

fn main() -> Result<()> {
    let dgp = DgpConfig { d: 4, n: 400, ..Default::default() };
    let point = SweepPoint::pinned(dgp.clone(), PipelineConfig::default());
    for k in 0..3 {
        let perm = random_permutation(dgp.grid_points, k);
        println!("permutation {k}: max deviation {:.2e}", shuffle_check(&point, &perm, 100 + k)?);
    }
    Ok(())
}
