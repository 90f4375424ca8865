//! A small convergence sweep with the oracle variant, saved with a manifest.

use fdenoise::experiment::DenoisingOptions;
use fdenoise::panel::Output;
use fdenoise::{run_denoising_experiment, save_results, DgpConfig, PipelineConfig, Result, SweepPoint};

fn main() -> Result<()> {
    let sweep: Vec<SweepPoint> = [200, 800]
        .into_iter()
        .map(|n| SweepPoint::pinned(DgpConfig { d: 2, n, ..Default::default() }, PipelineConfig::default()))
        .collect();
    let result = run_denoising_experiment(&sweep, DenoisingOptions { oracle: true, estimated: true }, 8, 2024);
    for s in result.summaries().iter().filter(|s| s.metric == "mise_over_lambda") {
        println!("n={:<5} {:<22} median {:.4}  IQR [{:.4}, {:.4}]", s.n, s.method, s.median, s.q1, s.q3);
    }
    let dir = std::env::temp_dir().join("fdenoise-sweep");
    let manifest = save_results(Output::Experiment(&result), &dir, serde_json::json!({ "runs": 8, "seed": 2024 }))?;
    for f in &manifest.data_files {
        println!("{} {} ({} bytes)", f.sha256, dir.join(&f.name).display(), f.bytes);
    }
    Ok(())
}
