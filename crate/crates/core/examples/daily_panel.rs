//! A daily panel through the empirical chain: CSV round trip, seasonal adjustment,
//! denoising, and the removed-variance summary.

use chrono::NaiveDate;
use fdenoise::panel::{panel_to_csv, parse_csv, synthetic_seasonal_panel, DenoiseSummary};
use fdenoise::{fit, generate_dataset, preprocess, DgpConfig, Layout, Method, PipelineConfig, Result};

fn main() -> Result<()> {
    let start = NaiveDate::from_ymd_opt(2012, 1, 1).expect("valid date");
    let days = 1096;
    let mut panel = synthetic_seasonal_panel(start, days, 24, 8.0)?;
    // Curve-valued weather: seasonal cycle plus a simulated signal-and-noise series.
    let sim = generate_dataset(&DgpConfig { d: 2, n: days, grid_points: 24, d_eps: 4, lambda: 0.16, seed: 8, ..Default::default() })?;
    panel.matrix += sim.y.data();

    let text = panel_to_csv(&panel, Layout::Long);
    let panel = parse_csv(&text, Layout::Long)?;
    let (y, report) = preprocess(&panel, 15.0)?;
    let amplitude = report.seasonal_mean.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    println!("seasonal amplitude {amplitude:.3}, rescaled by {:.4}", report.scale);

    let pipeline = PipelineConfig { pin_d: Some(2), ..Default::default() };
    let fitted = fit(&y, &pipeline, 5)?;
    let result = fitted.denoise(&y, Method::MiseOptimal)?;
    let summary = DenoiseSummary::new(&fitted, &result);
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}
