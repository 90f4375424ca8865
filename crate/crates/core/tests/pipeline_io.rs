//! CSV ingestion, preprocessing and result persistence through the filesystem.

use chrono::NaiveDate;
use fdenoise::experiment::{ExperimentResult, Row};
use fdenoise::panel::{
    load_manifest, load_rows, save_csv, synthetic_seasonal_panel, DenoiseSummary, Output, MANIFEST_FILE,
};
use fdenoise::{fit, generate_dataset, load_csv, preprocess, save_results, DgpConfig, Error, Layout, Method, PipelineConfig};
use nalgebra::DMatrix;

#[test]
fn save_then_load_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let start = NaiveDate::from_ymd_opt(2019, 12, 30).unwrap();
    let mut panel = synthetic_seasonal_panel(start, 5, 7, 1.0).unwrap();
    panel.matrix[(2, 3)] = 1.0 / 3.0;
    panel.matrix[(4, 6)] = -2.5e-310;
    for layout in [Layout::Wide, Layout::Long] {
        let path = dir.path().join("panel.csv");
        save_csv(&panel, &path, layout).unwrap();
        let back = load_csv(&path, layout).unwrap();
        assert_eq!(back.matrix, panel.matrix);
        assert_eq!(back.dates, panel.dates);
    }
}

#[test]
fn missing_file_is_io_error() {
    assert!(matches!(load_csv("/nonexistent/panel.csv", Layout::Wide), Err(Error::Io(_))));
}

#[test]
fn seasonal_cycle_is_removed() {
    // Three years of a pure yearly sinusoid on the daily mean.
    let start = NaiveDate::from_ymd_opt(2013, 1, 1).unwrap();
    let amplitude = 5.0;
    let mut panel = synthetic_seasonal_panel(start, 3 * 365, 4, amplitude).unwrap();
    // Small deterministic day-to-day wiggle so the panel is not degenerate after step 1.
    for i in 0..panel.matrix.nrows() {
        panel.matrix[(i, 0)] += 0.01 * ((i * 37 % 11) as f64 - 5.0);
    }
    let (y, report) = preprocess(&panel, 15.0).unwrap();
    // Residual yearly component of the daily mean, before rescaling.
    let n = y.len() as f64;
    let (mut c, mut s) = (0.0, 0.0);
    for (i, date) in start.iter_days().take(y.len()).enumerate() {
        let phase = 2.0 * std::f64::consts::PI * fdenoise::panel::day_of_year(date) as f64 / 365.0;
        let m = y.data().row(i).mean() * report.scale;
        c += m * phase.cos();
        s += m * phase.sin();
    }
    let residual = 2.0 * (c * c + s * s).sqrt() / n;
    assert!(residual <= 0.05 * amplitude, "residual amplitude {residual}");
}

#[test]
fn empty_experiment_saves_valid_summary() {
    let dir = tempfile::tempdir().unwrap();
    let m = save_results(Output::Experiment(&ExperimentResult::default()), dir.path(), serde_json::json!({})).unwrap();
    assert!(m.data_files.is_empty());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["rows"], 0);
    assert_eq!(load_manifest(dir.path().join(MANIFEST_FILE)).unwrap(), m);
}

#[test]
fn experiment_rows_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let row = |run: usize, value: f64, error: Option<&str>| Row {
        label: "d=2 lambda=0.2".into(),
        n: 800,
        lambda: 0.2,
        d: 2,
        p: 1,
        run,
        seed: u64::MAX - run as u64,
        method: "mise-optimal".into(),
        metric: "mise".into(),
        value,
        error: error.map(str::to_string),
    };
    let result = ExperimentResult { rows: vec![row(0, 0.1 + 0.2, None), row(1, 1e-300 / 3.0, None), row(2, f64::NAN, Some("singular, matrix"))] };
    let m = save_results(Output::Experiment(&result), dir.path(), serde_json::json!({"seed": 1})).unwrap();
    assert_eq!(m.data_files.len(), 2);
    let back = load_rows(dir.path().join("rows.csv")).unwrap();
    assert_eq!(back.rows[..2], result.rows[..2]);
    assert!(back.rows[2].value.is_nan());
    assert_eq!(back.rows[2].error, result.rows[2].error);
}

#[test]
fn denoise_summary_reports_removed_share() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate_dataset(&DgpConfig { n: 300, seed: 4, ..Default::default() }).unwrap();
    let fitted = fit(&data.y, &PipelineConfig { pin_d: Some(2), ..Default::default() }, 1).unwrap();
    let result = fitted.denoise(&data.y, Method::MiseOptimal).unwrap();
    let summary = DenoiseSummary::new(&fitted, &result);
    let m = save_results(Output::Denoised { series: &result.denoised, dates: None, summary: &summary }, dir.path(), serde_json::json!({}))
        .unwrap();
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let share = json["removed_proportion"].as_f64().unwrap();
    let expect = summary.removed_variance / (summary.removed_variance + summary.remaining_variance);
    assert_eq!(share, expect);
    assert_eq!(json["lambda_hat"].as_f64().unwrap(), result.lambda_hat);

    let denoised = std::fs::read_to_string(dir.path().join(&m.data_files[0].name)).unwrap();
    let first = denoised.lines().nth(1).unwrap();
    let v: f64 = first.split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(v, result.denoised.data()[(0, 0)]);
}

#[test]
fn manifest_hashes_match_contents() {
    use sha2::{Digest, Sha256};
    let dir = tempfile::tempdir().unwrap();
    let result = ExperimentResult { rows: vec![] };
    let _ = save_results(Output::Experiment(&result), dir.path(), serde_json::json!({})).unwrap();
    let panel = fdenoise::RawPanel::new(vec!["2020-01-01".into()], DMatrix::from_element(1, 3, 0.5)).unwrap();
    let summary = serde_json::json!({"k": 1});
    let m = save_results(Output::Panels { panels: &[("p.csv", &panel)], summary: &summary }, dir.path(), serde_json::json!({})).unwrap();
    for f in m.data_files.iter().chain([&m.summary]) {
        let bytes = std::fs::read(dir.path().join(&f.name)).unwrap();
        let hex: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(hex, f.sha256);
    }
}
