//! CSV ingestion of daily curve panels, seasonal preprocessing, and result
//! persistence with a hashed manifest.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiment::{ExperimentResult, Row, Summary};
use crate::grid::{Curve, CurveSeries, Grid};
use crate::model::{DenoiseResult, Fitted};

/// Length of the seasonal calendar; Feb 29 shares Feb 28's slot.
pub const DAYS_PER_YEAR: usize = 365;

/// Relative size below which the rescaling standard deviation counts as zero.
const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    /// `date,v0,...,v{N-1}`, one row per day.
    Wide,
    /// `date,position,value`, one row per cell.
    Long,
}

impl FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wide" => Ok(Layout::Wide),
            "long" => Ok(Layout::Long),
            other => Err(Error::InvalidConfig(format!("unknown layout {other:?} (expected wide or long)"))),
        }
    }
}

/// Days by within-day positions.
#[derive(Debug, Clone, PartialEq)]
pub struct RawPanel {
    pub dates: Vec<String>,
    pub matrix: DMatrix<f64>,
    pub column_labels: Vec<String>,
}

impl RawPanel {
    pub fn new(dates: Vec<String>, matrix: DMatrix<f64>) -> Result<Self> {
        if dates.len() != matrix.nrows() {
            return Err(Error::DimensionMismatch(format!("{} dates for {} rows", dates.len(), matrix.nrows())));
        }
        let mut prev: Option<NaiveDate> = None;
        for (i, d) in dates.iter().enumerate() {
            let date = parse_date(d, i + 2)?;
            if prev.is_some_and(|p| date <= p) {
                return Err(Error::NonMonotoneDates { date: d.clone() });
            }
            prev = Some(date);
        }
        let column_labels = (0..matrix.ncols()).map(|j| format!("v{j}")).collect();
        Ok(Self { dates, matrix, column_labels })
    }
}

fn parse_date(s: &str, line: usize) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map_err(|e| Error::Parse { line, message: format!("bad date {s:?}: {e}") })
}

fn parse_value(s: &str, line: usize) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| Error::Parse { line, message: format!("bad number {s:?}") })?;
    if !v.is_finite() {
        return Err(Error::Parse { line, message: format!("non-finite value {s:?}") });
    }
    Ok(v)
}

fn record_line(rec: &csv::StringRecord) -> usize {
    rec.position().map_or(0, |p| p.line() as usize)
}

pub fn load_csv(path: impl AsRef<Path>, layout: Layout) -> Result<RawPanel> {
    let text = fs::read_to_string(path)?;
    parse_csv(&text, layout)
}

/// Parse panel text in the given layout.
pub fn parse_csv(text: &str, layout: Layout) -> Result<RawPanel> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    match layout {
        Layout::Wide => parse_wide(&mut reader, &headers),
        Layout::Long => parse_long(&mut reader),
    }
}

fn parse_wide(reader: &mut csv::Reader<&[u8]>, headers: &csv::StringRecord) -> Result<RawPanel> {
    let width = headers.len().saturating_sub(1);
    if width == 0 {
        return Err(Error::Parse { line: 1, message: "header has no value columns".into() });
    }
    let mut dates = Vec::new();
    let mut values = Vec::new();
    let mut prev: Option<NaiveDate> = None;
    for rec in reader.records() {
        let rec = rec?;
        let line = record_line(&rec);
        let date_str = rec.get(0).unwrap_or("").trim().to_string();
        let date = parse_date(&date_str, line)?;
        if prev.is_some_and(|p| date <= p) {
            return Err(Error::NonMonotoneDates { date: date_str });
        }
        prev = Some(date);
        if rec.len() > width + 1 {
            return Err(Error::Parse { line, message: format!("{} fields, expected {}", rec.len(), width + 1) });
        }
        for j in 0..width {
            match rec.get(j + 1).map(str::trim) {
                Some(s) if !s.is_empty() => values.push(parse_value(s, line)?),
                _ => return Err(Error::MissingCell { date: date_str }),
            }
        }
        dates.push(date_str);
    }
    if dates.is_empty() {
        return Err(Error::EmptySeries);
    }
    let matrix = DMatrix::from_row_slice(dates.len(), width, &values);
    let column_labels = headers.iter().skip(1).map(str::to_string).collect();
    Ok(RawPanel { dates, matrix, column_labels })
}

fn parse_long(reader: &mut csv::Reader<&[u8]>) -> Result<RawPanel> {
    let mut cells: BTreeMap<NaiveDate, (String, BTreeMap<usize, f64>)> = BTreeMap::new();
    let mut width = 0;
    for rec in reader.records() {
        let rec = rec?;
        let line = record_line(&rec);
        if rec.len() != 3 {
            return Err(Error::Parse { line, message: format!("{} fields, expected 3", rec.len()) });
        }
        let date_str = rec[0].trim().to_string();
        let date = parse_date(&date_str, line)?;
        let position: usize =
            rec[1].trim().parse().map_err(|_| Error::Parse { line, message: format!("bad position {:?}", &rec[1]) })?;
        let value = parse_value(&rec[2], line)?;
        width = width.max(position + 1);
        let entry = cells.entry(date).or_insert_with(|| (date_str.clone(), BTreeMap::new()));
        if entry.1.insert(position, value).is_some() {
            return Err(Error::DuplicateKey { date: date_str, position });
        }
    }
    if cells.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut dates = Vec::with_capacity(cells.len());
    let mut matrix = DMatrix::zeros(cells.len(), width);
    for (i, (_, (date_str, row))) in cells.into_iter().enumerate() {
        if row.len() != width {
            return Err(Error::MissingCell { date: date_str });
        }
        for (j, v) in row {
            matrix[(i, j)] = v;
        }
        dates.push(date_str);
    }
    let column_labels = (0..width).map(|j| format!("v{j}")).collect();
    Ok(RawPanel { dates, matrix, column_labels })
}

/// Format a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Render a panel in the given layout.
pub fn panel_to_csv(panel: &RawPanel, layout: Layout) -> String {
    let mut out = String::new();
    match layout {
        Layout::Wide => {
            out.push_str("date");
            for j in 0..panel.matrix.ncols() {
                out.push_str(&format!(",v{j}"));
            }
            out.push('\n');
            for (i, date) in panel.dates.iter().enumerate() {
                out.push_str(date);
                for v in panel.matrix.row(i).iter() {
                    out.push(',');
                    out.push_str(&fmt_f64(*v));
                }
                out.push('\n');
            }
        }
        Layout::Long => {
            out.push_str("date,position,value\n");
            for (i, date) in panel.dates.iter().enumerate() {
                for (j, v) in panel.matrix.row(i).iter().enumerate() {
                    out.push_str(&format!("{date},{j},{}\n", fmt_f64(*v)));
                }
            }
        }
    }
    out
}

pub fn save_csv(panel: &RawPanel, path: impl AsRef<Path>, layout: Layout) -> Result<()> {
    fs::write(path, panel_to_csv(panel, layout))?;
    Ok(())
}

/// What preprocessing removed.
#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessReport {
    /// Smoothed daily mean for each of the 365 calendar slots.
    pub seasonal_mean: Vec<f64>,
    /// Per-position mean of the deseasonalized panel.
    pub hourly_mean: Curve,
    /// Standard deviation divided out in the last step.
    pub scale: f64,
}

/// Zero-based calendar slot, with Feb 29 folded onto Feb 28.
pub fn day_of_year(date: NaiveDate) -> usize {
    let (m, d) = if date.month() == 2 && date.day() == 29 { (2, 28) } else { (date.month(), date.day()) };
    NaiveDate::from_ymd_opt(2001, m, d).expect("valid non-leap calendar date").ordinal0() as usize
}

fn circular_distance(a: usize, b: usize) -> f64 {
    let diff = a.abs_diff(b);
    diff.min(DAYS_PER_YEAR - diff) as f64
}

/// Gaussian-kernel smoothed daily means over the circular calendar; slots are
/// weighted by every observed day, so years with more data count more.
pub fn seasonal_profile(day_slots: &[usize], daily_means: &[f64], bandwidth_days: f64) -> Vec<f64> {
    let mut sums = [0.0; DAYS_PER_YEAR];
    let mut counts = [0.0; DAYS_PER_YEAR];
    for (&slot, &m) in day_slots.iter().zip(daily_means) {
        sums[slot] += m;
        counts[slot] += 1.0;
    }
    let denom = 2.0 * bandwidth_days * bandwidth_days;
    (0..DAYS_PER_YEAR)
        .map(|target| {
            let (mut num, mut den) = (0.0, 0.0);
            for s in 0..DAYS_PER_YEAR {
                if counts[s] > 0.0 {
                    let dist = circular_distance(target, s);
                    let w = (-dist * dist / denom).exp();
                    num += w * sums[s];
                    den += w * counts[s];
                }
            }
            if den > 0.0 {
                num / den
            } else {
                0.0
            }
        })
        .collect()
}

/// Remove the seasonal cycle of the daily mean, center each position, and rescale to unit
/// sample standard deviation.
pub fn preprocess(panel: &RawPanel, bandwidth_days: f64) -> Result<(CurveSeries, PreprocessReport)> {
    if !(bandwidth_days > 0.0 && bandwidth_days.is_finite()) {
        return Err(Error::InvalidConfig(format!("bandwidth {bandwidth_days} must be positive")));
    }
    let (n, width) = panel.matrix.shape();
    if n < 2 {
        return Err(Error::SeriesTooShort { n, lag: 1 });
    }
    let grid = Grid::unit(width)?;
    let slots = panel
        .dates
        .iter()
        .enumerate()
        .map(|(i, d)| parse_date(d, i + 2).map(day_of_year))
        .collect::<Result<Vec<_>>>()?;
    let daily_means: Vec<f64> = (0..n).map(|i| panel.matrix.row(i).mean()).collect();
    let seasonal_mean = seasonal_profile(&slots, &daily_means, bandwidth_days);

    let mut data = panel.matrix.clone();
    for (i, &slot) in slots.iter().enumerate() {
        data.row_mut(i).add_scalar_mut(-seasonal_mean[slot]);
    }
    let hourly: Vec<f64> = (0..width).map(|j| data.column(j).mean()).collect();
    for (j, &m) in hourly.iter().enumerate() {
        data.column_mut(j).add_scalar_mut(-m);
    }
    let cells = (n * width) as f64;
    let scale = (data.norm_squared() / (cells - 1.0)).sqrt();
    let magnitude = panel.matrix.amax().max(f64::MIN_POSITIVE);
    if scale.is_nan() || scale <= DEGENERATE_TOL * magnitude {
        return Err(Error::DegenerateVariance);
    }
    data /= scale;
    let report = PreprocessReport { seasonal_mean, hourly_mean: Curve::new(grid, hourly)?, scale };
    Ok((CurveSeries::new(grid, data)?, report))
}

/// Scalar diagnostics of one denoising run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenoiseSummary {
    pub method: String,
    pub n: usize,
    pub grid_points: usize,
    pub d_hat: usize,
    pub d_eps: Option<usize>,
    pub d_par: usize,
    pub d_perp: usize,
    pub lambda_hat: f64,
    pub lambda_trace: f64,
    pub mise_min: f64,
    pub removed_variance: f64,
    pub remaining_variance: f64,
    pub removed_proportion: f64,
    pub warnings: Vec<String>,
}

impl DenoiseSummary {
    pub fn new(fitted: &Fitted, result: &DenoiseResult) -> Self {
        Self {
            method: result.method.name().to_string(),
            n: result.denoised.len(),
            grid_points: result.denoised.grid().len(),
            d_hat: fitted.d(),
            d_eps: fitted.noise.as_ref().map(|m| m.d_eps()),
            d_par: fitted.par.dim(),
            d_perp: fitted.perp.dim(),
            lambda_hat: result.lambda_hat,
            lambda_trace: result.lambda_trace,
            mise_min: result.mise_min_estimate,
            removed_variance: result.removed_variance,
            remaining_variance: result.remaining_variance,
            removed_proportion: result.removed_proportion(),
            warnings: result.warnings.clone(),
        }
    }
}

/// Something `save_results` can persist.
#[derive(Debug, Clone, Copy)]
pub enum Output<'a> {
    Experiment(&'a ExperimentResult),
    Denoised {
        series: &'a CurveSeries,
        dates: Option<&'a [String]>,
        summary: &'a DenoiseSummary,
    },
    /// Named panels plus a free-form JSON summary.
    Panels {
        panels: &'a [(&'a str, &'a RawPanel)],
        summary: &'a serde_json::Value,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// Fully resolved configuration, including the seed.
    pub config: serde_json::Value,
    pub summary: FileEntry,
    pub data_files: Vec<FileEntry>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

fn write_hashed(dir: &Path, name: &str, contents: &str) -> Result<FileEntry> {
    fs::write(dir.join(name), contents)?;
    let digest = Sha256::digest(contents.as_bytes());
    let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok(FileEntry { name: name.to_string(), sha256, bytes: contents.len() })
}

fn rows_to_csv(rows: &[Row]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["label", "n", "lambda", "d", "p", "run", "seed", "method", "metric", "value", "error"])?;
    for r in rows {
        w.write_record([
            r.label.clone(),
            r.n.to_string(),
            fmt_f64(r.lambda),
            r.d.to_string(),
            r.p.to_string(),
            r.run.to_string(),
            r.seed.to_string(),
            r.method.clone(),
            r.metric.clone(),
            fmt_f64(r.value),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is UTF-8"))
}

fn summaries_to_csv(summaries: &[Summary]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record([
        "label", "n", "lambda", "p", "method", "metric", "count", "failures", "mean", "std_error", "median", "q1", "q3",
    ])?;
    for s in summaries {
        w.write_record([
            s.label.clone(),
            s.n.to_string(),
            fmt_f64(s.lambda),
            s.p.to_string(),
            s.method.clone(),
            s.metric.clone(),
            s.count.to_string(),
            s.failures.to_string(),
            fmt_f64(s.mean),
            fmt_f64(s.std_error),
            fmt_f64(s.median),
            fmt_f64(s.q1),
            fmt_f64(s.q3),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is UTF-8"))
}

/// Read back a long-format table written by `save_results`.
pub fn load_rows(path: impl AsRef<Path>) -> Result<ExperimentResult> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let line = record_line(&rec);
        let field = |i: usize| rec.get(i).unwrap_or("");
        let int = |i: usize| -> Result<u64> {
            field(i).parse().map_err(|_| Error::Parse { line, message: format!("bad integer {:?}", field(i)) })
        };
        let float = |i: usize| -> Result<f64> {
            field(i).parse().map_err(|_| Error::Parse { line, message: format!("bad number {:?}", field(i)) })
        };
        rows.push(Row {
            label: field(0).to_string(),
            n: int(1)? as usize,
            lambda: float(2)?,
            d: int(3)? as usize,
            p: int(4)? as usize,
            run: int(5)? as usize,
            seed: int(6)?,
            method: field(7).to_string(),
            metric: field(8).to_string(),
            value: float(9)?,
            error: Some(field(10)).filter(|s| !s.is_empty()).map(str::to_string),
        });
    }
    Ok(ExperimentResult { rows })
}

/// Write tables as CSV and scalars as `summary.json` into `dir`, then a manifest with the
/// configuration and content hashes.
pub fn save_results(output: Output<'_>, dir: impl AsRef<Path>, config: serde_json::Value) -> Result<Manifest> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut data_files = Vec::new();
    let summary = match output {
        Output::Experiment(result) => {
            let summaries = result.summaries();
            if !result.rows.is_empty() {
                data_files.push(write_hashed(dir, "rows.csv", &rows_to_csv(&result.rows)?)?);
                data_files.push(write_hashed(dir, "summary.csv", &summaries_to_csv(&summaries)?)?);
            }
            let json = serde_json::json!({
                "rows": result.rows.len(),
                "failures": result.failures().len(),
                "summaries": summaries,
            });
            write_hashed(dir, "summary.json", &(serde_json::to_string_pretty(&json)? + "\n"))?
        }
        Output::Denoised { series, dates, summary } => {
            let labels: Vec<String> = match dates {
                Some(d) => d.to_vec(),
                None => (0..series.len()).map(|t| t.to_string()).collect(),
            };
            let panel = RawPanel {
                dates: labels,
                matrix: series.data().clone(),
                column_labels: (0..series.grid().len()).map(|j| format!("v{j}")).collect(),
            };
            data_files.push(write_hashed(dir, "denoised.csv", &panel_to_csv(&panel, Layout::Wide))?);
            write_hashed(dir, "summary.json", &(serde_json::to_string_pretty(summary)? + "\n"))?
        }
        Output::Panels { panels, summary } => {
            for (name, panel) in panels {
                data_files.push(write_hashed(dir, name, &panel_to_csv(panel, Layout::Wide))?);
            }
            write_hashed(dir, "summary.json", &(serde_json::to_string_pretty(summary)? + "\n"))?
        }
    };
    let manifest = Manifest { config, summary, data_files };
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(manifest)
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Resolve a manifest-relative file name.
pub fn manifest_path(dir: impl AsRef<Path>, entry: &FileEntry) -> PathBuf {
    dir.as_ref().join(&entry.name)
}

/// Synthetic daily panel: a yearly cycle of amplitude `amplitude` on the daily mean
/// plus a fixed within-day shape; handy for exercising `preprocess`.
pub fn synthetic_seasonal_panel(start: NaiveDate, days: usize, width: usize, amplitude: f64) -> Result<RawPanel> {
    let dates: Vec<String> = start.iter_days().take(days).map(|d| d.format("%Y-%m-%d").to_string()).collect();
    let mut matrix = DMatrix::zeros(days, width);
    for (i, date) in start.iter_days().take(days).enumerate() {
        let season = amplitude * (2.0 * PI * day_of_year(date) as f64 / DAYS_PER_YEAR as f64).sin();
        for j in 0..width {
            matrix[(i, j)] = season + (2.0 * PI * j as f64 / width as f64).cos();
        }
    }
    RawPanel::new(dates, matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wide_file_loads() {
        let text = "date,v0,v1,v2,v3\n2020-01-01,1,2,3,4\n2020-01-02,5,6,7,8\n2020-01-03,9,10,11,12\n";
        let p = parse_csv(text, Layout::Wide).unwrap();
        assert_eq!(p.matrix.shape(), (3, 4));
        assert_eq!(p.matrix[(2, 3)], 12.0);
        assert_eq!(p.column_labels, vec!["v0", "v1", "v2", "v3"]);
    }

    #[test]
    fn long_file_pivots_and_sorts() {
        let text = "date,position,value\n2020-01-02,1,4\n2020-01-01,0,1\n2020-01-02,0,3\n2020-01-01,1,2\n";
        let p = parse_csv(text, Layout::Long).unwrap();
        assert_eq!(p.dates, vec!["2020-01-01", "2020-01-02"]);
        assert_eq!(p.matrix, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]));
    }

    #[test]
    fn long_missing_cell_names_date() {
        let text = "date,position,value\n2020-01-01,0,1\n2020-01-01,1,2\n2020-01-02,0,3\n";
        match parse_csv(text, Layout::Long) {
            Err(Error::MissingCell { date }) => assert_eq!(date, "2020-01-02"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn long_duplicate_is_rejected() {
        let text = "date,position,value\n2020-01-01,0,1\n2020-01-01,0,2\n";
        assert!(matches!(parse_csv(text, Layout::Long), Err(Error::DuplicateKey { position: 0, .. })));
    }

    #[test]
    fn wide_errors() {
        let bad_num = "date,v0\n2020-01-01,1\n2020-01-02,x\n";
        assert!(matches!(parse_csv(bad_num, Layout::Wide), Err(Error::Parse { line: 3, .. })));
        let gap = "date,v0,v1\n2020-01-01,1,\n";
        assert!(matches!(parse_csv(gap, Layout::Wide), Err(Error::MissingCell { .. })));
        let backwards = "date,v0\n2020-01-02,1\n2020-01-01,2\n";
        assert!(matches!(parse_csv(backwards, Layout::Wide), Err(Error::NonMonotoneDates { .. })));
    }

    #[test]
    fn wide_round_trip_is_bit_exact() {
        let m = DMatrix::from_fn(3, 5, |i, j| ((i * 7 + j) as f64).sin() / 3.0 + 1e-300 * j as f64);
        let p = RawPanel::new(vec!["2021-03-01".into(), "2021-03-02".into(), "2021-03-05".into()], m).unwrap();
        for layout in [Layout::Wide, Layout::Long] {
            let back = parse_csv(&panel_to_csv(&p, layout), layout).unwrap();
            assert_eq!(back.matrix, p.matrix);
            assert_eq!(back.dates, p.dates);
        }
    }

    #[test]
    fn leap_day_shares_feb_28() {
        let feb28 = NaiveDate::from_ymd_opt(2020, 2, 28).unwrap();
        let feb29 = NaiveDate::from_ymd_opt(2020, 2, 29).unwrap();
        let mar1 = NaiveDate::from_ymd_opt(2020, 3, 1).unwrap();
        assert_eq!(day_of_year(feb28), day_of_year(feb29));
        assert_eq!(day_of_year(mar1), 59);
        assert_eq!(day_of_year(NaiveDate::from_ymd_opt(2019, 12, 31).unwrap()), 364);
        assert_eq!(circular_distance(0, 364), 1.0);
    }

    #[test]
    fn preprocess_unit_scale() {
        let start = NaiveDate::from_ymd_opt(2019, 1, 1).unwrap();
        let mut p = synthetic_seasonal_panel(start, 500, 6, 3.0).unwrap();
        for i in 0..p.matrix.nrows() {
            for j in 0..6 {
                p.matrix[(i, j)] += ((i * 31 + j * 17) % 13) as f64 / 13.0;
            }
        }
        let (y, report) = preprocess(&p, 15.0).unwrap();
        let cells = (y.len() * 6) as f64;
        let sd = (y.data().norm_squared() / (cells - 1.0)).sqrt();
        assert!((sd - 1.0).abs() < 1e-12);
        assert!(report.scale > 0.0);
        for j in 0..6 {
            assert!(y.data().column(j).mean().abs() < 1e-12);
        }
    }

    #[test]
    fn constant_panel_is_degenerate() {
        let dates = vec!["2020-01-01".into(), "2020-01-02".into(), "2020-01-03".into()];
        let p = RawPanel::new(dates, DMatrix::from_element(3, 4, 7.3)).unwrap();
        assert!(matches!(preprocess(&p, 15.0), Err(Error::DegenerateVariance)));
    }
}
