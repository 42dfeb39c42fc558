//! Per-sample rows, aggregates and their serialized forms.
//!
//! `report.csv` holds one row per sample at full float precision, so the
//! aggregate block in `report.json` can be recomputed from it exactly.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maskops::MaskParams;
use crate::metrics::MaskedSsimConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub sample_id: String,
    pub crit_pixels: usize,
    pub buffer_pixels: usize,
    pub aug_pixels: usize,
    pub crit_included: usize,
    pub aug_included: usize,
    pub ssim_crit_real_vs_cand: Option<f64>,
    pub ssim_crit_real_vs_aug: Option<f64>,
    pub ssim_aug_aug_vs_cand: Option<f64>,
    pub mse_crit_real_vs_cand: Option<f64>,
    pub mse_crit_real_vs_aug: Option<f64>,
    pub mse_aug_aug_vs_cand: Option<f64>,
    pub perceptual_crit_real_vs_cand: Option<f64>,
    pub perceptual_crit_real_vs_aug: Option<f64>,
    pub perceptual_aug_aug_vs_cand: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleFailure {
    pub sample_id: String,
    pub error: String,
}

/// One aggregate over all rows; each metric skips rows where it is absent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregateBlock {
    pub samples: usize,
    pub ssim_crit_real_vs_cand: Option<f64>,
    pub ssim_crit_real_vs_aug: Option<f64>,
    pub ssim_aug_aug_vs_cand: Option<f64>,
    pub mse_crit_real_vs_cand: Option<f64>,
    pub mse_crit_real_vs_aug: Option<f64>,
    pub mse_aug_aug_vs_cand: Option<f64>,
    pub perceptual_crit_real_vs_cand: Option<f64>,
    pub perceptual_crit_real_vs_aug: Option<f64>,
    pub perceptual_aug_aug_vs_cand: Option<f64>,
}

/// `mean_of_samples` averages per-sample scores. `pooled` weights SSIM by
/// included-pixel counts and MSE/perceptual by region pixel counts, which
/// equals averaging over every included window of the whole dataset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub mean_of_samples: AggregateBlock,
    pub pooled: AggregateBlock,
}

fn weighted_mean(pairs: impl Iterator<Item = (Option<f64>, usize)>) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (value, weight) in pairs {
        if let Some(v) = value {
            num += v * weight as f64;
            den += weight as f64;
        }
    }
    (den > 0.0).then(|| num / den)
}

pub fn aggregate(rows: &[SampleRow]) -> Aggregates {
    macro_rules! block {
        ($weight_crit:expr, $weight_aug:expr) => {{
            let wc = $weight_crit;
            let wa = $weight_aug;
            AggregateBlock {
                samples: rows.len(),
                ssim_crit_real_vs_cand: weighted_mean(
                    rows.iter().map(|r| (r.ssim_crit_real_vs_cand, wc(r, true))),
                ),
                ssim_crit_real_vs_aug: weighted_mean(
                    rows.iter().map(|r| (r.ssim_crit_real_vs_aug, wc(r, true))),
                ),
                ssim_aug_aug_vs_cand: weighted_mean(
                    rows.iter().map(|r| (r.ssim_aug_aug_vs_cand, wa(r, true))),
                ),
                mse_crit_real_vs_cand: weighted_mean(
                    rows.iter().map(|r| (r.mse_crit_real_vs_cand, wc(r, false))),
                ),
                mse_crit_real_vs_aug: weighted_mean(
                    rows.iter().map(|r| (r.mse_crit_real_vs_aug, wc(r, false))),
                ),
                mse_aug_aug_vs_cand: weighted_mean(
                    rows.iter().map(|r| (r.mse_aug_aug_vs_cand, wa(r, false))),
                ),
                perceptual_crit_real_vs_cand: weighted_mean(
                    rows.iter()
                        .map(|r| (r.perceptual_crit_real_vs_cand, wc(r, false))),
                ),
                perceptual_crit_real_vs_aug: weighted_mean(
                    rows.iter()
                        .map(|r| (r.perceptual_crit_real_vs_aug, wc(r, false))),
                ),
                perceptual_aug_aug_vs_cand: weighted_mean(
                    rows.iter()
                        .map(|r| (r.perceptual_aug_aug_vs_cand, wa(r, false))),
                ),
            }
        }};
    }
    let unit = |_: &SampleRow, _: bool| 1usize;
    let crit = |r: &SampleRow, windows: bool| {
        if windows {
            r.crit_included
        } else {
            r.crit_pixels
        }
    };
    let aug = |r: &SampleRow, windows: bool| {
        if windows {
            r.aug_included
        } else {
            r.aug_pixels
        }
    };
    Aggregates {
        mean_of_samples: block!(unit, unit),
        pooled: block!(crit, aug),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub samples: Vec<SampleRow>,
    pub failures: Vec<SampleFailure>,
    pub warnings: Vec<String>,
    pub aggregates: Aggregates,
    pub masks: MaskParams,
    pub metrics: MaskedSsimConfig,
    pub perceptual_backend: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct JsonEnvelope<R> {
    schema_version: u32,
    #[serde(flatten)]
    report: R,
}

impl RegionReport {
    pub fn to_json(&self) -> String {
        let env = JsonEnvelope {
            schema_version: SCHEMA_VERSION,
            report: self,
        };
        let mut s = serde_json::to_string_pretty(&env).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let env: JsonEnvelope<RegionReport> =
            serde_json::from_str(text).map_err(|e| Error::Report(e.to_string()))?;
        if env.schema_version != SCHEMA_VERSION {
            return Err(Error::Report(format!(
                "unsupported schema version {}",
                env.schema_version
            )));
        }
        Ok(env.report)
    }

    pub fn to_csv(&self) -> String {
        rows_to_csv(&self.samples)
    }

    pub fn to_table(&self) -> String {
        render_table(&self.aggregates, self.failures.len())
    }

    /// Writes `report.json`, `report.csv` and `table.txt` into `dir`.
    pub fn write_all(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, body) in [
            ("report.json", self.to_json()),
            ("report.csv", self.to_csv()),
            ("table.txt", self.to_table()),
        ] {
            let p = dir.join(name);
            std::fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
        }
        Ok(())
    }
}

pub fn rows_to_csv(rows: &[SampleRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory csv");
    }
    if rows.is_empty() {
        // Header only.
        let mut h = csv::Writer::from_writer(Vec::new());
        h.write_record(SampleRow::COLUMNS).expect("in-memory csv");
        return String::from_utf8(h.into_inner().expect("flush")).expect("utf8");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

pub fn rows_from_csv(text: &str) -> Result<Vec<SampleRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize()
        .map(|row| row.map_err(|e| Error::Report(format!("csv: {e}"))))
        .collect()
}

impl SampleRow {
    pub const COLUMNS: [&'static str; 15] = [
        "sample_id",
        "crit_pixels",
        "buffer_pixels",
        "aug_pixels",
        "crit_included",
        "aug_included",
        "ssim_crit_real_vs_cand",
        "ssim_crit_real_vs_aug",
        "ssim_aug_aug_vs_cand",
        "mse_crit_real_vs_cand",
        "mse_crit_real_vs_aug",
        "mse_aug_aug_vs_cand",
        "perceptual_crit_real_vs_cand",
        "perceptual_crit_real_vs_aug",
        "perceptual_aug_aug_vs_cand",
    ];
}

fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.4}"),
        None => "n/a".to_owned(),
    }
}

fn render_block(out: &mut String, title: &str, b: &AggregateBlock) {
    let _ = writeln!(out, "{title} (n = {})", b.samples);
    let _ = writeln!(out, "{:<12}{:^30}{:^16}", "", "Critical", "Augmented");
    let _ = writeln!(
        out,
        "{:<12}{:>15}{:>15}{:>16}",
        "", "Real vs Cand.", "Real vs Aug.", "Aug. vs Cand."
    );
    let metric_rows = [
        (
            "SSIM",
            b.ssim_crit_real_vs_cand,
            b.ssim_crit_real_vs_aug,
            b.ssim_aug_aug_vs_cand,
        ),
        (
            "Perceptual",
            b.perceptual_crit_real_vs_cand,
            b.perceptual_crit_real_vs_aug,
            b.perceptual_aug_aug_vs_cand,
        ),
        (
            "MSE",
            b.mse_crit_real_vs_cand,
            b.mse_crit_real_vs_aug,
            b.mse_aug_aug_vs_cand,
        ),
    ];
    for (name, a, r, g) in metric_rows {
        let _ = writeln!(
            out,
            "{name:<12}{:>15}{:>15}{:>16}",
            cell(a),
            cell(r),
            cell(g)
        );
    }
}

/// Human-readable table with both aggregation schemes.
pub fn render_table(aggregates: &Aggregates, failures: usize) -> String {
    let mut out = String::new();
    render_block(&mut out, "Mean of samples", &aggregates.mean_of_samples);
    out.push('\n');
    render_block(&mut out, "Pooled", &aggregates.pooled);
    if failures > 0 {
        let _ = writeln!(out, "\n{failures} sample(s) failed; see report.json");
    }
    out
}
