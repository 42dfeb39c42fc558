//! Batch evaluation, reporting and preview rendering.

mod evaluate;
mod preview;
mod report;

pub use evaluate::{evaluate_dataset, evaluate_triplet, Comparison, EvalOptions};
pub use preview::{panel as preview_panel, render_preview, PreviewKind};
pub use report::{
    aggregate, render_table, rows_from_csv, rows_to_csv, AggregateBlock, Aggregates, RegionReport,
    SampleFailure, SampleRow, SCHEMA_VERSION,
};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::compositor::BlendMode;
use crate::dataset::{list_samples, load_triplet_dir};
use crate::error::{Error, Result};
use crate::maskops::{build_region_masks, MaskParams, Region};
use crate::metrics::MaskedSsimConfig;
use crate::taxonomy::{ClassTaxonomy, TaxonomySpec};
use crate::temporal::{
    buffer_flicker, region_temporal_consistency, SequenceRecord, TransitionSeries,
};

/// Contents of a `--config` file. Every section is optional.
///
/// ```toml
/// [masks]
/// radius = 40
/// downsample_factor = 8
/// element = "rectangle"
///
/// [metrics]
/// tau = 0.8
/// window_sigma = 1.5
/// color_mode = "per-channel"
///
/// [composite]
/// blend = "feather"
///
/// [taxonomy]
/// critical_ids = [0, 13]
/// augmentable_ids = [2, 8]
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub masks: MaskParams,
    pub metrics: MaskedSsimConfig,
    pub composite: CompositeConfig,
    pub taxonomy: Option<TaxonomySpec>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompositeConfig {
    pub blend: BlendMode,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| match Error::io(path, e) {
            Error::NotFound(p) => Error::Config(format!("config file {} not found", p.display())),
            other => other,
        })?;
        Self::from_toml_str(&text)
    }

    /// The inline taxonomy when present, otherwise the driving default.
    pub fn taxonomy(&self) -> Result<ClassTaxonomy> {
        match &self.taxonomy {
            Some(spec) => ClassTaxonomy::from_spec(spec),
            None => Ok(ClassTaxonomy::driving_default()),
        }
    }
}

/// Loads a sequence directory of `frame_NNNN` triplet subdirectories; the
/// candidate frames form the sequence and masks come from each frame's labels.
pub fn load_sequence(
    dir: &Path,
    taxonomy: &ClassTaxonomy,
    params: &MaskParams,
) -> Result<SequenceRecord> {
    let names: Vec<String> = list_samples(dir)?
        .into_iter()
        .filter(|n| n.starts_with("frame_"))
        .collect();
    let mut frames = Vec::with_capacity(names.len());
    let mut masks = Vec::with_capacity(names.len());
    for name in &names {
        let t = load_triplet_dir(&dir.join(name))?;
        masks.push(build_region_masks(&t.labels, taxonomy, params)?);
        frames.push(t.candidate);
    }
    SequenceRecord::new(frames, masks)
}

/// Buffer flicker next to critical and augmentation consistency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlickerReport {
    pub buffer: TransitionSeries,
    pub critical: TransitionSeries,
    pub augmentation: TransitionSeries,
}

impl FlickerReport {
    pub fn compute(seq: &SequenceRecord) -> Self {
        Self {
            buffer: buffer_flicker(seq),
            critical: region_temporal_consistency(seq, Region::Critical),
            augmentation: region_temporal_consistency(seq, Region::Augmentation),
        }
    }

    /// One row per transition; absent values are empty cells.
    pub fn to_csv(&self) -> String {
        let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = String::from("transition,buffer,critical,augmentation\n");
        for t in 0..self.buffer.values.len() {
            out.push_str(&format!(
                "{t},{},{},{}\n",
                cell(self.buffer.values[t]),
                cell(self.critical.values[t]),
                cell(self.augmentation.values[t])
            ));
        }
        out
    }
}
