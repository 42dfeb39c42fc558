use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::dataset::{list_samples, load_triplet, Triplet};
use crate::error::{Error, Result};
use crate::frame::{BinaryMask, Frame};
use crate::maskops::{build_region_masks, MaskParams, Region, RegionMasks};
use crate::metrics::{
    masked_ssim, perceptual_distance, region_mse, MaskedSsimConfig, PerceptualBackend,
};
use crate::taxonomy::ClassTaxonomy;

use super::report::{aggregate, RegionReport, SampleFailure, SampleRow};

/// The three region comparisons reported per sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    /// Critical region, real vs candidate.
    CritRealVsCand,
    /// Critical region, real vs augmented (the drift baseline).
    CritRealVsAug,
    /// Augmentation region, augmented vs candidate.
    AugAugVsCand,
}

impl Comparison {
    pub const ALL: [Comparison; 3] = [
        Comparison::CritRealVsCand,
        Comparison::CritRealVsAug,
        Comparison::AugAugVsCand,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Comparison::CritRealVsCand => "crit_real_vs_cand",
            Comparison::CritRealVsAug => "crit_real_vs_aug",
            Comparison::AugAugVsCand => "aug_aug_vs_cand",
        }
    }

    pub fn region(self) -> Region {
        match self {
            Comparison::CritRealVsCand | Comparison::CritRealVsAug => Region::Critical,
            Comparison::AugAugVsCand => Region::Augmentation,
        }
    }

    fn frames(self, t: &Triplet) -> (&Frame, &Frame) {
        match self {
            Comparison::CritRealVsCand => (&t.real, &t.candidate),
            Comparison::CritRealVsAug => (&t.real, &t.augmented),
            Comparison::AugAugVsCand => (&t.augmented, &t.candidate),
        }
    }
}

#[derive(Clone, Default)]
pub struct EvalOptions {
    pub masks: MaskParams,
    /// Worker threads; 0 lets rayon choose.
    pub jobs: usize,
    pub strict: bool,
    pub perceptual: Option<Arc<dyn PerceptualBackend>>,
}

impl std::fmt::Debug for EvalOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EvalOptions")
            .field("masks", &self.masks)
            .field("jobs", &self.jobs)
            .field("strict", &self.strict)
            .field(
                "perceptual",
                &self.perceptual.as_ref().map(|b| b.name().to_owned()),
            )
            .finish()
    }
}

struct Scored {
    ssim: Option<f64>,
    mse: Option<f64>,
    perceptual: Option<f64>,
    included: usize,
}

fn score(
    sample_id: &str,
    cmp: Comparison,
    triplet: &Triplet,
    mask: &BinaryMask,
    cfg: &MaskedSsimConfig,
    backend: Option<&dyn PerceptualBackend>,
    warnings: &mut Vec<String>,
) -> Result<Scored> {
    if mask.is_blank() {
        return Ok(Scored {
            ssim: None,
            mse: None,
            perceptual: None,
            included: 0,
        });
    }
    let (a, b) = cmp.frames(triplet);
    let (ssim, mse, included) = match masked_ssim(a, b, mask, cfg) {
        Ok(s) => (s.ssim, s.mse, s.included_pixel_count),
        Err(Error::NoValidWindows) => (None, Some(region_mse(a, b, mask)?), 0),
        Err(e) => return Err(e),
    };
    let perceptual = match backend {
        None => None,
        Some(be) => {
            let key = format!("{sample_id}/{}", cmp.key());
            match perceptual_distance(a, b, mask, be, &key) {
                Ok(d) => Some(d),
                Err(e) => {
                    warnings.push(format!("{key}: {e}"));
                    None
                }
            }
        }
    };
    Ok(Scored {
        ssim,
        mse,
        perceptual,
        included,
    })
}

/// Scores one triplet against masks built from its own labels.
pub fn evaluate_triplet(
    sample_id: &str,
    triplet: &Triplet,
    taxonomy: &ClassTaxonomy,
    cfg: &MaskedSsimConfig,
    options: &EvalOptions,
) -> Result<(SampleRow, Vec<String>)> {
    let masks = build_region_masks(&triplet.labels, taxonomy, &options.masks)?;
    score_with_masks(sample_id, triplet, &masks, cfg, options)
}

fn score_with_masks(
    sample_id: &str,
    triplet: &Triplet,
    masks: &RegionMasks,
    cfg: &MaskedSsimConfig,
    options: &EvalOptions,
) -> Result<(SampleRow, Vec<String>)> {
    let mut warnings = Vec::new();
    let backend = options.perceptual.as_deref();
    let mut scored = Vec::with_capacity(3);
    for cmp in Comparison::ALL {
        scored.push(score(
            sample_id,
            cmp,
            triplet,
            masks.region(cmp.region()),
            cfg,
            backend,
            &mut warnings,
        )?);
    }
    let [rc, ra, ac] = [&scored[0], &scored[1], &scored[2]];
    let row = SampleRow {
        sample_id: sample_id.to_owned(),
        crit_pixels: masks.critical.count(),
        buffer_pixels: masks.buffer.count(),
        aug_pixels: masks.augmentation.count(),
        crit_included: rc.included,
        aug_included: ac.included,
        ssim_crit_real_vs_cand: rc.ssim,
        ssim_crit_real_vs_aug: ra.ssim,
        ssim_aug_aug_vs_cand: ac.ssim,
        mse_crit_real_vs_cand: rc.mse,
        mse_crit_real_vs_aug: ra.mse,
        mse_aug_aug_vs_cand: ac.mse,
        perceptual_crit_real_vs_cand: rc.perceptual,
        perceptual_crit_real_vs_aug: ra.perceptual,
        perceptual_aug_aug_vs_cand: ac.perceptual,
    };
    Ok((row, warnings))
}

/// Evaluates every sample under `root` and assembles a report sorted by
/// sample ID. Per-sample failures are recorded unless `options.strict`.
pub fn evaluate_dataset(
    root: &Path,
    taxonomy: &ClassTaxonomy,
    metric_cfg: &MaskedSsimConfig,
    options: &EvalOptions,
) -> Result<RegionReport> {
    metric_cfg.validate()?;
    let ids = list_samples(root)?;
    if ids.is_empty() {
        return Err(Error::EmptyDataset(root.to_path_buf()));
    }

    let run = || -> Vec<Result<(SampleRow, Vec<String>)>> {
        ids.par_iter()
            .map(|id| {
                let triplet = load_triplet(root, id)?;
                evaluate_triplet(id, &triplet, taxonomy, metric_cfg, options)
            })
            .collect()
    };
    let results = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?
        .install(run);

    let mut samples = Vec::new();
    let mut failures = Vec::new();
    let mut warnings = Vec::new();
    for (id, result) in ids.iter().zip(results) {
        match result {
            Ok((row, w)) => {
                samples.push(row);
                warnings.extend(w);
            }
            Err(e) if options.strict => {
                return Err(Error::StrictSampleFailure {
                    sample_id: id.clone(),
                    reason: e.to_string(),
                })
            }
            Err(e) => failures.push(SampleFailure {
                sample_id: id.clone(),
                error: e.to_string(),
            }),
        }
    }
    if samples.is_empty() {
        return Err(Error::EmptyDataset(root.to_path_buf()));
    }

    Ok(RegionReport {
        aggregates: aggregate(&samples),
        samples,
        failures,
        warnings,
        masks: options.masks,
        metrics: *metric_cfg,
        perceptual_backend: options.perceptual.as_ref().map(|b| b.name().to_owned()),
    })
}
