//! Frame-to-frame stability of corrected sequences.
//!
//! Every statistic is the mean absolute per-sample difference between
//! consecutive frames, taken over pixels that belong to the chosen region in
//! both frames. It is a flicker proxy without motion compensation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{Frame, CHANNELS};
use crate::maskops::{Region, RegionMasks};

/// Ordered frames with the region masks computed for each.
#[derive(Debug, Clone)]
pub struct SequenceRecord {
    frames: Vec<Frame>,
    masks: Vec<RegionMasks>,
}

impl SequenceRecord {
    pub fn new(frames: Vec<Frame>, masks: Vec<RegionMasks>) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::Sequence(format!(
                "need at least 2 frames, got {}",
                frames.len()
            )));
        }
        if frames.len() != masks.len() {
            return Err(Error::Sequence(format!(
                "{} frames but {} mask sets",
                frames.len(),
                masks.len()
            )));
        }
        let first = &frames[0];
        for (t, (f, m)) in frames.iter().zip(&masks).enumerate() {
            if !f.same_shape(first) || m.width() != first.width() || m.height() != first.height() {
                return Err(Error::Shape(format!(
                    "frame {t} differs in size from frame 0"
                )));
            }
        }
        Ok(Self { frames, masks })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn masks(&self) -> &[RegionMasks] {
        &self.masks
    }

    pub fn transitions(&self) -> usize {
        self.frames.len() - 1
    }

    pub fn reversed(&self) -> Self {
        let mut frames = self.frames.clone();
        let mut masks = self.masks.clone();
        frames.reverse();
        masks.reverse();
        Self { frames, masks }
    }
}

/// Per-transition values plus mean and max over the defined ones.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionSeries {
    /// `None` where the two frames share no pixel of the region.
    pub values: Vec<Option<f64>>,
    pub mean: Option<f64>,
    pub max: Option<f64>,
}

impl TransitionSeries {
    fn from_values(values: Vec<Option<f64>>) -> Self {
        let present: Vec<f64> = values.iter().flatten().copied().collect();
        let mean =
            (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64);
        let max = present.iter().copied().reduce(f64::max);
        Self { values, mean, max }
    }
}

fn transition_mad(
    a: &Frame,
    b: &Frame,
    ma: &RegionMasks,
    mb: &RegionMasks,
    region: Region,
) -> Option<f64> {
    let (sa, sb) = (ma.region(region), mb.region(region));
    let mut sum = 0.0;
    let mut n = 0usize;
    for r in 0..a.height() {
        for c in 0..a.width() {
            if !(sa.get(r, c) && sb.get(r, c)) {
                continue;
            }
            let (pa, pb) = (a.pixel(r, c), b.pixel(r, c));
            for ch in 0..CHANNELS {
                sum += (pa[ch] as f64 - pb[ch] as f64).abs();
            }
            n += CHANNELS;
        }
    }
    (n > 0).then(|| sum / n as f64)
}

fn series(seq: &SequenceRecord, region: Region) -> TransitionSeries {
    let values = (0..seq.transitions())
        .map(|t| {
            transition_mad(
                &seq.frames[t],
                &seq.frames[t + 1],
                &seq.masks[t],
                &seq.masks[t + 1],
                region,
            )
        })
        .collect();
    TransitionSeries::from_values(values)
}

/// Instability inside the buffer ring.
pub fn buffer_flicker(seq: &SequenceRecord) -> TransitionSeries {
    series(seq, Region::Buffer)
}

/// Same statistic over a supervised region.
pub fn region_temporal_consistency(seq: &SequenceRecord, region: Region) -> TransitionSeries {
    series(seq, region)
}
