//! Oracle corrected frame: real content on critical pixels, augmented content
//! on augmentation pixels, and a deterministic fill for the buffer ring.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{BinaryMask, Frame};
use crate::maskops::RegionMasks;

/// How buffer pixels are filled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BlendMode {
    HardReal,
    HardAug,
    /// Linear ramp from real at the critical edge to augmented at the
    /// augmentation edge, weighted by Chebyshev distances to both regions.
    #[default]
    Feather,
}

/// Chebyshev (chessboard) distance from every pixel to the nearest set pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceField {
    width: usize,
    height: usize,
    data: Vec<u32>,
}

impl DistanceField {
    /// Distance reported everywhere when the source mask is blank.
    pub const UNREACHABLE: u32 = u32::MAX;

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.data[row * self.width + col]
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }
}

/// Two-pass chamfer transform with unit weights on all eight neighbours,
/// which is exact for the Chebyshev metric.
pub fn distance_transform(mask: &BinaryMask) -> DistanceField {
    let (w, h) = (mask.width(), mask.height());
    let inf = DistanceField::UNREACHABLE;
    let mut d: Vec<u32> = mask
        .data()
        .iter()
        .map(|&b| if b { 0 } else { inf })
        .collect();
    let relax = |d: &mut Vec<u32>, i: usize, j: usize| {
        let cand = d[j].saturating_add(1);
        if cand < d[i] {
            d[i] = cand;
        }
    };

    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            if c > 0 {
                relax(&mut d, i, i - 1);
            }
            if r > 0 {
                let up = i - w;
                relax(&mut d, i, up);
                if c > 0 {
                    relax(&mut d, i, up - 1);
                }
                if c + 1 < w {
                    relax(&mut d, i, up + 1);
                }
            }
        }
    }
    for r in (0..h).rev() {
        for c in (0..w).rev() {
            let i = r * w + c;
            if c + 1 < w {
                relax(&mut d, i, i + 1);
            }
            if r + 1 < h {
                let down = i + w;
                relax(&mut d, i, down);
                if c > 0 {
                    relax(&mut d, i, down - 1);
                }
                if c + 1 < w {
                    relax(&mut d, i, down + 1);
                }
            }
        }
    }
    DistanceField {
        width: w,
        height: h,
        data: d,
    }
}

/// Per-pixel weight of the augmented frame inside the buffer under
/// [`BlendMode::Feather`]; `d_crit / (d_crit + d_aug)`. With no
/// augmentation pixels anywhere the buffer stays real.
pub fn feather_weights(masks: &RegionMasks) -> Vec<f64> {
    let to_crit = distance_transform(&masks.critical);
    let to_aug = distance_transform(&masks.augmentation);
    let (w, h) = (masks.width(), masks.height());
    let mut out = vec![0.0; w * h];
    for r in 0..h {
        for c in 0..w {
            if !masks.buffer.get(r, c) {
                continue;
            }
            let dc = to_crit.get(r, c);
            let da = to_aug.get(r, c);
            out[r * w + c] = match (dc, da) {
                (_, DistanceField::UNREACHABLE) => 0.0,
                (DistanceField::UNREACHABLE, _) => 1.0,
                (dc, da) => dc as f64 / (dc as f64 + da as f64),
            };
        }
    }
    out
}

/// Builds the ideal corrected frame. Ignore pixels copy `real`.
pub fn oracle_composite(
    real: &Frame,
    augmented: &Frame,
    masks: &RegionMasks,
    blend: BlendMode,
) -> Result<Frame> {
    if !real.same_shape(augmented)
        || real.width() != masks.width()
        || real.height() != masks.height()
    {
        return Err(Error::Shape(format!(
            "composite inputs differ: real {}x{}, aug {}x{}, masks {}x{}",
            real.width(),
            real.height(),
            augmented.width(),
            augmented.height(),
            masks.width(),
            masks.height()
        )));
    }
    let weights = match blend {
        BlendMode::Feather => Some(feather_weights(masks)),
        _ => None,
    };
    let w = real.width();
    Frame::from_fn(w, real.height(), |r, c| {
        let (x, y) = (real.pixel(r, c), augmented.pixel(r, c));
        if masks.augmentation.get(r, c) {
            return y;
        }
        if !masks.buffer.get(r, c) {
            return x;
        }
        match (blend, &weights) {
            (BlendMode::HardReal, _) => x,
            (BlendMode::HardAug, _) => y,
            (BlendMode::Feather, Some(wts)) => {
                let t = wts[r * w + c];
                let mut px = [0.0f32; 3];
                for ch in 0..3 {
                    let (lo, hi) = (x[ch].min(y[ch]), x[ch].max(y[ch]));
                    let v = ((1.0 - t) * x[ch] as f64 + t * y[ch] as f64) as f32;
                    px[ch] = v.clamp(lo, hi);
                }
                px
            }
            (BlendMode::Feather, None) => unreachable!("weights computed for feather"),
        }
    })
}
