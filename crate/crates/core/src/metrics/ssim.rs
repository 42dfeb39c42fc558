//! Masked Gaussian-window SSIM.
//!
//! Local means, variances and covariance at each pixel are computed from the
//! Gaussian window restricted to in-mask pixels and renormalized by the
//! in-mask weight. A pixel contributes to the final mean only when the
//! in-mask share of its window weight reaches `tau`. Window taps falling
//! outside the image count as out-of-mask.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{BinaryMask, BoundingBox, Frame, CHANNELS};

/// Slack applied to the inclusion test so windows whose in-mask share is
/// exactly `tau` are not lost to rounding.
pub const INCLUSION_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ColorMode {
    /// SSIM per RGB channel, then the mean of the three scores.
    #[default]
    #[value(name = "per-channel")]
    #[serde(rename = "per-channel")]
    PerChannelMean,
    /// SSIM on BT.601 luma.
    Luminance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaskedSsimConfig {
    /// Half-width of the square window; 5 gives the 11×11 window.
    pub window_radius: usize,
    pub window_sigma: f64,
    pub tau: f64,
    pub c1: f64,
    pub c2: f64,
    pub color_mode: ColorMode,
}

impl Default for MaskedSsimConfig {
    fn default() -> Self {
        Self {
            window_radius: 5,
            window_sigma: 1.5,
            tau: 0.8,
            c1: 0.01 * 0.01,
            c2: 0.03 * 0.03,
            color_mode: ColorMode::PerChannelMean,
        }
    }
}

impl MaskedSsimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::Config(format!(
                "tau must lie in (0, 1], got {}",
                self.tau
            )));
        }
        if !(self.window_sigma > 0.0 && self.window_sigma.is_finite()) {
            return Err(Error::Config(format!(
                "window sigma must be positive, got {}",
                self.window_sigma
            )));
        }
        if self.window_radius == 0 {
            return Err(Error::Config("window radius must be >= 1".into()));
        }
        if !(self.c1 >= 0.0 && self.c2 >= 0.0) {
            return Err(Error::Config(
                "stability constants must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn window_size(&self) -> usize {
        2 * self.window_radius + 1
    }
}

/// 1-D Gaussian taps normalized to sum 1. The 2-D window is their outer product.
pub fn gaussian_kernel_1d(radius: usize, sigma: f64) -> Vec<f64> {
    let r = radius as i64;
    let mut taps: Vec<f64> = (-r..=r)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= total);
    taps
}

/// Score of one metric over one region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionScore {
    /// `None` when no pixel passed the inclusion threshold.
    pub ssim: Option<f64>,
    pub mse: Option<f64>,
    pub included_pixel_count: usize,
    pub bbox: Option<BoundingBox>,
}

/// Zero-padded separable correlation with a symmetric kernel.
fn blur(src: &[f64], width: usize, height: usize, taps: &[f64]) -> Vec<f64> {
    let r = taps.len() / 2;
    let mut tmp = vec![0.0; src.len()];
    for row in 0..height {
        let line = &src[row * width..(row + 1) * width];
        let out = &mut tmp[row * width..(row + 1) * width];
        for (col, o) in out.iter_mut().enumerate() {
            if col >= r && col + r < width {
                *o = line[col - r..=col + r]
                    .iter()
                    .zip(taps)
                    .map(|(v, t)| v * t)
                    .sum();
                continue;
            }
            let lo = col.saturating_sub(r);
            let hi = (col + r).min(width - 1);
            let mut acc = 0.0;
            for c in lo..=hi {
                acc += taps[c + r - col] * line[c];
            }
            *o = acc;
        }
    }
    let mut out = vec![0.0; src.len()];
    for row in 0..height {
        let lo = row.saturating_sub(r);
        let hi = (row + r).min(height - 1);
        let dst = &mut out[row * width..(row + 1) * width];
        for rr in lo..=hi {
            let t = taps[rr + r - row];
            let line = &tmp[rr * width..(rr + 1) * width];
            for (d, s) in dst.iter_mut().zip(line) {
                *d += t * s;
            }
        }
    }
    out
}

struct Windows {
    width: usize,
    height: usize,
    taps: Vec<f64>,
    mask: Vec<f64>,
    /// In-mask window weight per pixel.
    weight: Vec<f64>,
    /// Row-major indices of pixels passing the inclusion threshold.
    included: Vec<usize>,
}

impl Windows {
    fn new(mask: &BinaryMask, cfg: &MaskedSsimConfig) -> Self {
        let (width, height) = (mask.width(), mask.height());
        let taps = gaussian_kernel_1d(cfg.window_radius, cfg.window_sigma);
        let total: f64 = taps.iter().sum::<f64>().powi(2);
        let m: Vec<f64> = mask.data().iter().map(|&b| b as u8 as f64).collect();
        let weight = blur(&m, width, height, &taps);
        let included = weight
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0 && w / total >= cfg.tau - INCLUSION_EPSILON)
            .map(|(i, _)| i)
            .collect();
        Self {
            width,
            height,
            taps,
            mask: m,
            weight,
            included,
        }
    }

    /// Mean SSIM over included pixels for one pair of planes.
    fn mean_ssim(&self, x: &[f64], y: &[f64], c1: f64, c2: f64) -> f64 {
        let (w, h, taps) = (self.width, self.height, &self.taps);
        let masked = |f: fn(f64, f64) -> f64| -> Vec<f64> {
            let v: Vec<f64> = self
                .mask
                .iter()
                .zip(x.iter().zip(y))
                .map(|(m, (a, b))| m * f(*a, *b))
                .collect();
            blur(&v, w, h, taps)
        };
        let sx = masked(|a, _| a);
        let sy = masked(|_, b| b);
        let sxx = masked(|a, _| a * a);
        let syy = masked(|_, b| b * b);
        let sxy = masked(|a, b| a * b);

        let mut total = 0.0;
        for &i in &self.included {
            let wm = self.weight[i];
            let mx = sx[i] / wm;
            let my = sy[i] / wm;
            let vx = (sxx[i] / wm - mx * mx).max(0.0);
            let vy = (syy[i] / wm - my * my).max(0.0);
            let cov = sxy[i] / wm - mx * my;
            total += ((2.0 * mx * my + c1) * (2.0 * cov + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2));
        }
        total / self.included.len() as f64
    }
}

/// Masked SSIM between `a` and `b` over `mask`.
///
/// The returned score also carries the region MSE and the mask's bounding box.
pub fn masked_ssim(
    a: &Frame,
    b: &Frame,
    mask: &BinaryMask,
    cfg: &MaskedSsimConfig,
) -> Result<RegionScore> {
    cfg.validate()?;
    if !a.same_shape(b) || a.width() != mask.width() || a.height() != mask.height() {
        return Err(Error::Shape(format!(
            "masked_ssim inputs differ: {}x{}, {}x{}, mask {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height(),
            mask.width(),
            mask.height()
        )));
    }
    if mask.is_blank() {
        return Err(Error::EmptyRegion);
    }

    let windows = Windows::new(mask, cfg);
    if windows.included.is_empty() {
        return Err(Error::NoValidWindows);
    }

    let ssim = match cfg.color_mode {
        ColorMode::PerChannelMean => {
            (0..CHANNELS)
                .map(|ch| windows.mean_ssim(&a.plane(ch), &b.plane(ch), cfg.c1, cfg.c2))
                .sum::<f64>()
                / CHANNELS as f64
        }
        ColorMode::Luminance => windows.mean_ssim(&a.luminance(), &b.luminance(), cfg.c1, cfg.c2),
    };

    Ok(RegionScore {
        ssim: Some(ssim),
        mse: Some(super::region_mse(a, b, mask)?),
        included_pixel_count: windows.included.len(),
        bbox: mask.bbox(),
    })
}

/// Number of pixels that pass the inclusion threshold for `mask`.
pub fn included_pixel_count(mask: &BinaryMask, cfg: &MaskedSsimConfig) -> usize {
    Windows::new(mask, cfg).included.len()
}
