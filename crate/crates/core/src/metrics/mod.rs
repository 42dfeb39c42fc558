//! Region-restricted quality metrics.

mod perceptual;
mod ssim;

pub use perceptual::{
    mask_bbox_crop, perceptual_distance, ExecutableBackend, MeanAbsDiff, PerceptualBackend,
    SidecarBackend, PERCEPTUAL_SIDECAR,
};
pub use ssim::{
    gaussian_kernel_1d, included_pixel_count, masked_ssim, ColorMode, MaskedSsimConfig,
    RegionScore, INCLUSION_EPSILON,
};

use crate::error::{Error, Result};
use crate::frame::{BinaryMask, SpatialTensor};

/// Mean squared difference over masked locations and all channels.
///
/// Works on frames or latent tensors; pass the mask at the tensors' spatial
/// resolution.
pub fn region_mse<A, B>(a: &A, b: &B, mask: &BinaryMask) -> Result<f64>
where
    A: SpatialTensor + ?Sized,
    B: SpatialTensor + ?Sized,
{
    if a.width() != b.width()
        || a.height() != b.height()
        || a.channels() != b.channels()
        || a.width() != mask.width()
        || a.height() != mask.height()
    {
        return Err(Error::Shape(format!(
            "region_mse inputs differ: {}x{}x{}, {}x{}x{}, mask {}x{}",
            a.width(),
            a.height(),
            a.channels(),
            b.width(),
            b.height(),
            b.channels(),
            mask.width(),
            mask.height()
        )));
    }
    let mut sum = 0.0;
    let mut n = 0usize;
    for row in 0..mask.height() {
        for col in 0..mask.width() {
            if !mask.get(row, col) {
                continue;
            }
            for ch in 0..a.channels() {
                let d = a.value(row, col, ch) - b.value(row, col, ch);
                sum += d * d;
            }
            n += a.channels();
        }
    }
    if n == 0 {
        return Err(Error::EmptyRegion);
    }
    Ok(sum / n as f64)
}
