use image::{Rgb, RgbImage};

use crate::dataset::{frame_to_rgb8, quantize, Triplet};
use crate::frame::{BinaryMask, Frame};
use crate::maskops::{Region, RegionMasks};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PreviewKind {
    /// Region tints over the real frame, buffer painted black.
    Overlay,
    /// Latent masks upscaled to image size, out-of-region pixels gray.
    Latent,
    /// real | aug | cand side by side.
    Panel,
}

const CRITICAL_TINT: [f32; 3] = [1.0, 0.25, 0.25];
const AUGMENT_TINT: [f32; 3] = [0.25, 0.85, 0.35];
const GRAY: u8 = 128;
const GUTTER: u32 = 4;

fn tint(px: [f32; 3], color: [f32; 3]) -> Rgb<u8> {
    Rgb([
        quantize(0.5 * px[0] + 0.5 * color[0]),
        quantize(0.5 * px[1] + 0.5 * color[1]),
        quantize(0.5 * px[2] + 0.5 * color[2]),
    ])
}

fn overlay(real: &Frame, masks: &RegionMasks) -> RgbImage {
    RgbImage::from_fn(real.width() as u32, real.height() as u32, |c, r| {
        let (r, c) = (r as usize, c as usize);
        let px = real.pixel(r, c);
        if masks.buffer.get(r, c) {
            Rgb([0, 0, 0])
        } else if masks.critical.get(r, c) {
            tint(px, CRITICAL_TINT)
        } else if masks.augmentation.get(r, c) {
            tint(px, AUGMENT_TINT)
        } else {
            Rgb(px.map(quantize))
        }
    })
}

fn upscaled(latent: &BinaryMask, factor: usize, r: usize, c: usize) -> bool {
    latent.get(r / factor, c / factor)
}

fn latent_views(real: &Frame, masks: &RegionMasks) -> Vec<(String, RgbImage)> {
    let f = masks.downsample_factor as usize;
    let (w, h) = (real.width() as u32, real.height() as u32);
    let mut out = Vec::new();
    for (name, region) in [
        ("critical", Region::Critical),
        ("augmentation", Region::Augmentation),
    ] {
        let latent = masks.latent(region);
        let mask_img = RgbImage::from_fn(w, h, |c, r| {
            if upscaled(latent, f, r as usize, c as usize) {
                Rgb([255, 255, 255])
            } else {
                Rgb([GRAY; 3])
            }
        });
        let masked = RgbImage::from_fn(w, h, |c, r| {
            let (r, c) = (r as usize, c as usize);
            if upscaled(latent, f, r, c) {
                Rgb(real.pixel(r, c).map(quantize))
            } else {
                Rgb([GRAY; 3])
            }
        });
        out.push((format!("latent_{name}_mask.png"), mask_img));
        out.push((format!("latent_{name}_masked.png"), masked));
    }
    out
}

/// Horizontal strip of frames separated by white gutters.
pub fn panel(frames: &[&Frame]) -> RgbImage {
    let w = frames[0].width() as u32;
    let h = frames[0].height() as u32;
    let n = frames.len() as u32;
    let mut img = RgbImage::from_pixel(n * w + (n - 1) * GUTTER, h, Rgb([255, 255, 255]));
    for (i, f) in frames.iter().enumerate() {
        let tile = frame_to_rgb8(f);
        image::imageops::replace(&mut img, &tile, (i as u32 * (w + GUTTER)) as i64, 0);
    }
    img
}

/// Renders preview images as `(file name, image)` pairs.
pub fn render_preview(
    sample: &Triplet,
    masks: &RegionMasks,
    kind: PreviewKind,
) -> Vec<(String, RgbImage)> {
    match kind {
        PreviewKind::Overlay => vec![("overlay.png".into(), overlay(&sample.real, masks))],
        PreviewKind::Latent => latent_views(&sample.real, masks),
        PreviewKind::Panel => vec![(
            "panel.png".into(),
            panel(&[&sample.real, &sample.augmented, &sample.candidate]),
        )],
    }
}
