//! Triplet ingestion and PNG encoding.
//!
//! A dataset is a directory of samples, each holding
//! `real.png`, `aug.png`, `cand.png` and a single-channel `labels.png`.

use std::path::{Path, PathBuf};

use image::{DynamicImage, GrayImage, ImageBuffer, Luma, Rgb, RgbImage};

use crate::error::{Error, Result};
use crate::frame::{BinaryMask, Frame, LabelMap};

pub const REAL_FILE: &str = "real.png";
pub const AUG_FILE: &str = "aug.png";
pub const CAND_FILE: &str = "cand.png";
pub const LABELS_FILE: &str = "labels.png";

/// Real observation, augmented frame, candidate correction, and the labels
/// computed on the real observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Triplet {
    pub real: Frame,
    pub augmented: Frame,
    pub candidate: Frame,
    pub labels: LabelMap,
}

impl Triplet {
    pub fn new(real: Frame, augmented: Frame, candidate: Frame, labels: LabelMap) -> Result<Self> {
        if !real.same_shape(&augmented) || !real.same_shape(&candidate) {
            return Err(Error::Shape(format!(
                "frames differ: real {}x{}, aug {}x{}, cand {}x{}",
                real.width(),
                real.height(),
                augmented.width(),
                augmented.height(),
                candidate.width(),
                candidate.height()
            )));
        }
        if labels.width() != real.width() || labels.height() != real.height() {
            return Err(Error::Shape(format!(
                "label map {}x{} does not match {}x{} frames",
                labels.width(),
                labels.height(),
                real.width(),
                real.height()
            )));
        }
        Ok(Self {
            real,
            augmented,
            candidate,
            labels,
        })
    }

    pub fn width(&self) -> usize {
        self.real.width()
    }

    pub fn height(&self) -> usize {
        self.real.height()
    }
}

fn open_image(path: &Path) -> Result<DynamicImage> {
    if !path.is_file() {
        return Err(Error::NotFound(path.to_path_buf()));
    }
    let reader = image::ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;
    reader.decode().map_err(|e| Error::Format {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

/// Decodes an RGB image; 8-bit data is divided by 255, 16-bit by 65535.
pub fn read_frame(path: &Path) -> Result<Frame> {
    let img = open_image(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data: Vec<f32> = match img {
        DynamicImage::ImageRgb16(_)
        | DynamicImage::ImageRgba16(_)
        | DynamicImage::ImageLuma16(_)
        | DynamicImage::ImageLumaA16(_) => img
            .to_rgb16()
            .into_raw()
            .into_iter()
            .map(|v| v as f32 / 65535.0)
            .collect(),
        _ => img
            .to_rgb8()
            .into_raw()
            .into_iter()
            .map(|v| v as f32 / 255.0)
            .collect(),
    };
    Frame::new(w, h, data)
}

/// Decodes a single-channel 8- or 16-bit label image.
pub fn read_labels(path: &Path) -> Result<LabelMap> {
    let img = open_image(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data: Vec<u32> = match img {
        DynamicImage::ImageLuma8(buf) => buf.into_raw().into_iter().map(u32::from).collect(),
        DynamicImage::ImageLuma16(buf) => buf.into_raw().into_iter().map(u32::from).collect(),
        other => {
            return Err(Error::Format {
                path: path.to_path_buf(),
                msg: format!("label map must be single-channel, got {:?}", other.color()),
            })
        }
    };
    LabelMap::new(w, h, data)
}

/// Loads and validates `<root>/<sample_id>/{real,aug,cand,labels}.png`.
pub fn load_triplet(dataset_root: &Path, sample_id: &str) -> Result<Triplet> {
    load_triplet_dir(&dataset_root.join(sample_id))
}

pub fn load_triplet_dir(dir: &Path) -> Result<Triplet> {
    if !dir.is_dir() {
        return Err(Error::NotFound(dir.to_path_buf()));
    }
    let real = read_frame(&dir.join(REAL_FILE))?;
    let augmented = read_frame(&dir.join(AUG_FILE))?;
    let candidate = read_frame(&dir.join(CAND_FILE))?;
    let labels = read_labels(&dir.join(LABELS_FILE))?;
    Triplet::new(real, augmented, candidate, labels)
}

/// Sorted names of the sample subdirectories under `root`.
pub fn list_samples(root: &Path) -> Result<Vec<String>> {
    let entries = std::fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    let mut ids = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(root, e))?;
        if entry.path().is_dir() {
            if let Some(name) = entry.file_name().to_str() {
                ids.push(name.to_owned());
            }
        }
    }
    ids.sort();
    Ok(ids)
}

#[inline]
pub fn quantize(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn frame_to_rgb8(frame: &Frame) -> RgbImage {
    let raw: Vec<u8> = frame.data().iter().map(|&v| quantize(v)).collect();
    ImageBuffer::<Rgb<u8>, _>::from_raw(frame.width() as u32, frame.height() as u32, raw)
        .expect("buffer length matches dimensions")
}

fn save_png<P, C>(path: &Path, img: &ImageBuffer<P, C>) -> Result<()>
where
    P: image::PixelWithColorType,
    [P::Subpixel]: image::EncodableLayout,
    C: std::ops::Deref<Target = [P::Subpixel]>,
{
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(io) => Error::io(path, io),
            other => Error::Format {
                path: path.to_path_buf(),
                msg: other.to_string(),
            },
        })
}

pub fn write_rgb8(path: &Path, img: &RgbImage) -> Result<()> {
    save_png(path, img)
}

/// Encodes a frame as 8-bit RGB PNG.
pub fn write_frame(path: &Path, frame: &Frame) -> Result<()> {
    save_png(path, &frame_to_rgb8(frame))
}

/// Writes labels as 8-bit grayscale when every ID fits, 16-bit otherwise.
pub fn write_labels(path: &Path, labels: &LabelMap) -> Result<()> {
    let (w, h) = (labels.width() as u32, labels.height() as u32);
    let max = labels.data().iter().copied().max().unwrap_or(0);
    if max <= u8::MAX as u32 {
        let raw = labels.data().iter().map(|&v| v as u8).collect();
        save_png(path, &GrayImage::from_raw(w, h, raw).expect("dims"))
    } else if max <= u16::MAX as u32 {
        let raw = labels.data().iter().map(|&v| v as u16).collect();
        save_png(
            path,
            &ImageBuffer::<Luma<u16>, Vec<u16>>::from_raw(w, h, raw).expect("dims"),
        )
    } else {
        Err(Error::InvalidArgument(format!(
            "label ID {max} does not fit a 16-bit PNG"
        )))
    }
}

pub fn mask_to_gray(mask: &BinaryMask) -> GrayImage {
    let raw = mask
        .data()
        .iter()
        .map(|&b| if b { 255 } else { 0 })
        .collect();
    GrayImage::from_raw(mask.width() as u32, mask.height() as u32, raw).expect("dims")
}

/// Writes a mask as a single-channel {0, 255} PNG.
pub fn write_mask(path: &Path, mask: &BinaryMask) -> Result<()> {
    save_png(path, &mask_to_gray(mask))
}

/// Reads a single-channel mask; any non-zero value is set.
pub fn read_mask(path: &Path) -> Result<BinaryMask> {
    let img = open_image(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data = match img {
        DynamicImage::ImageLuma8(buf) => buf.into_raw().into_iter().map(|v| v != 0).collect(),
        DynamicImage::ImageLuma16(buf) => buf.into_raw().into_iter().map(|v| v != 0).collect(),
        other => {
            return Err(Error::Format {
                path: path.to_path_buf(),
                msg: format!("mask must be single-channel, got {:?}", other.color()),
            })
        }
    };
    BinaryMask::new(w, h, data)
}

/// Writes a triplet in the dataset layout under `dir`.
pub fn write_triplet(dir: &Path, triplet: &Triplet) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_frame(&dir.join(REAL_FILE), &triplet.real)?;
    write_frame(&dir.join(AUG_FILE), &triplet.augmented)?;
    write_frame(&dir.join(CAND_FILE), &triplet.candidate)?;
    write_labels(&dir.join(LABELS_FILE), &triplet.labels)?;
    Ok(dir.to_path_buf())
}
