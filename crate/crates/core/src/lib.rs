//! Region-selective correction toolkit for generated AR frames.
//!
//! Builds safety-critical / buffer / augmentation masks from semantic label
//! maps, composites an oracle corrected frame, and scores candidates with
//! region-masked SSIM, region MSE, cropped perceptual distances and a
//! buffer-ring flicker statistic.
//!
//! ```no_run
//! use regcor::{dataset, maskops, metrics, taxonomy::ClassTaxonomy};
//!
//! let triplet = dataset::load_triplet("data".as_ref(), "sample_0000")?;
//! let masks = maskops::build_region_masks(
//!     &triplet.labels,
//!     &ClassTaxonomy::driving_default(),
//!     &maskops::MaskParams::default(),
//! )?;
//! let score = metrics::masked_ssim(
//!     &triplet.real,
//!     &triplet.candidate,
//!     &masks.critical,
//!     &metrics::MaskedSsimConfig::default(),
//! )?;
//! println!("critical SSIM {:?}", score.ssim);
//! # Ok::<(), regcor::Error>(())
//! ```

pub mod compositor;
pub mod dataset;
mod error;
pub mod frame;
pub mod harness;
pub mod maskops;
pub mod metrics;
pub mod synth;
pub mod taxonomy;
pub mod temporal;

pub use error::{Error, Result};
pub use frame::{BinaryMask, BoundingBox, Frame, LabelMap, LatentTensor, SpatialTensor};
