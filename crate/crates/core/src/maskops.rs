//! Region mask construction: critical mask extraction, upward/lateral
//! dilation into a buffer ring, the augmentation complement, and
//! nearest-neighbour reduction to latent resolution.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{BinaryMask, LabelMap};
use crate::taxonomy::{ClassRole, ClassTaxonomy};

/// Selectable structuring element shapes. Both extend up to `R` rows upward
/// and `R` columns to either side, never downward.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ElementShape {
    #[default]
    Rectangle,
    HalfDisc,
}

/// Set of `(drow, dcol)` displacements a set pixel projects onto.
/// Rows grow downward, so `drow < 0` points up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    offsets: Vec<(i32, i32)>,
}

impl StructuringElement {
    pub fn from_offsets(mut offsets: Vec<(i32, i32)>) -> Result<Self> {
        offsets.sort_unstable();
        offsets.dedup();
        if !offsets.contains(&(0, 0)) {
            return Err(Error::InvalidArgument(
                "structuring element must contain (0, 0)".into(),
            ));
        }
        Ok(Self { offsets })
    }

    /// `drow ∈ [-R, 0]`, `dcol ∈ [-R, R]`.
    pub fn upward_rectangle(radius: u32) -> Self {
        let r = radius as i32;
        let offsets = (-r..=0)
            .flat_map(|dr| (-r..=r).map(move |dc| (dr, dc)))
            .collect();
        Self { offsets }
    }

    /// Upper half of the disc `drow² + dcol² ≤ R²`.
    pub fn upward_half_disc(radius: u32) -> Self {
        let r = radius as i32;
        let offsets = (-r..=0)
            .flat_map(|dr| (-r..=r).map(move |dc| (dr, dc)))
            .filter(|&(dr, dc)| dr * dr + dc * dc <= r * r)
            .collect();
        Self { offsets }
    }

    pub fn for_shape(shape: ElementShape, radius: u32) -> Self {
        match shape {
            ElementShape::Rectangle => Self::upward_rectangle(radius),
            ElementShape::HalfDisc => Self::upward_half_disc(radius),
        }
    }

    pub fn offsets(&self) -> &[(i32, i32)] {
        &self.offsets
    }

    /// Checks the element never reaches downward and stays within `radius`.
    pub fn check_radius(&self, radius: u32) -> Result<()> {
        let r = radius as i32;
        match self
            .offsets
            .iter()
            .find(|&&(dr, dc)| dr > 0 || dr < -r || dc.abs() > r)
        {
            Some(off) => Err(Error::InvalidArgument(format!(
                "offset {off:?} outside the upward element bounds for R={radius}"
            ))),
            None => Ok(()),
        }
    }

    /// Offsets grouped by row displacement into contiguous column runs.
    fn row_runs(&self) -> Vec<(i32, Vec<(i32, i32)>)> {
        let mut by_row: BTreeMap<i32, Vec<i32>> = BTreeMap::new();
        for &(dr, dc) in &self.offsets {
            by_row.entry(dr).or_default().push(dc);
        }
        by_row
            .into_iter()
            .map(|(dr, mut cols)| {
                cols.sort_unstable();
                let mut runs: Vec<(i32, i32)> = Vec::new();
                for dc in cols {
                    match runs.last_mut() {
                        Some((_, hi)) if *hi + 1 == dc => *hi = dc,
                        _ => runs.push((dc, dc)),
                    }
                }
                (dr, runs)
            })
            .collect()
    }
}

/// `mask ⊕ element`: output `(r, c)` is set iff some offset `(dr, dc)` has
/// `mask(r - dr, c - dc)` set. Sources outside the image count as unset.
pub fn asymmetric_dilate(
    mask: &BinaryMask,
    radius_px: u32,
    element: &StructuringElement,
) -> Result<BinaryMask> {
    if radius_px == 0 {
        return Err(Error::InvalidArgument(
            "dilation radius must be >= 1".into(),
        ));
    }
    element.check_radius(radius_px)?;

    let (w, h) = (mask.width(), mask.height());
    // prefix[row][c] = number of set pixels in row before column c.
    let stride = w + 1;
    let mut prefix = vec![0u32; h * stride];
    for row in 0..h {
        let base = row * stride;
        for col in 0..w {
            prefix[base + col + 1] = prefix[base + col] + mask.get(row, col) as u32;
        }
    }
    let runs = element.row_runs();

    let mut out = BinaryMask::empty(w, h)?;
    for row in 0..h {
        for col in 0..w {
            let hit = runs.iter().any(|(dr, cols)| {
                let src_row = row as i64 - *dr as i64;
                if src_row < 0 || src_row >= h as i64 {
                    return false;
                }
                let base = src_row as usize * stride;
                cols.iter().any(|&(lo, hi)| {
                    // Source columns c - hi ..= c - lo, clipped to the image.
                    let first = (col as i64 - hi as i64).max(0);
                    let last = (col as i64 - lo as i64).min(w as i64 - 1);
                    first <= last
                        && prefix[base + last as usize + 1] > prefix[base + first as usize]
                })
            });
            if hit {
                out.set(row, col, true);
            }
        }
    }
    Ok(out)
}

fn role_mask(labels: &LabelMap, taxonomy: &ClassTaxonomy, wanted: ClassRole) -> Result<BinaryMask> {
    let mut out = BinaryMask::empty(labels.width(), labels.height())?;
    for row in 0..labels.height() {
        for col in 0..labels.width() {
            let id = labels.get(row, col);
            let role = taxonomy.role(id).ok_or(Error::Taxonomy { id, row, col })?;
            if role == wanted {
                out.set(row, col, true);
            }
        }
    }
    Ok(out)
}

/// Pixels whose class is critical. Unknown IDs are an error.
pub fn critical_mask(labels: &LabelMap, taxonomy: &ClassTaxonomy) -> Result<BinaryMask> {
    role_mask(labels, taxonomy, ClassRole::Critical)
}

/// Pixels whose class is in the ignore set.
pub fn ignore_mask(labels: &LabelMap, taxonomy: &ClassTaxonomy) -> Result<BinaryMask> {
    role_mask(labels, taxonomy, ClassRole::Ignore)
}

/// Nearest-neighbour reduction sampling the top-left pixel of each
/// `factor × factor` cell.
pub fn downsample_mask(mask: &BinaryMask, factor: u32) -> Result<BinaryMask> {
    let f = factor as usize;
    if f == 0 {
        return Err(Error::InvalidArgument(
            "downsample factor must be >= 1".into(),
        ));
    }
    if !mask.width().is_multiple_of(f) || !mask.height().is_multiple_of(f) {
        return Err(Error::Shape(format!(
            "{}x{} is not divisible by downsample factor {factor}",
            mask.width(),
            mask.height()
        )));
    }
    BinaryMask::from_fn(mask.width() / f, mask.height() / f, |r, c| {
        mask.get(r * f, c * f)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaskParams {
    pub radius: u32,
    pub downsample_factor: u32,
    pub element: ElementShape,
}

impl Default for MaskParams {
    fn default() -> Self {
        Self {
            radius: 40,
            downsample_factor: 8,
            element: ElementShape::Rectangle,
        }
    }
}

/// Named region of a [`RegionMasks`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Critical,
    Buffer,
    Augmentation,
}

/// Critical, buffer and augmentation masks at image and latent resolution.
/// Together with `ignore` the three regions partition the image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionMasks {
    pub critical: BinaryMask,
    pub augmentation: BinaryMask,
    pub buffer: BinaryMask,
    pub ignore: BinaryMask,
    pub latent_critical: BinaryMask,
    pub latent_augmentation: BinaryMask,
    pub latent_buffer: BinaryMask,
    pub downsample_factor: u32,
}

impl RegionMasks {
    pub fn width(&self) -> usize {
        self.critical.width()
    }

    pub fn height(&self) -> usize {
        self.critical.height()
    }

    pub fn region(&self, region: Region) -> &BinaryMask {
        match region {
            Region::Critical => &self.critical,
            Region::Buffer => &self.buffer,
            Region::Augmentation => &self.augmentation,
        }
    }

    pub fn latent(&self, region: Region) -> &BinaryMask {
        match region {
            Region::Critical => &self.latent_critical,
            Region::Buffer => &self.latent_buffer,
            Region::Augmentation => &self.latent_augmentation,
        }
    }
}

/// Builds the region partition for one label map.
///
/// `buffer = dilate(critical) ∧ ¬critical ∧ ¬ignore` and
/// `augmentation = ¬critical ∧ ¬buffer ∧ ¬ignore`.
pub fn build_region_masks(
    labels: &LabelMap,
    taxonomy: &ClassTaxonomy,
    params: &MaskParams,
) -> Result<RegionMasks> {
    let f = params.downsample_factor as usize;
    if f == 0 {
        return Err(Error::InvalidArgument(
            "downsample factor must be >= 1".into(),
        ));
    }
    if !labels.width().is_multiple_of(f) || !labels.height().is_multiple_of(f) {
        return Err(Error::Shape(format!(
            "{}x{} is not divisible by downsample factor {f}",
            labels.width(),
            labels.height()
        )));
    }

    let critical = critical_mask(labels, taxonomy)?;
    let ignore = ignore_mask(labels, taxonomy)?;
    let element = StructuringElement::for_shape(params.element, params.radius);
    let dilated = asymmetric_dilate(&critical, params.radius, &element)?;
    let buffer = dilated.and_not(&critical).and_not(&ignore);
    let augmentation = critical.or(&buffer).or(&ignore).not();

    Ok(RegionMasks {
        latent_critical: downsample_mask(&critical, params.downsample_factor)?,
        latent_augmentation: downsample_mask(&augmentation, params.downsample_factor)?,
        latent_buffer: downsample_mask(&buffer, params.downsample_factor)?,
        critical,
        augmentation,
        buffer,
        ignore,
        downsample_factor: params.downsample_factor,
    })
}
