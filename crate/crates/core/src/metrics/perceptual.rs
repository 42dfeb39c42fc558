//! Bounding-box preparation and pluggable perceptual distances.
//!
//! Neural metrics such as LPIPS live outside this crate. A backend is either
//! an executable called as `<exe> <pathA> <pathB>` that prints one float, or
//! a `perceptual.json` sidecar mapping `<sample_id>/<comparison>` to a
//! precomputed distance.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use crate::dataset::write_frame;
use crate::error::{Error, Result};
use crate::frame::{BinaryMask, Frame};

pub const PERCEPTUAL_SIDECAR: &str = "perceptual.json";

/// Crops both frames to the tight bounding box of `mask`.
pub fn mask_bbox_crop(a: &Frame, b: &Frame, mask: &BinaryMask) -> Result<(Frame, Frame)> {
    if !a.same_shape(b) || a.width() != mask.width() || a.height() != mask.height() {
        return Err(Error::Shape("crop inputs differ in size".into()));
    }
    let bbox = mask.bbox().ok_or(Error::EmptyRegion)?;
    Ok((a.crop(bbox)?, b.crop(bbox)?))
}

pub trait PerceptualBackend: Send + Sync {
    fn name(&self) -> &str;

    /// Distance between two already-cropped frames. `key` identifies the
    /// comparison as `<sample_id>/<comparison>`.
    fn distance(&self, a: &Frame, b: &Frame, key: &str) -> Result<f64>;
}

/// Crops to the mask's bounding box, then asks `backend` for a distance.
pub fn perceptual_distance(
    a: &Frame,
    b: &Frame,
    mask: &BinaryMask,
    backend: &dyn PerceptualBackend,
    key: &str,
) -> Result<f64> {
    let (ca, cb) = mask_bbox_crop(a, b, mask)?;
    backend.distance(&ca, &cb, key)
}

/// Reference backend: mean absolute difference over all samples.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanAbsDiff;

impl PerceptualBackend for MeanAbsDiff {
    fn name(&self) -> &str {
        "mean-abs-diff"
    }

    fn distance(&self, a: &Frame, b: &Frame, _key: &str) -> Result<f64> {
        if !a.same_shape(b) {
            return Err(Error::Shape("perceptual inputs differ in size".into()));
        }
        let sum: f64 = a
            .data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| (*x as f64 - *y as f64).abs())
            .sum();
        Ok(sum / a.data().len() as f64)
    }
}

/// Runs an external program on two temporary PNG crops.
#[derive(Debug, Clone)]
pub struct ExecutableBackend {
    program: PathBuf,
}

impl ExecutableBackend {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        Self {
            program: program.into(),
        }
    }
}

impl PerceptualBackend for ExecutableBackend {
    fn name(&self) -> &str {
        "executable"
    }

    fn distance(&self, a: &Frame, b: &Frame, key: &str) -> Result<f64> {
        let scratch = tempfile::tempdir()
            .map_err(|e| Error::Backend(format!("cannot create scratch dir: {e}")))?;
        let pa = scratch.path().join("a.png");
        let pb = scratch.path().join("b.png");
        write_frame(&pa, a)?;
        write_frame(&pb, b)?;

        let output = Command::new(&self.program)
            .arg(&pa)
            .arg(&pb)
            .output()
            .map_err(|e| Error::Backend(format!("{}: {e}", self.program.display())))?;
        if !output.status.success() {
            return Err(Error::Backend(format!(
                "{} exited with {} for {key}",
                self.program.display(),
                output.status
            )));
        }
        let stdout = String::from_utf8_lossy(&output.stdout);
        stdout
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| {
                Error::Backend(format!("unparseable output {:?} for {key}", stdout.trim()))
            })
    }
}

/// Precomputed distances keyed by `<sample_id>/<comparison>`.
#[derive(Debug, Clone, Default)]
pub struct SidecarBackend {
    table: BTreeMap<String, f64>,
}

impl SidecarBackend {
    pub fn from_map(table: BTreeMap<String, f64>) -> Self {
        Self { table }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let table = serde_json::from_str(&text)
            .map_err(|e| Error::Backend(format!("{}: {e}", path.display())))?;
        Ok(Self { table })
    }
}

impl PerceptualBackend for SidecarBackend {
    fn name(&self) -> &str {
        "sidecar"
    }

    fn distance(&self, _a: &Frame, _b: &Frame, key: &str) -> Result<f64> {
        self.table
            .get(key)
            .copied()
            .ok_or_else(|| Error::Backend(format!("no sidecar entry for {key}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: usize, h: usize) -> Frame {
        Frame::from_fn(w, h, |r, c| {
            [r as f32 / h as f32, c as f32 / w as f32, 0.25]
        })
        .unwrap()
    }

    #[test]
    fn full_mask_crop_is_whole_image() {
        let a = ramp(9, 7);
        let (ca, cb) = mask_bbox_crop(&a, &a, &BinaryMask::full(9, 7).unwrap()).unwrap();
        assert_eq!(ca, a);
        assert_eq!(cb, a);
    }

    #[test]
    fn point_mask_crop() {
        let a = ramp(12, 10);
        let mut m = BinaryMask::empty(12, 10).unwrap();
        m.set(5, 7, true);
        let (ca, _) = mask_bbox_crop(&a, &a, &m).unwrap();
        assert_eq!((ca.width(), ca.height()), (1, 1));
        assert_eq!(ca.pixel(0, 0), a.pixel(5, 7));
        assert!(matches!(
            mask_bbox_crop(&a, &a, &BinaryMask::empty(12, 10).unwrap()),
            Err(Error::EmptyRegion)
        ));
    }

    #[test]
    fn reference_backend_contract() {
        let a = Frame::filled(6, 6, [0.0; 3]).unwrap();
        let b = Frame::filled(6, 6, [1.0; 3]).unwrap();
        let m = BinaryMask::from_fn(6, 6, |r, _| r > 2).unwrap();
        assert_eq!(
            perceptual_distance(&a, &a, &m, &MeanAbsDiff, "s/x").unwrap(),
            0.0
        );
        assert_eq!(
            perceptual_distance(&a, &b, &m, &MeanAbsDiff, "s/x").unwrap(),
            1.0
        );
    }

    #[test]
    fn sidecar_lookup() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join(PERCEPTUAL_SIDECAR);
        std::fs::write(&p, r#"{"s0/crit_real_vs_cand": 0.25}"#).unwrap();
        let backend = SidecarBackend::load(&p).unwrap();
        let a = ramp(4, 4);
        let m = BinaryMask::full(4, 4).unwrap();
        assert_eq!(
            perceptual_distance(&a, &a, &m, &backend, "s0/crit_real_vs_cand").unwrap(),
            0.25
        );
        assert!(matches!(
            perceptual_distance(&a, &a, &m, &backend, "s1/crit_real_vs_cand"),
            Err(Error::Backend(_))
        ));
    }

    #[test]
    fn missing_executable_is_backend_error() {
        let backend = ExecutableBackend::new("/nonexistent/lpips-binary");
        let a = ramp(4, 4);
        assert!(matches!(
            backend.distance(&a, &a, "k"),
            Err(Error::Backend(_))
        ));
    }

    #[cfg(unix)]
    #[test]
    fn executable_receives_two_paths() {
        use std::os::unix::fs::PermissionsExt;
        let dir = tempfile::tempdir().unwrap();
        let script = dir.path().join("metric.sh");
        std::fs::write(
            &script,
            "#!/bin/sh\n[ -f \"$1\" ] && [ -f \"$2\" ] && echo 0.125\n",
        )
        .unwrap();
        std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).unwrap();
        let a = ramp(4, 4);
        let d = ExecutableBackend::new(&script)
            .distance(&a, &a, "k")
            .unwrap();
        assert_eq!(d, 0.125);
    }
}
