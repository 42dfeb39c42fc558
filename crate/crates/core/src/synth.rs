//! Procedural driving-like scenes for testing and benchmarking.
//!
//! A scene has road below a horizon, building/wall/vegetation blocks and sky
//! above it, and a few vehicles, pedestrians and signs straddling the
//! horizon. The augmented frame restyles every augmentable pixel and adds a
//! mild drift to critical pixels; the candidate is the feathered oracle
//! composite.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compositor::{oracle_composite, BlendMode};
use crate::dataset::{write_triplet, Triplet};
use crate::error::Result;
use crate::frame::{Frame, LabelMap};
use crate::maskops::{build_region_masks, MaskParams, RegionMasks};
use crate::taxonomy::{ClassRole, ClassTaxonomy};

const ROAD: u32 = 0;
const BUILDING: u32 = 2;
const WALL: u32 = 3;
const VEGETATION: u32 = 8;
const SKY: u32 = 10;
const TRAFFIC_SIGN: u32 = 7;
const PERSON: u32 = 11;
const CAR: u32 = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SceneParams {
    pub width: usize,
    pub height: usize,
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            width: 576,
            height: 320,
        }
    }
}

fn quantize(v: f64) -> f32 {
    ((v.clamp(0.0, 1.0) * 255.0).round() / 255.0) as f32
}

fn fill_rect(labels: &mut [u32], w: usize, h: usize, rows: (i64, i64), cols: (i64, i64), id: u32) {
    let r0 = rows.0.clamp(0, h as i64) as usize;
    let r1 = rows.1.clamp(0, h as i64) as usize;
    let c0 = cols.0.clamp(0, w as i64) as usize;
    let c1 = cols.1.clamp(0, w as i64) as usize;
    for r in r0..r1 {
        labels[r * w + c0..r * w + c1].fill(id);
    }
}

/// Label layout of one scene using Cityscapes IDs.
pub fn scene_labels(rng: &mut impl Rng, params: SceneParams) -> LabelMap {
    let (w, h) = (params.width, params.height);
    let mut labels = vec![SKY; w * h];
    let horizon = rng.gen_range(h * 45 / 100..=h * 60 / 100);
    fill_rect(
        &mut labels,
        w,
        h,
        (horizon as i64, h as i64),
        (0, w as i64),
        ROAD,
    );

    // Skyline blocks.
    let mut col = 0usize;
    while col < w {
        let block = rng.gen_range(w / 12..=w / 4).max(1);
        let top = rng.gen_range(h / 10..=horizon.saturating_sub(h / 10).max(h / 10));
        let id = [BUILDING, BUILDING, WALL, VEGETATION][rng.gen_range(0..4)];
        fill_rect(
            &mut labels,
            w,
            h,
            (top as i64, horizon as i64),
            (col as i64, (col + block) as i64),
            id,
        );
        col += block;
    }

    // Vehicles sit on the road and poke above the horizon.
    for _ in 0..rng.gen_range(1..=3) {
        let vh = rng.gen_range(h / 10..=h / 5) as i64;
        let vw = (vh as f64 * rng.gen_range(1.4..2.4)) as i64;
        let bottom = horizon as i64 + rng.gen_range(vh / 4..=vh * 3 / 4);
        let left = rng.gen_range(0..(w as i64 - vw).max(1));
        fill_rect(
            &mut labels,
            w,
            h,
            (bottom - vh, bottom),
            (left, left + vw),
            CAR,
        );
    }

    if rng.gen_bool(0.7) {
        let ph = (h / 6) as i64;
        let pw = (ph / 3).max(1);
        let bottom = horizon as i64 + rng.gen_range(0..=ph / 2);
        let left = rng.gen_range(0..(w as i64 - pw).max(1));
        fill_rect(
            &mut labels,
            w,
            h,
            (bottom - ph, bottom),
            (left, left + pw),
            PERSON,
        );
    }

    if rng.gen_bool(0.5) {
        let s = (h / 16).max(1) as i64;
        let top = rng.gen_range(h as i64 / 8..(horizon as i64 - s).max(h as i64 / 8 + 1));
        let left = rng.gen_range(0..(w as i64 - s).max(1));
        fill_rect(
            &mut labels,
            w,
            h,
            (top, top + s),
            (left, left + s),
            TRAFFIC_SIGN,
        );
    }

    LabelMap::new(w, h, labels).expect("scene dimensions")
}

fn base_color(id: u32) -> [f64; 3] {
    match id {
        ROAD => [0.38, 0.38, 0.40],
        BUILDING => [0.62, 0.52, 0.44],
        WALL => [0.70, 0.68, 0.62],
        VEGETATION => [0.22, 0.48, 0.20],
        SKY => [0.55, 0.72, 0.92],
        TRAFFIC_SIGN => [0.85, 0.75, 0.10],
        PERSON => [0.75, 0.30, 0.35],
        CAR => [0.15, 0.25, 0.60],
        _ => [0.5, 0.5, 0.5],
    }
}

/// Textured real observation for a label layout.
pub fn scene_frame(rng: &mut impl Rng, labels: &LabelMap) -> Frame {
    let (fx, fy): (f64, f64) = (rng.gen_range(0.05..0.3), rng.gen_range(0.05..0.3));
    let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    Frame::from_fn(labels.width(), labels.height(), |r, c| {
        let base = base_color(labels.get(r, c));
        let texture = 0.06 * ((c as f64 * fx + phase).sin() * (r as f64 * fy).cos());
        let grain = rng.gen_range(-0.03..0.03);
        let shade = 0.08 * (r as f64 / labels.height() as f64);
        let mut px = [0.0f32; 3];
        for ch in 0..3 {
            px[ch] = quantize(base[ch] + texture + grain - shade);
        }
        px
    })
    .expect("scene dimensions")
}

/// Restyles augmentable pixels and adds small noise to the rest.
pub fn stylize(
    rng: &mut impl Rng,
    real: &Frame,
    labels: &LabelMap,
    taxonomy: &ClassTaxonomy,
    drift: f64,
) -> Frame {
    let tint = [
        rng.gen_range(0.6..1.0),
        rng.gen_range(0.0..0.4),
        rng.gen_range(0.5..1.0),
    ];
    let stripe = rng.gen_range(6..16);
    Frame::from_fn(real.width(), real.height(), |r, c| {
        let x = real.pixel(r, c);
        let mut px = [0.0f32; 3];
        match taxonomy.role(labels.get(r, c)) {
            Some(ClassRole::Augmentable) => {
                let neon = if (r / stripe + c / stripe) % 2 == 0 {
                    0.15
                } else {
                    -0.1
                };
                for ch in 0..3 {
                    px[ch] = quantize(0.35 * (1.0 - x[ch] as f64) + 0.55 * tint[ch] + neon);
                }
            }
            _ => {
                for ch in 0..3 {
                    px[ch] = quantize(x[ch] as f64 + rng.gen_range(-drift..=drift));
                }
            }
        }
        px
    })
    .expect("frame dimensions")
}

/// One synthetic triplet plus the masks used to build its candidate.
pub fn synth_triplet(
    seed: u64,
    scene: SceneParams,
    taxonomy: &ClassTaxonomy,
    mask_params: &MaskParams,
) -> Result<(Triplet, RegionMasks)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = scene_labels(&mut rng, scene);
    let real = scene_frame(&mut rng, &labels);
    let augmented = stylize(&mut rng, &real, &labels, taxonomy, 0.08);
    let masks = build_region_masks(&labels, taxonomy, mask_params)?;
    let candidate = oracle_composite(&real, &augmented, &masks, BlendMode::Feather)?;
    Ok((Triplet::new(real, augmented, candidate, labels)?, masks))
}

/// Writes `count` samples named `sample_NNNN` under `root`.
pub fn write_synthetic_dataset(
    root: &Path,
    count: usize,
    seed: u64,
    scene: SceneParams,
    taxonomy: &ClassTaxonomy,
    mask_params: &MaskParams,
) -> Result<Vec<String>> {
    let mut ids = Vec::with_capacity(count);
    for i in 0..count {
        let (triplet, _) =
            synth_triplet(seed.wrapping_add(i as u64), scene, taxonomy, mask_params)?;
        let id = format!("sample_{i:04}");
        write_triplet(&root.join(&id), &triplet)?;
        ids.push(id);
    }
    Ok(ids)
}

/// A static scene whose candidate frames differ only inside the buffer:
/// each frame's buffer blends toward the augmented frame by a weight that
/// alternates between `low` and `high`.
pub fn flicker_sequence(
    seed: u64,
    scene: SceneParams,
    taxonomy: &ClassTaxonomy,
    mask_params: &MaskParams,
    frames: usize,
) -> Result<Vec<Triplet>> {
    let (base, masks) = synth_triplet(seed, scene, taxonomy, mask_params)?;
    let weights = [0.2f64, 0.8];
    (0..frames)
        .map(|t| {
            let alpha = weights[t % 2];
            let cand = Frame::from_fn(base.width(), base.height(), |r, c| {
                let px = base.candidate.pixel(r, c);
                if !masks.buffer.get(r, c) {
                    return px;
                }
                let (x, y) = (base.real.pixel(r, c), base.augmented.pixel(r, c));
                let mut out = [0.0f32; 3];
                for ch in 0..3 {
                    out[ch] = quantize((1.0 - alpha) * x[ch] as f64 + alpha * y[ch] as f64);
                }
                out
            })?;
            Triplet::new(
                base.real.clone(),
                base.augmented.clone(),
                cand,
                base.labels.clone(),
            )
        })
        .collect()
}
