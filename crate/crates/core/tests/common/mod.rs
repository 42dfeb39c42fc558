//! Naive reference implementations used as test oracles. Each one follows
//! the textbook definition directly and shares no code with the library.
#![allow(dead_code)]

use rand::Rng;
use regcor::{BinaryMask, Frame, LabelMap};

pub const THRESHOLD_SLACK: f64 = 1e-9;

pub fn random_frame(rng: &mut impl Rng, w: usize, h: usize) -> Frame {
    Frame::from_fn(w, h, |_, _| [rng.gen(), rng.gen(), rng.gen()]).unwrap()
}

pub fn random_mask(rng: &mut impl Rng, w: usize, h: usize, density: f64) -> BinaryMask {
    BinaryMask::from_fn(w, h, |_, _| rng.gen_bool(density)).unwrap()
}

/// Random label map drawing from the given IDs.
pub fn random_labels(rng: &mut impl Rng, w: usize, h: usize, ids: &[u32]) -> LabelMap {
    LabelMap::from_fn(w, h, |_, _| ids[rng.gen_range(0..ids.len())]).unwrap()
}

/// Blocky label map: random rectangles painted over a background, so
/// regions are contiguous enough for dilation to matter.
pub fn blocky_labels(rng: &mut impl Rng, w: usize, h: usize, ids: &[u32]) -> LabelMap {
    let mut data = vec![ids[0]; w * h];
    for _ in 0..rng.gen_range(1..8) {
        let id = ids[rng.gen_range(0..ids.len())];
        let r0 = rng.gen_range(0..h);
        let c0 = rng.gen_range(0..w);
        let r1 = rng.gen_range(r0..=h);
        let c1 = rng.gen_range(c0..=w);
        for r in r0..r1 {
            for c in c0..c1 {
                data[r * w + c] = id;
            }
        }
    }
    LabelMap::new(w, h, data).unwrap()
}

/// Set dilation by direct enumeration of offsets.
pub fn naive_dilate(mask: &BinaryMask, offsets: &[(i32, i32)]) -> BinaryMask {
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let mut out = BinaryMask::empty(mask.width(), mask.height()).unwrap();
    for r in 0..h {
        for c in 0..w {
            for &(dr, dc) in offsets {
                let (sr, sc) = (r - dr as i64, c - dc as i64);
                if sr >= 0 && sr < h && sc >= 0 && sc < w && mask.get(sr as usize, sc as usize) {
                    out.set(r as usize, c as usize, true);
                    break;
                }
            }
        }
    }
    out
}

pub fn rect_offsets(radius: i32) -> Vec<(i32, i32)> {
    let mut v = Vec::new();
    for dr in -radius..=0 {
        for dc in -radius..=radius {
            v.push((dr, dc));
        }
    }
    v
}

pub fn naive_downsample(mask: &BinaryMask, factor: usize) -> Vec<Vec<bool>> {
    (0..mask.height() / factor)
        .map(|r| {
            (0..mask.width() / factor)
                .map(|c| mask.get(r * factor, c * factor))
                .collect()
        })
        .collect()
}

/// Chebyshev distance to the nearest set pixel by exhaustive scan.
pub fn naive_chebyshev(mask: &BinaryMask) -> Vec<Option<u32>> {
    let (w, h) = (mask.width(), mask.height());
    let set: Vec<(i64, i64)> = (0..h)
        .flat_map(|r| (0..w).map(move |c| (r, c)))
        .filter(|&(r, c)| mask.get(r, c))
        .map(|(r, c)| (r as i64, c as i64))
        .collect();
    (0..h)
        .flat_map(|r| (0..w).map(move |c| (r as i64, c as i64)))
        .map(|(r, c)| {
            set.iter()
                .map(|&(sr, sc)| (r - sr).abs().max((c - sc).abs()) as u32)
                .min()
        })
        .collect()
}

/// 2-D Gaussian window built directly from the 2-D exponent.
pub fn gaussian_window(radius: usize, sigma: f64) -> Vec<Vec<f64>> {
    let r = radius as i64;
    let mut w: Vec<Vec<f64>> = (-r..=r)
        .map(|k| {
            (-r..=r)
                .map(|l| (-((k * k + l * l) as f64) / (2.0 * sigma * sigma)).exp())
                .collect()
        })
        .collect();
    let total: f64 = w.iter().flatten().sum();
    for row in &mut w {
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    w
}

#[derive(Debug, Clone, Copy)]
pub struct OracleParams {
    pub radius: usize,
    pub sigma: f64,
    pub tau: f64,
    pub c1: f64,
    pub c2: f64,
    pub luminance: bool,
}

impl Default for OracleParams {
    fn default() -> Self {
        Self {
            radius: 5,
            sigma: 1.5,
            tau: 0.8,
            c1: 1e-4,
            c2: 9e-4,
            luminance: false,
        }
    }
}

fn planes(f: &Frame, luminance: bool) -> Vec<Vec<Vec<f64>>> {
    let get = |ch: usize| -> Vec<Vec<f64>> {
        (0..f.height())
            .map(|r| (0..f.width()).map(|c| f.pixel(r, c)[ch] as f64).collect())
            .collect()
    };
    if luminance {
        let (r, g, b) = (get(0), get(1), get(2));
        vec![(0..f.height())
            .map(|i| {
                (0..f.width())
                    .map(|j| 0.299 * r[i][j] + 0.587 * g[i][j] + 0.114 * b[i][j])
                    .collect()
            })
            .collect()]
    } else {
        (0..3).map(get).collect()
    }
}

/// Per-window masked SSIM with two-pass variance. Returns
/// `(score, included_count)`, or `None` if no window qualifies.
pub fn naive_masked_ssim(
    a: &Frame,
    b: &Frame,
    mask: &BinaryMask,
    p: OracleParams,
) -> Option<(f64, usize)> {
    let win = gaussian_window(p.radius, p.sigma);
    let wsum: f64 = win.iter().flatten().sum();
    let (h, w) = (a.height() as i64, a.width() as i64);
    let r = p.radius as i64;
    let xs = planes(a, p.luminance);
    let ys = planes(b, p.luminance);

    let mut channel_scores = Vec::new();
    let mut included = 0;
    for (x, y) in xs.iter().zip(&ys) {
        let mut total = 0.0;
        let mut count = 0;
        for i in 0..h {
            for j in 0..w {
                // Gather in-mask taps of the window centred at (i, j).
                let mut taps = Vec::new();
                for k in -r..=r {
                    for l in -r..=r {
                        let (ii, jj) = (i + k, j + l);
                        if ii < 0 || ii >= h || jj < 0 || jj >= w {
                            continue;
                        }
                        if !mask.get(ii as usize, jj as usize) {
                            continue;
                        }
                        let wt = win[(k + r) as usize][(l + r) as usize];
                        taps.push((wt, x[ii as usize][jj as usize], y[ii as usize][jj as usize]));
                    }
                }
                let wm: f64 = taps.iter().map(|t| t.0).sum();
                if wm <= 0.0 || wm / wsum < p.tau - THRESHOLD_SLACK {
                    continue;
                }
                let mx = taps.iter().map(|t| t.0 * t.1).sum::<f64>() / wm;
                let my = taps.iter().map(|t| t.0 * t.2).sum::<f64>() / wm;
                let vx = taps.iter().map(|t| t.0 * (t.1 - mx).powi(2)).sum::<f64>() / wm;
                let vy = taps.iter().map(|t| t.0 * (t.2 - my).powi(2)).sum::<f64>() / wm;
                let cov = taps
                    .iter()
                    .map(|t| t.0 * (t.1 - mx) * (t.2 - my))
                    .sum::<f64>()
                    / wm;
                total += ((2.0 * mx * my + p.c1) * (2.0 * cov + p.c2))
                    / ((mx * mx + my * my + p.c1) * (vx + vy + p.c2));
                count += 1;
            }
        }
        if count == 0 {
            return None;
        }
        included = count;
        channel_scores.push(total / count as f64);
    }
    Some((
        channel_scores.iter().sum::<f64>() / channel_scores.len() as f64,
        included,
    ))
}

/// Which pixels participate in a textbook Gaussian SSIM mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Border {
    /// Windows clipped at the border and renormalized over the in-image taps.
    Truncated,
    /// Only pixels whose whole window lies inside the image.
    Valid,
}

/// Wang-style Gaussian SSIM (11x11, sigma 1.5) averaged over RGB channels.
pub fn textbook_ssim(a: &Frame, b: &Frame, border: Border) -> f64 {
    let win = gaussian_window(5, 1.5);
    let (c1, c2) = (0.01f64.powi(2), 0.03f64.powi(2));
    let (h, w) = (a.height() as i64, a.width() as i64);
    let mut channel_scores = Vec::new();
    for ch in 0..3 {
        let mut total = 0.0;
        let mut n = 0;
        for i in 0..h {
            for j in 0..w {
                let inside = i >= 5 && j >= 5 && i + 5 < h && j + 5 < w;
                if border == Border::Valid && !inside {
                    continue;
                }
                let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
                let mut taps = Vec::new();
                for k in -5..=5i64 {
                    for l in -5..=5i64 {
                        let (ii, jj) = (i + k, j + l);
                        if ii < 0 || ii >= h || jj < 0 || jj >= w {
                            continue;
                        }
                        let wt = win[(k + 5) as usize][(l + 5) as usize];
                        let x = a.pixel(ii as usize, jj as usize)[ch] as f64;
                        let y = b.pixel(ii as usize, jj as usize)[ch] as f64;
                        sw += wt;
                        sx += wt * x;
                        sy += wt * y;
                        taps.push((wt, x, y));
                    }
                }
                let (mx, my) = (sx / sw, sy / sw);
                let vx = taps.iter().map(|t| t.0 * (t.1 - mx).powi(2)).sum::<f64>() / sw;
                let vy = taps.iter().map(|t| t.0 * (t.2 - my).powi(2)).sum::<f64>() / sw;
                let cov = taps
                    .iter()
                    .map(|t| t.0 * (t.1 - mx) * (t.2 - my))
                    .sum::<f64>()
                    / sw;
                total += ((2.0 * mx * my + c1) * (2.0 * cov + c2))
                    / ((mx * mx + my * my + c1) * (vx + vy + c2));
                n += 1;
            }
        }
        channel_scores.push(total / n as f64);
    }
    channel_scores.iter().sum::<f64>() / 3.0
}

/// Direct summation of squared differences over masked locations.
pub fn naive_region_mse(a: &Frame, b: &Frame, mask: &BinaryMask) -> f64 {
    let mut sum = 0.0;
    let mut n = 0;
    for r in 0..a.height() {
        for c in 0..a.width() {
            if mask.get(r, c) {
                for ch in 0..3 {
                    let d = a.pixel(r, c)[ch] as f64 - b.pixel(r, c)[ch] as f64;
                    sum += d * d;
                    n += 1;
                }
            }
        }
    }
    sum / n as f64
}

/// Mean absolute difference over pixels set in both masks.
pub fn naive_mad(a: &Frame, b: &Frame, ma: &BinaryMask, mb: &BinaryMask) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0;
    for r in 0..a.height() {
        for c in 0..a.width() {
            if ma.get(r, c) && mb.get(r, c) {
                for ch in 0..3 {
                    sum += (a.pixel(r, c)[ch] as f64 - b.pixel(r, c)[ch] as f64).abs();
                    n += 1;
                }
            }
        }
    }
    (n > 0).then(|| sum / n as f64)
}
