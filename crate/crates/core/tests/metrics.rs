mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regcor::metrics::{
    included_pixel_count, mask_bbox_crop, masked_ssim, perceptual_distance, region_mse, ColorMode,
    MaskedSsimConfig, MeanAbsDiff,
};
use regcor::{BinaryMask, Error, Frame};

fn cfg(tau: f64) -> MaskedSsimConfig {
    MaskedSsimConfig {
        tau,
        ..MaskedSsimConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn matches_per_window_oracle(seed: u64, w in 1usize..=16, h in 1usize..=16, density in 0.3f64..1.0, tau in prop::sample::select(vec![0.05, 0.3, 0.5, 0.8, 1.0])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_frame(&mut rng, w, h);
        let b = random_frame(&mut rng, w, h);
        let mask = random_mask(&mut rng, w, h, density);
        let got = masked_ssim(&a, &b, &mask, &cfg(tau));
        let want = naive_masked_ssim(&a, &b, &mask, OracleParams { tau, ..OracleParams::default() });
        match (got, want) {
            (Ok(s), Some((v, n))) => {
                prop_assert!((s.ssim.unwrap() - v).abs() < 1e-6, "{} vs {}", s.ssim.unwrap(), v);
                prop_assert_eq!(s.included_pixel_count, n);
            }
            (Err(Error::EmptyRegion), None) => prop_assert!(mask.is_blank()),
            (Err(Error::NoValidWindows), None) => {}
            (got, want) => prop_assert!(false, "mismatch: {:?} vs {:?}", got, want),
        }
    }

    #[test]
    fn symmetric(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_frame(&mut rng, 14, 12);
        let b = random_frame(&mut rng, 14, 12);
        let m = random_mask(&mut rng, 14, 12, 0.8);
        let c = cfg(0.3);
        match (masked_ssim(&a, &b, &m, &c), masked_ssim(&b, &a, &m, &c)) {
            (Ok(x), Ok(y)) => {
                prop_assert_eq!(x.ssim, y.ssim);
                prop_assert_eq!(x.mse, y.mse);
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "asymmetric outcome"),
        }
        prop_assume!(!m.is_blank());
        prop_assert_eq!(region_mse(&a, &b, &m).unwrap(), region_mse(&b, &a, &m).unwrap());
    }

    #[test]
    fn tau_monotone(seed: u64, t1 in 0.01f64..1.0, t2 in 0.01f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_mask(&mut rng, 20, 20, 0.7);
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!(included_pixel_count(&m, &cfg(hi)) <= included_pixel_count(&m, &cfg(lo)));
    }

    #[test]
    fn region_mse_matches_summation(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_frame(&mut rng, 8, 8);
        let b = random_frame(&mut rng, 8, 8);
        let m = random_mask(&mut rng, 8, 8, 0.5);
        prop_assume!(!m.is_blank());
        let got = region_mse(&a, &b, &m).unwrap();
        prop_assert!((got - naive_region_mse(&a, &b, &m)).abs() < 1e-12);
    }

    #[test]
    fn region_mse_zero_iff_equal_on_mask(seed: u64, touch_inside: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_frame(&mut rng, 10, 10);
        let m = BinaryMask::from_fn(10, 10, |r, _| r < 5).unwrap();
        let (tr, tc) = (if touch_inside { 2 } else { 7 }, rng.gen_range(0..10));
        let b = Frame::from_fn(10, 10, |r, c| {
            let p = a.pixel(r, c);
            if (r, c) == (tr, tc) { [1.0 - p[0], p[1], p[2]] } else { p }
        }).unwrap();
        let mse = region_mse(&a, &b, &m).unwrap();
        let differs = (a.pixel(tr, tc)[0] - b.pixel(tr, tc)[0]).abs() > 0.0;
        prop_assert_eq!(mse == 0.0, !(touch_inside && differs));
    }

    #[test]
    fn bbox_matches_scan(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_mask(&mut rng, 30, 20, 0.02);
        prop_assume!(!m.is_blank());
        let (mut rmin, mut rmax, mut cmin, mut cmax) = (usize::MAX, 0, usize::MAX, 0);
        for r in 0..20 {
            for c in 0..30 {
                if m.get(r, c) {
                    rmin = rmin.min(r); rmax = rmax.max(r); cmin = cmin.min(c); cmax = cmax.max(c);
                }
            }
        }
        let a = random_frame(&mut rng, 30, 20);
        let (ca, _) = mask_bbox_crop(&a, &a, &m).unwrap();
        prop_assert_eq!((ca.height(), ca.width()), (rmax - rmin + 1, cmax - cmin + 1));
        prop_assert_eq!(ca.pixel(0, 0), a.pixel(rmin, cmin));
        prop_assert_eq!(ca.pixel(rmax - rmin, cmax - cmin), a.pixel(rmax, cmax));
    }
}

#[test]
fn luminance_mode_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..20 {
        let a = random_frame(&mut rng, 15, 13);
        let b = random_frame(&mut rng, 15, 13);
        let m = random_mask(&mut rng, 15, 13, 0.85);
        let c = MaskedSsimConfig {
            tau: 0.5,
            color_mode: ColorMode::Luminance,
            ..MaskedSsimConfig::default()
        };
        let p = OracleParams {
            tau: 0.5,
            luminance: true,
            ..OracleParams::default()
        };
        if let Some((want, _)) = naive_masked_ssim(&a, &b, &m, p) {
            let got = masked_ssim(&a, &b, &m, &c).unwrap().ssim.unwrap();
            assert!((got - want).abs() < 1e-6);
        }
    }
}

#[test]
fn full_mask_reduces_to_standard_ssim() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..25 {
        let (w, h) = (rng.gen_range(12..28), rng.gen_range(12..28));
        let a = random_frame(&mut rng, w, h);
        let b = random_frame(&mut rng, w, h);
        let full = BinaryMask::full(w, h).unwrap();
        let near_zero = masked_ssim(&a, &b, &full, &cfg(1e-6)).unwrap();
        assert_eq!(near_zero.included_pixel_count, w * h);
        assert!((near_zero.ssim.unwrap() - textbook_ssim(&a, &b, Border::Truncated)).abs() < 1e-6);
        // tau = 1 keeps exactly the windows lying wholly inside the image.
        let strict = masked_ssim(&a, &b, &full, &cfg(1.0)).unwrap();
        assert_eq!(strict.included_pixel_count, (w - 10) * (h - 10));
        assert!((strict.ssim.unwrap() - textbook_ssim(&a, &b, Border::Valid)).abs() < 1e-6);
    }
}

#[test]
fn edits_outside_qualifying_windows_are_invisible() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (w, h) = (40, 30);
    let a = random_frame(&mut rng, w, h);
    let b = random_frame(&mut rng, w, h);
    // Solid block plus an isolated in-mask speck far away from it.
    let mut mask =
        BinaryMask::from_fn(w, h, |r, c| (2..20).contains(&r) && (2..20).contains(&c)).unwrap();
    mask.set(26, 34, true);
    let c = cfg(0.8);
    let base = masked_ssim(&a, &b, &mask, &c).unwrap().ssim.unwrap();

    // Every window covering the speck fails the threshold, so changing b there
    // (or anywhere outside the mask) must not move the score.
    let edited = Frame::from_fn(w, h, |r, col| {
        let p = b.pixel(r, col);
        if (r, col) == (26, 34) || !mask.get(r, col) {
            [1.0 - p[0], 1.0 - p[1], 1.0 - p[2]]
        } else {
            p
        }
    })
    .unwrap();
    let after = masked_ssim(&a, &edited, &mask, &c).unwrap().ssim.unwrap();
    assert_eq!(base, after);
}

#[test]
fn perceptual_reference_contract() {
    let zero = Frame::filled(8, 8, [0.0; 3]).unwrap();
    let one = Frame::filled(8, 8, [1.0; 3]).unwrap();
    let m = BinaryMask::from_fn(8, 8, |r, c| r > c).unwrap();
    assert_eq!(
        perceptual_distance(&zero, &zero, &m, &MeanAbsDiff, "k").unwrap(),
        0.0
    );
    assert_eq!(
        perceptual_distance(&zero, &one, &m, &MeanAbsDiff, "k").unwrap(),
        1.0
    );
}
