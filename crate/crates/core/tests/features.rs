mod common;

use common::{rel_close, rng};
use pdawa::awa::{render_awa, AxisRanges, Range, RenderConfig};
use pdawa::features::{extract, feature_names, GRID, N_FEATURES, RESIZE_TO};
use pdawa::raster::flip_horizontal;
use pdawa::PulseFeatures;
use proptest::prelude::*;
use rand::Rng;

fn random_awa(seed: u64, size: u32) -> image::RgbImage {
    let mut r = rng(seed);
    let n = r.random_range(1..60);
    let pulses: Vec<PulseFeatures> = (0..n)
        .map(|_| PulseFeatures::new(r.random_range(0.05..1.0), r.random_range(1e-7..1e-6), r.random_range(0.0..1.0)))
        .collect();
    let ranges = AxisRanges {
        amplitude: Range::new(0.0, 1.0),
        area: Range::new(0.0, 1e-6),
        width: Range::new(0.0, 1e-6),
    };
    let cfg = RenderConfig::with_ranges(ranges).with_size(size);
    render_awa(&pulses, &cfg).unwrap().image
}

const GRID_START: usize = N_FEATURES - GRID * GRID;

#[test]
fn vector_length_and_names_agree() {
    let v = extract(&random_awa(1, RESIZE_TO)).to_vec();
    assert_eq!(v.len(), N_FEATURES);
    assert_eq!(feature_names().len(), N_FEATURES);
    assert_eq!(feature_names()[GRID_START], "grid_r0_c0");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grid_mean_is_foreground_fraction(seed in any::<u64>(), big in any::<bool>()) {
        let size = if big { 2 * RESIZE_TO } else { RESIZE_TO };
        let f = extract(&random_awa(seed, size));
        let mean = f.grid_occupancy.iter().sum::<f64>() / (GRID * GRID) as f64;
        prop_assert!((mean - f.fg_fraction).abs() <= 1e-9);
        prop_assert!(f.grid_occupancy.iter().all(|c| (0.0..=1.0).contains(c)));
    }

    #[test]
    fn flip_mirrors_grid_columns(seed in any::<u64>()) {
        let img = random_awa(seed, RESIZE_TO);
        let a = extract(&img).to_vec();
        let b = extract(&flip_horizontal(&img)).to_vec();
        for j in 0..GRID_START {
            prop_assert!(rel_close(a[j], b[j], 1e-9) || (a[j] - b[j]).abs() < 1e-12, "feature {}", j);
        }
        for row in 0..GRID {
            for col in 0..GRID {
                prop_assert_eq!(a[GRID_START + row * GRID + col], b[GRID_START + row * GRID + GRID - 1 - col]);
            }
        }
    }
}

#[test]
fn blank_image_has_no_foreground() {
    let img = image::RgbImage::from_pixel(RESIZE_TO, RESIZE_TO, image::Rgb([255, 255, 255]));
    let f = extract(&img);
    assert_eq!(f.fg_count, 0);
    assert_eq!(f.fg_fraction, 0.0);
    assert!(f.to_vec().iter().all(|v| v.is_finite()));
}
