//! Handcrafted image descriptor for the random-forest baseline.
//!
//! The image is resized to 128×128 and split into foreground (measurably
//! non-white) and background. The 74-value vector holds, in order:
//!
//! | idx   | name                          |
//! |-------|-------------------------------|
//! | 0     | `kurtosis`                    |
//! | 1     | `fg_fraction`                 |
//! | 2–3   | `bbox_width`, `bbox_height`   |
//! | 4–9   | `{r,g,b}_{mean,std}`          |
//! | 10–73 | `grid_r{row}_c{col}`, 8×8     |
//!
//! `fg_count` and `aspect_ratio` are carried on [`FeatureVector`] but not in
//! the vector: they are exact functions of `fg_fraction` and the bounding box.

use std::io::Write;
use std::path::{Path, PathBuf};

use image::RgbImage;

use crate::error::{Error, Result};
use crate::raster;
use crate::signal::PdClass;

pub const RESIZE_TO: u32 = 128;
pub const GRID: usize = 8;
/// A pixel is foreground when some channel is more than this far below 255.
pub const FOREGROUND_THRESHOLD: u8 = 20;
pub const N_FEATURES: usize = 10 + GRID * GRID;

/// Ordered names of the vector entries.
pub fn feature_names() -> Vec<String> {
    let mut names: Vec<String> = [
        "kurtosis",
        "fg_fraction",
        "bbox_width",
        "bbox_height",
        "r_mean",
        "r_std",
        "g_mean",
        "g_std",
        "b_mean",
        "b_std",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for r in 0..GRID {
        for c in 0..GRID {
            names.push(format!("grid_r{r}_c{c}"));
        }
    }
    names
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    pub width: u32,
    pub height: u32,
    bits: Vec<bool>,
}

impl Mask {
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[(y * self.width + x) as usize]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

fn is_foreground(px: &image::Rgb<u8>) -> bool {
    px.0.iter().any(|&c| 255 - c > FOREGROUND_THRESHOLD)
}

fn mask_of(img: &RgbImage) -> Mask {
    Mask {
        width: img.width(),
        height: img.height(),
        bits: img.pixels().map(is_foreground).collect(),
    }
}

/// Foreground mask of `img` after a bilinear resize to `resize_to`².
pub fn segment_foreground(img: &RgbImage, resize_to: u32) -> Mask {
    mask_of(&raster::resize(img, resize_to, resize_to))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub kurtosis: f64,
    pub fg_count: usize,
    pub fg_fraction: f64,
    pub bbox_width: f64,
    pub bbox_height: f64,
    pub aspect_ratio: f64,
    /// Foreground mean and population std per channel: r_mean, r_std, g_mean, ...
    pub rgb_stats: [f64; 6],
    /// Per-cell foreground fraction, row-major.
    pub grid_occupancy: [f64; GRID * GRID],
}

impl FeatureVector {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(N_FEATURES);
        v.push(self.kurtosis);
        v.push(self.fg_fraction);
        v.push(self.bbox_width);
        v.push(self.bbox_height);
        v.extend_from_slice(&self.rgb_stats);
        v.extend_from_slice(&self.grid_occupancy);
        v
    }
}

/// Pearson kurtosis `m4 / m2²`, or 0 when the variance is below 1e-12.
fn kurtosis(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = xs.clone().count() as f64;
    if n == 0.0 {
        return 0.0;
    }
    let mean = xs.clone().sum::<f64>() / n;
    let (m2, m4) = xs.fold((0.0, 0.0), |(m2, m4), x| {
        let d = x - mean;
        let d2 = d * d;
        (m2 + d2, m4 + d2 * d2)
    });
    let (m2, m4) = (m2 / n, m4 / n);
    if m2 < 1e-12 {
        0.0
    } else {
        m4 / (m2 * m2)
    }
}

/// Features of an image that already has the working size.
fn extract_resized(img: &RgbImage) -> FeatureVector {
    let (w, h) = img.dimensions();
    let mask = mask_of(img);
    let total = (w * h) as f64;

    let gray = img
        .pixels()
        .map(|p| (p.0[0] as f64 + p.0[1] as f64 + p.0[2] as f64) / 3.0);
    let kurtosis = kurtosis(gray);

    let fg_count = mask.count();
    let fg_fraction = fg_count as f64 / total;

    let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0, 0);
    let mut sums = [0.0f64; 3];
    let mut sq = [0.0f64; 3];
    for (x, y, px) in img.enumerate_pixels() {
        if !mask.get(x, y) {
            continue;
        }
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
        for c in 0..3 {
            let v = px.0[c] as f64;
            sums[c] += v;
            sq[c] += v * v;
        }
    }
    let (bbox_width, bbox_height) = if fg_count == 0 {
        (0.0, 0.0)
    } else {
        ((x1 - x0 + 1) as f64, (y1 - y0 + 1) as f64)
    };
    let aspect_ratio = if bbox_height == 0.0 {
        0.0
    } else {
        bbox_width / bbox_height
    };

    let mut rgb_stats = [0.0; 6];
    if fg_count > 0 {
        let n = fg_count as f64;
        for c in 0..3 {
            let mean = sums[c] / n;
            let var = (sq[c] / n - mean * mean).max(0.0);
            rgb_stats[2 * c] = mean;
            rgb_stats[2 * c + 1] = var.sqrt();
        }
    }

    let mut grid_occupancy = [0.0; GRID * GRID];
    let (cell_w, cell_h) = (w as usize / GRID, h as usize / GRID);
    let mut counts = [0usize; GRID * GRID];
    for y in 0..h {
        for x in 0..w {
            if mask.get(x, y) {
                let r = (y as usize / cell_h).min(GRID - 1);
                let c = (x as usize / cell_w).min(GRID - 1);
                counts[r * GRID + c] += 1;
            }
        }
    }
    for (occ, &count) in grid_occupancy.iter_mut().zip(&counts) {
        *occ = count as f64 / (cell_w * cell_h) as f64;
    }

    FeatureVector {
        kurtosis,
        fg_count,
        fg_fraction,
        bbox_width,
        bbox_height,
        aspect_ratio,
        rgb_stats,
        grid_occupancy,
    }
}

pub fn extract(img: &RgbImage) -> FeatureVector {
    extract_resized(&raster::resize(img, RESIZE_TO, RESIZE_TO))
}

/// One row of a features CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFeatures {
    pub image_id: String,
    pub class: PdClass,
    pub values: Vec<f64>,
}

/// Extracts features for every `<dir>/**/<class>/<id>.png`, sorted by path.
/// The class is taken from the parent directory name.
pub fn extract_dir(dir: &Path) -> Result<Vec<LabeledFeatures>> {
    let mut paths = Vec::new();
    collect_pngs(dir, &mut paths)?;
    paths.sort();
    use rayon::prelude::*;
    paths
        .par_iter()
        .map(|path| {
            let class_name = path
                .parent()
                .and_then(|p| p.file_name())
                .and_then(|n| n.to_str())
                .unwrap_or_default();
            let class: PdClass = class_name.parse()?;
            let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
            let img = raster::decode_png(&bytes)?;
            Ok(LabeledFeatures {
                image_id: path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or_default()
                    .to_string(),
                class,
                values: extract(&img).to_vec(),
            })
        })
        .collect()
}

fn collect_pngs(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            collect_pngs(&path, out)?;
        } else if path.extension().is_some_and(|e| e == "png") {
            out.push(path);
        }
    }
    Ok(())
}

pub fn write_features_csv(rows: &[LabeledFeatures], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let io = |e| Error::io(path, e);
    write!(out, "image_id,class").map_err(io)?;
    for name in feature_names() {
        write!(out, ",{name}").map_err(io)?;
    }
    writeln!(out).map_err(io)?;
    for row in rows {
        write!(out, "{},{}", row.image_id, row.class).map_err(io)?;
        for v in &row.values {
            write!(out, ",{v:?}").map_err(io)?;
        }
        writeln!(out).map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn read_features_csv(path: &Path) -> Result<Vec<LabeledFeatures>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::malformed(e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::malformed(e.to_string()))?
        .clone();
    let expected = feature_names();
    if headers.len() != expected.len() + 2
        || headers.iter().skip(2).zip(&expected).any(|(a, b)| a != b)
    {
        return Err(Error::malformed(format!(
            "{}: header does not match the feature layout",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::malformed(e.to_string()))?;
        let values = record
            .iter()
            .skip(2)
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::malformed(format!("bad feature value `{f}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(LabeledFeatures {
            image_id: record[0].to_string(),
            class: record[1].parse()?,
            values,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::Rgb;

    #[test]
    fn layout_is_74_wide() {
        assert_eq!(N_FEATURES, 74);
        assert_eq!(feature_names().len(), 74);
        let img = RgbImage::from_pixel(200, 150, Rgb([255, 255, 255]));
        assert_eq!(extract(&img).to_vec().len(), 74);
    }

    #[test]
    fn threshold_examples() {
        let mut img = RgbImage::from_pixel(2, 1, Rgb([250, 250, 250]));
        img.put_pixel(1, 0, Rgb([230, 255, 255]));
        let m = mask_of(&img);
        assert!(!m.get(0, 0));
        assert!(m.get(1, 0));
    }

    #[test]
    fn empty_foreground_conventions() {
        let img = RgbImage::from_pixel(128, 128, Rgb([255, 255, 255]));
        let f = extract(&img);
        assert_eq!(f.fg_fraction, 0.0);
        assert_eq!(f.fg_count, 0);
        assert_eq!(f.aspect_ratio, 0.0);
        assert_eq!((f.bbox_width, f.bbox_height), (0.0, 0.0));
        assert_eq!(f.rgb_stats, [0.0; 6]);
        assert!(f.grid_occupancy.iter().all(|&g| g == 0.0));
        assert_eq!(f.kurtosis, 0.0);
    }

    #[test]
    fn left_half_black() {
        let img = RgbImage::from_fn(128, 128, |x, _| {
            if x < 64 {
                Rgb([0, 0, 0])
            } else {
                Rgb([255, 255, 255])
            }
        });
        let f = extract(&img);
        assert_eq!(f.fg_fraction, 0.5);
        for r in 0..GRID {
            for c in 0..GRID {
                let expected = if c < 4 { 1.0 } else { 0.0 };
                assert_eq!(f.grid_occupancy[r * GRID + c], expected);
            }
        }
        assert_eq!((f.bbox_width, f.bbox_height, f.aspect_ratio), (64.0, 128.0, 0.5));
        assert_eq!(f.rgb_stats, [0.0; 6]);
        // two-point distribution with equal weights has kurtosis 1
        assert!((f.kurtosis - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_gray_is_all_foreground_with_zero_kurtosis() {
        let img = RgbImage::from_pixel(128, 128, Rgb([128, 128, 128]));
        let f = extract(&img);
        assert_eq!(f.kurtosis, 0.0);
        assert_eq!(f.fg_fraction, 1.0);
        assert_eq!(f.rgb_stats, [128.0, 0.0, 128.0, 0.0, 128.0, 0.0]);
    }

    #[test]
    fn black_disc_mask_matches_support() {
        let mut img = RgbImage::from_pixel(128, 128, Rgb([255, 255, 255]));
        let mut support = 0;
        for y in 0..128i32 {
            for x in 0..128i32 {
                if (x - 40).pow(2) + (y - 70).pow(2) <= 100 {
                    img.put_pixel(x as u32, y as u32, Rgb([0, 0, 0]));
                    support += 1;
                }
            }
        }
        let mask = segment_foreground(&img, 128);
        assert_eq!(mask.count(), support);
        assert!(mask.get(40, 70) && !mask.get(40, 81));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let rows = vec![LabeledFeatures {
            image_id: "S_0001".into(),
            class: PdClass::S,
            values: (0..74).map(|i| i as f64 / 7.0).collect(),
        }];
        write_features_csv(&rows, &path).unwrap();
        assert_eq!(read_features_csv(&path).unwrap(), rows);
    }
}
