//! Small raster helpers shared by rendering, augmentation and feature code.

use image::codecs::png::{CompressionType, FilterType, PngEncoder};
use image::{ImageEncoder, Rgb, RgbImage};

use crate::error::Result;

/// Encodes an RGB8 image as a plain PNG (IHDR/IDAT/IEND only, no interlace,
/// no timestamp chunk), so equal pixels give equal bytes.
pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    PngEncoder::new_with_quality(&mut out, CompressionType::Default, FilterType::Adaptive)
        .write_image(
            img.as_raw(),
            img.width(),
            img.height(),
            image::ExtendedColorType::Rgb8,
        )?;
    Ok(out)
}

pub fn decode_png(bytes: &[u8]) -> Result<RgbImage> {
    Ok(image::load_from_memory_with_format(bytes, image::ImageFormat::Png)?.to_rgb8())
}

/// Bilinear (triangle-filter) resize; returns a copy when the size already matches.
pub fn resize(img: &RgbImage, width: u32, height: u32) -> RgbImage {
    if img.width() == width && img.height() == height {
        return img.clone();
    }
    image::imageops::resize(img, width, height, image::imageops::FilterType::Triangle)
}

pub fn flip_horizontal(img: &RgbImage) -> RgbImage {
    image::imageops::flip_horizontal(img)
}

pub fn gaussian_blur(img: &RgbImage, sigma: f32) -> RgbImage {
    image::imageops::blur(img, sigma)
}

/// Adds `delta` (in 0–255 units) to every channel, saturating.
pub fn shift_brightness(img: &RgbImage, delta: f64) -> RgbImage {
    map_channels(img, |v| v + delta)
}

/// Scales channel distances from mid-gray (127.5) by `factor`, saturating.
pub fn scale_contrast(img: &RgbImage, factor: f64) -> RgbImage {
    map_channels(img, |v| (v - 127.5) * factor + 127.5)
}

fn map_channels(img: &RgbImage, f: impl Fn(f64) -> f64) -> RgbImage {
    let mut out = img.clone();
    for px in out.pixels_mut() {
        for c in px.0.iter_mut() {
            *c = f(*c as f64).round().clamp(0.0, 255.0) as u8;
        }
    }
    out
}

/// 2×2 linear map applied about the image center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub m: [[f64; 2]; 2],
}

impl Affine {
    pub fn scale(s: f64) -> Self {
        Affine {
            m: [[s, 0.0], [0.0, s]],
        }
    }

    pub fn rotation(degrees: f64) -> Self {
        let (s, c) = degrees.to_radians().sin_cos();
        Affine {
            m: [[c, -s], [s, c]],
        }
    }

    /// Horizontal shear `x' = x + tan(angle) * y`.
    pub fn shear_x(degrees: f64) -> Self {
        Affine {
            m: [[1.0, degrees.to_radians().tan()], [0.0, 1.0]],
        }
    }

    fn inverse(&self) -> Option<[[f64; 2]; 2]> {
        let [[a, b], [c, d]] = self.m;
        let det = a * d - b * c;
        if det.abs() < 1e-12 {
            return None;
        }
        Some([[d / det, -b / det], [-c / det, a / det]])
    }
}

/// Warps `img` by `map` about its center with bilinear sampling. Destination
/// pixels whose source falls outside the image take `fill`.
pub fn warp_affine(img: &RgbImage, map: Affine, fill: [u8; 3]) -> RgbImage {
    let (w, h) = (img.width(), img.height());
    let Some(inv) = map.inverse() else {
        return RgbImage::from_pixel(w, h, Rgb(fill));
    };
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;
    let mut out = RgbImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            let sx = inv[0][0] * dx + inv[0][1] * dy + cx;
            let sy = inv[1][0] * dx + inv[1][1] * dy + cy;
            out.put_pixel(x, y, Rgb(sample_bilinear(img, sx, sy, fill)));
        }
    }
    out
}

fn sample_bilinear(img: &RgbImage, x: f64, y: f64, fill: [u8; 3]) -> [u8; 3] {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let (x0, y0) = (x0 as i64, y0 as i64);
    let fetch = |xi: i64, yi: i64| -> [f64; 3] {
        if xi < 0 || yi < 0 || xi >= w || yi >= h {
            fill.map(f64::from)
        } else {
            img.get_pixel(xi as u32, yi as u32).0.map(f64::from)
        }
    };
    let p00 = fetch(x0, y0);
    let p10 = fetch(x0 + 1, y0);
    let p01 = fetch(x0, y0 + 1);
    let p11 = fetch(x0 + 1, y0 + 1);
    let mut out = [0u8; 3];
    for c in 0..3 {
        let top = p00[c] + (p10[c] - p00[c]) * fx;
        let bottom = p01[c] + (p11[c] - p01[c]) * fx;
        out[c] = (top + (bottom - top) * fy).round().clamp(0.0, 255.0) as u8;
    }
    out
}
