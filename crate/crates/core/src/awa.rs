//! Amplitude–width–area features and the AWA pattern raster.
//!
//! Each pulse becomes a disc in amplitude (x) / area (y) space, colored by
//! its width through a fixed three-anchor gradient.

use image::RgbImage;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::detect::Peak;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseFeatures {
    /// Peak height, volts.
    pub amplitude: f64,
    /// Half-prominence width, seconds.
    pub width: f64,
    /// `amplitude * width`, volt-seconds.
    pub area: f64,
    /// Occurrence time, seconds.
    pub time: f64,
}

impl PulseFeatures {
    pub fn new(amplitude: f64, width: f64, time: f64) -> Self {
        PulseFeatures {
            amplitude,
            width,
            area: amplitude * width,
            time,
        }
    }
}

pub fn extract_features(peaks: &[Peak]) -> Vec<PulseFeatures> {
    peaks
        .iter()
        .map(|p| PulseFeatures::new(p.height, p.width, p.time))
        .collect()
}

/// Reads a pulse list written by [`crate::detect::format_pulse_csv`]. Columns
/// are located by name; `height_v` becomes the amplitude.
pub fn parse_pulse_csv(text: &str) -> Result<Vec<PulseFeatures>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::malformed(e.to_string()))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::malformed(format!("pulse CSV has no `{name}` column")))
    };
    let (t, h, w) = (column("time_s")?, column("height_v")?, column("width_s")?);
    let mut out = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::malformed(e.to_string()))?;
        let field = |i: usize| -> Result<f64> {
            record
                .get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::malformed(format!("pulse CSV row {}: bad number", line + 2)))
        };
        out.push(PulseFeatures::new(field(h)?, field(w)?, field(t)?));
    }
    Ok(out)
}

pub fn read_pulse_csv(path: &std::path::Path) -> Result<Vec<PulseFeatures>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pulse_csv(&text)
}

/// Closed interval `[lo, hi]` used for an axis or for color normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub fn new(lo: f64, hi: f64) -> Self {
        Range { lo, hi }
    }

    fn is_valid(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite() && self.hi > self.lo
    }

    /// Position of `x` in the range as a fraction, unclamped.
    fn fraction(&self, x: f64) -> f64 {
        (x - self.lo) / (self.hi - self.lo)
    }
}

/// Axis and color ranges shared by every image of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct AxisRanges {
    pub amplitude: Range,
    pub area: Range,
    pub width: Range,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RenderConfig {
    pub image_width: u32,
    pub image_height: u32,
    pub ranges: AxisRanges,
    pub point_radius: u32,
    pub margin: u32,
    pub background: [u8; 3],
}

pub const DEFAULT_IMAGE_SIZE: u32 = 256;
pub const WHITE: [u8; 3] = [255, 255, 255];

impl RenderConfig {
    /// 256×256, radius 2, margin 8, white background.
    pub fn with_ranges(ranges: AxisRanges) -> Self {
        RenderConfig {
            image_width: DEFAULT_IMAGE_SIZE,
            image_height: DEFAULT_IMAGE_SIZE,
            ranges,
            point_radius: 2,
            margin: 8,
            background: WHITE,
        }
    }

    pub fn with_size(mut self, size: u32) -> Self {
        self.image_width = size;
        self.image_height = size;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let AxisRanges {
            amplitude,
            area,
            width,
        } = self.ranges;
        for (name, r) in [("amplitude", amplitude), ("area", area), ("width", width)] {
            if !r.is_valid() {
                return Err(Error::invalid(format!(
                    "{name} range [{}, {}] must satisfy hi > lo",
                    r.lo, r.hi
                )));
            }
        }
        if self.image_width < 64 || self.image_height < 64 {
            return Err(Error::invalid(format!(
                "image must be at least 64x64, got {}x{}",
                self.image_width, self.image_height
            )));
        }
        if self.point_radius < 1 {
            return Err(Error::invalid("point_radius must be >= 1"));
        }
        if 2 * self.margin >= self.image_width.min(self.image_height) {
            return Err(Error::invalid("margin leaves no plot area"));
        }
        Ok(())
    }

    /// Floating-point pixel center for a pulse, clamped to the plot rectangle.
    pub fn pixel_center(&self, amplitude: f64, area: f64) -> (f64, f64) {
        let m = self.margin as f64;
        let span_x = self.image_width as f64 - 2.0 * m;
        let span_y = self.image_height as f64 - 2.0 * m;
        let fx = self.ranges.amplitude.fraction(amplitude).clamp(0.0, 1.0);
        let fy = self.ranges.area.fraction(area).clamp(0.0, 1.0);
        (m + fx * span_x, self.image_height as f64 - m - fy * span_y)
    }

    /// Whether a pulse lies inside the axis ranges (no clamping needed).
    pub fn contains(&self, p: &PulseFeatures) -> bool {
        let fx = self.ranges.amplitude.fraction(p.amplitude);
        let fy = self.ranges.area.fraction(p.area);
        (0.0..=1.0).contains(&fx) && (0.0..=1.0).contains(&fy)
    }
}

const COLOR_ANCHORS: [[f64; 3]; 3] = [[68.0, 1.0, 84.0], [33.0, 145.0, 140.0], [253.0, 231.0, 37.0]];

/// Width → RGB through anchors at t = 0, 0.5, 1 with linear interpolation.
pub fn width_to_color(width: f64, ranges: &AxisRanges) -> [u8; 3] {
    color_at(ranges.width.fraction(width))
}

/// Gradient color at normalized position `t` (clamped to [0, 1]).
pub fn color_at(t: f64) -> [u8; 3] {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    let (a, b, u) = if t <= 0.5 {
        (COLOR_ANCHORS[0], COLOR_ANCHORS[1], t / 0.5)
    } else {
        (COLOR_ANCHORS[1], COLOR_ANCHORS[2], (t - 0.5) / 0.5)
    };
    let mut rgb = [0u8; 3];
    for c in 0..3 {
        rgb[c] = (a[c] + (b[c] - a[c]) * u).round().clamp(0.0, 255.0) as u8;
    }
    rgb
}

/// A rendered AWA pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct AwaImage {
    pub image: RgbImage,
    pub config: RenderConfig,
    pub n_pulses: usize,
}

impl AwaImage {
    pub fn pixels(&self) -> &[u8] {
        self.image.as_raw()
    }

    pub fn to_png(&self) -> Result<Vec<u8>> {
        crate::raster::encode_png(&self.image)
    }
}

/// Integer pixel offsets of a filled disc of the given radius.
pub fn disc_offsets(radius: u32) -> Vec<(i64, i64)> {
    let r = radius as i64;
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                out.push((dx, dy));
            }
        }
    }
    out
}

/// Draws pulses in increasing time order onto a background canvas; later
/// discs overwrite earlier ones.
pub fn render_awa(pulses: &[PulseFeatures], cfg: &RenderConfig) -> Result<AwaImage> {
    cfg.validate()?;
    let mut image = RgbImage::from_pixel(
        cfg.image_width,
        cfg.image_height,
        image::Rgb(cfg.background),
    );

    let mut order: Vec<usize> = (0..pulses.len()).collect();
    order.sort_by(|&a, &b| pulses[a].time.total_cmp(&pulses[b].time).then(a.cmp(&b)));

    let disc = disc_offsets(cfg.point_radius);
    let (w, h) = (cfg.image_width as i64, cfg.image_height as i64);
    for &k in &order {
        let p = &pulses[k];
        let (cx, cy) = cfg.pixel_center(p.amplitude, p.area);
        let (cx, cy) = (cx.round() as i64, cy.round() as i64);
        let color = image::Rgb(width_to_color(p.width, &cfg.ranges));
        for &(dx, dy) in &disc {
            let (x, y) = (cx + dx, cy + dy);
            if (0..w).contains(&x) && (0..h).contains(&y) {
                image.put_pixel(x as u32, y as u32, color);
            }
        }
    }

    Ok(AwaImage {
        image,
        config: *cfg,
        n_pulses: pulses.len(),
    })
}

/// Shared ranges `[0, 1.05 * max]` for amplitude, area and width across all
/// pulse sets.
pub fn auto_ranges<'a, I>(pulse_sets: I) -> Result<AxisRanges>
where
    I: IntoIterator<Item = &'a [PulseFeatures]>,
{
    let mut max = [f64::NEG_INFINITY; 3];
    let mut any = false;
    for set in pulse_sets {
        for p in set {
            any = true;
            max[0] = max[0].max(p.amplitude);
            max[1] = max[1].max(p.area);
            max[2] = max[2].max(p.width);
        }
    }
    if !any {
        return Err(Error::invalid("auto_ranges needs at least one pulse"));
    }
    let range = |m: f64| Range::new(0.0, 1.05 * m);
    let ranges = AxisRanges {
        amplitude: range(max[0]),
        area: range(max[1]),
        width: range(max[2]),
    };
    if ![ranges.amplitude, ranges.area, ranges.width]
        .iter()
        .all(Range::is_valid)
    {
        return Err(Error::invalid(
            "auto_ranges needs strictly positive maxima for amplitude, area and width",
        ));
    }
    Ok(ranges)
}
