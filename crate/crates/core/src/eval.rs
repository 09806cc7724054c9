//! Test-set evaluation: accuracy, row-normalized confusion matrix, timing.

use std::time::Instant;

use image::{Rgb, RgbImage};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::PdClass;

/// Report schema shared with external classifiers. Percentages are on a
/// 0–100 scale; `confusion[i][j]` is the share of true class `i` predicted
/// as class `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub classes: Vec<PdClass>,
    pub n_test: usize,
    pub overall_accuracy: f64,
    pub confusion: Vec<Vec<f64>>,
    pub per_class_accuracy: Vec<f64>,
    /// Classes with no test samples; their rows are all zero.
    #[serde(default)]
    pub empty_rows: Vec<PdClass>,
    /// Raw counts behind `confusion`, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<Vec<u64>>>,
    pub mean_test_time_per_image_ms: f64,
    #[serde(default)]
    pub threads: usize,
    /// What the timing covers.
    #[serde(default)]
    pub timing_scope: String,
}

impl EvalReport {
    /// Builds the report from a count matrix.
    pub fn from_counts(model: impl Into<String>, counts: Vec<Vec<u64>>, mean_ms: f64) -> Result<Self> {
        let k = PdClass::COUNT;
        if counts.len() != k || counts.iter().any(|r| r.len() != k) {
            return Err(Error::invalid("confusion counts must be 6x6"));
        }
        let n_test: u64 = counts.iter().flatten().sum();
        if n_test == 0 {
            return Err(Error::invalid("evaluation needs at least one test sample"));
        }
        let correct: u64 = (0..k).map(|i| counts[i][i]).sum();
        let mut confusion = vec![vec![0.0; k]; k];
        let mut empty_rows = Vec::new();
        for (i, row) in counts.iter().enumerate() {
            let total: u64 = row.iter().sum();
            if total == 0 {
                empty_rows.push(PdClass::ALL[i]);
                continue;
            }
            for j in 0..k {
                confusion[i][j] = 100.0 * row[j] as f64 / total as f64;
            }
        }
        let per_class_accuracy = (0..k).map(|i| confusion[i][i]).collect();
        Ok(EvalReport {
            model: model.into(),
            classes: PdClass::ALL.to_vec(),
            n_test: n_test as usize,
            overall_accuracy: 100.0 * correct as f64 / n_test as f64,
            confusion,
            per_class_accuracy,
            empty_rows,
            counts: Some(counts),
            mean_test_time_per_image_ms: mean_ms,
            threads: rayon::current_num_threads(),
            timing_scope: "predict only".into(),
        })
    }

    /// Checks the shape and row sums (100 ± 0.1 for populated rows).
    pub fn validate(&self) -> Result<()> {
        let k = PdClass::COUNT;
        if self.classes != PdClass::ALL
            || self.confusion.len() != k
            || self.confusion.iter().any(|r| r.len() != k)
            || self.per_class_accuracy.len() != k
        {
            return Err(Error::malformed("report does not cover the six classes"));
        }
        for (i, row) in self.confusion.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            let empty = self.empty_rows.contains(&PdClass::ALL[i]);
            let ok = if empty { sum == 0.0 } else { (sum - 100.0).abs() <= 0.1 };
            if !ok {
                return Err(Error::malformed(format!(
                    "confusion row {} sums to {sum}",
                    PdClass::ALL[i]
                )));
            }
            if (self.per_class_accuracy[i] - row[i]).abs() > 1e-6 {
                return Err(Error::malformed(format!(
                    "per-class accuracy of {} disagrees with the diagonal",
                    PdClass::ALL[i]
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: EvalReport = serde_json::from_str(text)?;
        report.validate()?;
        Ok(report)
    }
}

/// Runs `predict` over the labeled test items and summarizes the result.
/// Timing covers the prediction calls only.
pub fn evaluate<T, F>(model: &str, items: &[(T, PdClass)], predict: F) -> Result<EvalReport>
where
    T: Sync,
    F: Fn(&T) -> Result<PdClass> + Sync,
{
    if items.is_empty() {
        return Err(Error::invalid("test set is empty"));
    }
    let start = Instant::now();
    let predicted: Vec<PdClass> = items
        .par_iter()
        .map(|(x, _)| predict(x))
        .collect::<Result<_>>()?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;

    let mut counts = vec![vec![0u64; PdClass::COUNT]; PdClass::COUNT];
    for ((_, truth), pred) in items.iter().zip(&predicted) {
        counts[truth.index()][pred.index()] += 1;
    }
    EvalReport::from_counts(model, counts, elapsed / items.len() as f64)
}

const CELL: u32 = 72;
const LABEL_BAND: u32 = 44;
const SCALE: u32 = 2;

/// 5×7 glyphs, one byte per row, high bit of the low five is the left pixel.
fn glyph(c: char) -> Option<[u8; 7]> {
    Some(match c {
        '0' => [0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E],
        '1' => [0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E],
        '2' => [0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F],
        '3' => [0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E],
        '4' => [0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02],
        '5' => [0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E],
        '6' => [0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E],
        '7' => [0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
        '8' => [0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E],
        '9' => [0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C],
        '.' => [0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C],
        'C' => [0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E],
        'I' => [0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E],
        'S' => [0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E],
        _ => return None,
    })
}

fn text_width(text: &str) -> u32 {
    let n = text.chars().count() as u32;
    if n == 0 {
        0
    } else {
        (6 * n - 1) * SCALE
    }
}

fn draw_text(img: &mut RgbImage, text: &str, x: u32, y: u32, color: [u8; 3]) {
    for (k, ch) in text.chars().enumerate() {
        let Some(rows) = glyph(ch) else { continue };
        let gx = x + k as u32 * 6 * SCALE;
        for (ry, bits) in rows.iter().enumerate() {
            for rx in 0..5u32 {
                if bits & (0x10 >> rx) == 0 {
                    continue;
                }
                for sy in 0..SCALE {
                    for sx in 0..SCALE {
                        let px = gx + rx * SCALE + sx;
                        let py = y + ry as u32 * SCALE + sy;
                        if px < img.width() && py < img.height() {
                            img.put_pixel(px, py, Rgb(color));
                        }
                    }
                }
            }
        }
    }
}

fn draw_centered(img: &mut RgbImage, text: &str, cx: u32, cy: u32, color: [u8; 3]) {
    let w = text_width(text);
    let h = 7 * SCALE;
    draw_text(img, text, cx.saturating_sub(w / 2), cy.saturating_sub(h / 2), color);
}

fn heat(pct: f64) -> [u8; 3] {
    let t = (pct / 100.0).clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    [lerp(247.0, 8.0), lerp(251.0, 48.0), lerp(255.0, 107.0)]
}

/// Heatmap of the row-normalized confusion matrix: rows are true classes,
/// columns predicted classes, each cell annotated to one decimal. Rows with
/// no samples are drawn hatched gray without numbers.
pub fn render_confusion(report: &EvalReport) -> RgbImage {
    let k = report.classes.len() as u32;
    let side = LABEL_BAND + k * CELL;
    let mut img = RgbImage::from_pixel(side, side, Rgb([255, 255, 255]));

    for (i, class) in report.classes.iter().enumerate() {
        let center = LABEL_BAND + i as u32 * CELL + CELL / 2;
        draw_centered(&mut img, class.as_str(), LABEL_BAND / 2, center, [0, 0, 0]);
        draw_centered(&mut img, class.as_str(), center, LABEL_BAND / 2, [0, 0, 0]);
    }

    for (i, row) in report.confusion.iter().enumerate() {
        let empty = report.empty_rows.contains(&report.classes[i]);
        for (j, &pct) in row.iter().enumerate() {
            let x0 = LABEL_BAND + j as u32 * CELL;
            let y0 = LABEL_BAND + i as u32 * CELL;
            for y in y0..y0 + CELL {
                for x in x0..x0 + CELL {
                    let border = x == x0 || y == y0 || x == x0 + CELL - 1 || y == y0 + CELL - 1;
                    let color = if border {
                        [160, 160, 160]
                    } else if empty {
                        if (x + y) % 8 < 2 {
                            [150, 150, 150]
                        } else {
                            [215, 215, 215]
                        }
                    } else {
                        heat(pct)
                    };
                    img.put_pixel(x, y, Rgb(color));
                }
            }
            if !empty {
                let ink = if pct >= 50.0 { [255, 255, 255] } else { [0, 0, 0] };
                draw_centered(&mut img, &format!("{pct:.1}"), x0 + CELL / 2, y0 + CELL / 2, ink);
            }
        }
    }
    img
}

pub fn render_confusion_png(report: &EvalReport) -> Result<Vec<u8>> {
    crate::raster::encode_png(&render_confusion(report))
}
