//! Pulse detection: local maxima, topographic prominence and width at half
//! prominence, combined with an amplitude floor.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Waveform;

/// Multiple of the median absolute signal value used by
/// [`DetectionConfig::noise_referenced`].
pub const NOISE_FACTOR: f64 = 10.0;

/// Fraction of the largest absolute sample used as a threshold floor, so that
/// noise-free records still get a positive threshold.
pub const RELATIVE_FLOOR: f64 = 0.01;

/// One accepted discharge peak. Times are in seconds, levels in volts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub index: usize,
    pub time: f64,
    pub height: f64,
    pub prominence: f64,
    /// Width at the half-prominence level, `right_cross - left_cross`.
    pub width: f64,
    pub left_cross: f64,
    pub right_cross: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct DetectionConfig {
    pub min_height: f64,
    pub min_prominence: f64,
    /// Run detection on `|values|` (bipolar pulses).
    pub absolute_value: bool,
}

impl DetectionConfig {
    pub fn new(min_height: f64, min_prominence: f64, absolute_value: bool) -> Result<Self> {
        let cfg = DetectionConfig {
            min_height,
            min_prominence,
            absolute_value,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min_height.is_finite() && self.min_height >= 0.0) {
            return Err(Error::invalid(format!(
                "min_height must be finite and >= 0, got {}",
                self.min_height
            )));
        }
        if !(self.min_prominence.is_finite() && self.min_prominence > 0.0) {
            return Err(Error::invalid(format!(
                "min_prominence must be finite and > 0, got {}",
                self.min_prominence
            )));
        }
        Ok(())
    }

    /// Thresholds referenced to the record's own noise level:
    /// `min_height = max(NOISE_FACTOR * median|x|, RELATIVE_FLOOR * max|x|)`
    /// and `min_prominence = min_height`.
    pub fn noise_referenced(w: &Waveform) -> Self {
        let mut mags: Vec<f64> = w.values().iter().map(|v| v.abs()).collect();
        let max = mags.iter().copied().fold(0.0, f64::max);
        let median = median_in_place(&mut mags);
        let min_height = (NOISE_FACTOR * median).max(RELATIVE_FLOOR * max);
        DetectionConfig {
            min_height,
            min_prominence: min_height.max(f64::MIN_POSITIVE),
            absolute_value: true,
        }
    }
}

fn median_in_place(xs: &mut [f64]) -> f64 {
    let n = xs.len();
    if n == 0 {
        return 0.0;
    }
    let mid = n / 2;
    let (lower, upper, _) = xs.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower_max = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower_max + upper)
    }
}

/// Indices of strict local maxima. A flat-topped peak is reported once, at
/// its leftmost sample; the first and last samples are never peaks.
pub fn find_local_maxima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if values[i] > values[i - 1] {
            let mut end = i + 1;
            while end < n && values[end] == values[i] {
                end += 1;
            }
            if end < n && values[end] < values[i] {
                peaks.push(i);
            }
            i = end;
        } else {
            i += 1;
        }
    }
    peaks
}

fn is_local_maximum(values: &[f64], i: usize) -> bool {
    let n = values.len();
    if i == 0 || i + 1 >= n || values[i] <= values[i - 1] {
        return false;
    }
    match values[i + 1..].iter().find(|&&v| v != values[i]) {
        Some(&next) => next < values[i],
        None => false,
    }
}

/// Prominence of a peak together with the positions of the lowest samples on
/// each side (the bases bounding its prominence interval).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProminenceInfo {
    pub prominence: f64,
    pub left_base: usize,
    pub right_base: usize,
}

fn prominence_unchecked(values: &[f64], peak: usize) -> ProminenceInfo {
    let height = values[peak];

    let mut left_min = f64::INFINITY;
    let mut left_base = peak;
    for j in (0..peak).rev() {
        if values[j] > height {
            break;
        }
        if values[j] < left_min {
            left_min = values[j];
            left_base = j;
        }
    }

    let mut right_min = f64::INFINITY;
    let mut right_base = peak;
    for (j, &v) in values.iter().enumerate().skip(peak + 1) {
        if v > height {
            break;
        }
        if v < right_min {
            right_min = v;
            right_base = j;
        }
    }

    ProminenceInfo {
        prominence: height - left_min.max(right_min),
        left_base,
        right_base,
    }
}

/// Topographic prominence of the local maximum at `peak_index`.
pub fn prominence(values: &[f64], peak_index: usize) -> Result<ProminenceInfo> {
    if !is_local_maximum(values, peak_index) {
        return Err(Error::invalid(format!(
            "sample {peak_index} is not a local maximum"
        )));
    }
    Ok(prominence_unchecked(values, peak_index))
}

/// Crossing times of the half-prominence level, linearly interpolated between
/// the straddling samples and confined to the prominence interval. Returns
/// `(width, left_cross, right_cross)`.
pub fn width_at_half_prominence(
    times: &[f64],
    values: &[f64],
    peak: usize,
    info: &ProminenceInfo,
) -> (f64, f64, f64) {
    let level = values[peak] - info.prominence / 2.0;

    let mut i = peak;
    while i > info.left_base && values[i] > level {
        i -= 1;
    }
    let left_cross = if values[i] < level && i < peak {
        let frac = (level - values[i]) / (values[i + 1] - values[i]);
        times[i] + frac * (times[i + 1] - times[i])
    } else {
        times[i]
    };

    let mut i = peak;
    while i < info.right_base && values[i] > level {
        i += 1;
    }
    let right_cross = if values[i] < level && i > peak {
        let frac = (level - values[i]) / (values[i - 1] - values[i]);
        times[i] - frac * (times[i] - times[i - 1])
    } else {
        times[i]
    };

    (right_cross - left_cross, left_cross, right_cross)
}

/// All local maxima passing both the height and the prominence threshold, in
/// time order, with prominence and width populated.
pub fn detect_pulses(w: &Waveform, cfg: &DetectionConfig) -> Vec<Peak> {
    let rectified;
    let values: &[f64] = if cfg.absolute_value {
        rectified = w.values().iter().map(|v| v.abs()).collect::<Vec<_>>();
        &rectified
    } else {
        w.values()
    };
    let times = w.times();

    find_local_maxima(values)
        .into_iter()
        .filter(|&i| values[i] >= cfg.min_height)
        .filter_map(|i| {
            let info = prominence_unchecked(values, i);
            if info.prominence < cfg.min_prominence {
                return None;
            }
            let (width, left_cross, right_cross) =
                width_at_half_prominence(times, values, i, &info);
            Some(Peak {
                index: i,
                time: times[i],
                height: values[i],
                prominence: info.prominence,
                width,
                left_cross,
                right_cross,
            })
        })
        .collect()
}

/// Writes the pulse list as CSV with columns `time_s,height_v,prominence_v,width_s`.
pub fn format_pulse_csv(peaks: &[Peak]) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("time_s,height_v,prominence_v,width_s\n");
    for p in peaks {
        let _ = writeln!(
            out,
            "{:?},{:?},{:?},{:?}",
            p.time, p.height, p.prominence, p.width
        );
    }
    out
}
