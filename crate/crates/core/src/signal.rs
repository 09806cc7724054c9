//! Waveform records and their CSV form.
//!
//! A waveform is a strictly time-ordered sequence of `(time, value)` samples.
//! Sampling need not be uniform: pulse widths and areas are always measured
//! from the stored timestamps.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The six partial-discharge source conditions, in canonical order.
///
/// The derived `Ord` is the canonical order used for tie-breaking and for
/// confusion-matrix axes.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema,
)]
pub enum PdClass {
    /// Corona.
    C,
    /// Internal (void) discharge.
    I,
    /// Surface discharge.
    S,
    /// Corona + internal.
    CI,
    /// Corona + surface.
    CS,
    /// Surface + internal.
    SI,
}

impl PdClass {
    pub const ALL: [PdClass; 6] = [
        PdClass::C,
        PdClass::I,
        PdClass::S,
        PdClass::CI,
        PdClass::CS,
        PdClass::SI,
    ];

    pub const COUNT: usize = 6;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<PdClass> {
        Self::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PdClass::C => "C",
            PdClass::I => "I",
            PdClass::S => "S",
            PdClass::CI => "CI",
            PdClass::CS => "CS",
            PdClass::SI => "SI",
        }
    }

    /// The single-source populations that make up this class.
    pub fn constituents(self) -> &'static [PdClass] {
        match self {
            PdClass::C => &[PdClass::C],
            PdClass::I => &[PdClass::I],
            PdClass::S => &[PdClass::S],
            PdClass::CI => &[PdClass::C, PdClass::I],
            PdClass::CS => &[PdClass::C, PdClass::S],
            PdClass::SI => &[PdClass::S, PdClass::I],
        }
    }

    pub fn is_single_source(self) -> bool {
        self.constituents().len() == 1
    }
}

impl fmt::Display for PdClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PdClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PdClass::ALL
            .iter()
            .copied()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::invalid(format!("unknown PD class `{s}`")))
    }
}

/// A time-stamped voltage record.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    times: Vec<f64>,
    values: Vec<f64>,
    pub label: Option<PdClass>,
    pub source_id: String,
}

impl Waveform {
    /// Builds a waveform, rejecting anything that violates the record
    /// invariants (length ≥ 2, equal lengths, strictly increasing finite
    /// times, finite values).
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::malformed(format!(
                "{} timestamps but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::malformed(format!(
                "waveform needs at least 2 samples, got {}",
                times.len()
            )));
        }
        if let Some(i) = times.iter().position(|t| !t.is_finite()) {
            return Err(Error::malformed(format!("non-finite time at sample {i}")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::malformed(format!("non-finite value at sample {i}")));
        }
        if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::malformed(format!(
                "time not strictly increasing at sample {}",
                i + 1
            )));
        }
        Ok(Waveform {
            times,
            values,
            label: None,
            source_id: String::new(),
        })
    }

    /// Uniformly sampled record starting at `t0`.
    pub fn uniform(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        let times = (0..values.len()).map(|i| t0 + i as f64 * dt).collect();
        Self::new(times, values)
    }

    pub fn with_label(mut self, label: PdClass) -> Self {
        self.label = Some(label);
        self
    }

    pub fn with_source_id(mut self, id: impl Into<String>) -> Self {
        self.source_id = id.into();
        self
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Same timestamps, values replaced by their absolute values.
    pub fn rectified(&self) -> Waveform {
        Waveform {
            times: self.times.clone(),
            values: self.values.iter().map(|v| v.abs()).collect(),
            label: self.label,
            source_id: self.source_id.clone(),
        }
    }

    /// Same values with every timestamp multiplied by `k`.
    pub fn scale_time(&self, k: f64) -> Result<Waveform> {
        let times = self.times.iter().map(|t| t * k).collect();
        Ok(Waveform::new(times, self.values.clone())?
            .with_source_id(self.source_id.clone()))
    }
}

fn parse_f64(field: &str) -> Option<f64> {
    field.trim().parse::<f64>().ok()
}

/// Parses waveform CSV text. The first row is treated as a header when its
/// first two fields are not both numeric. Columns past the second are ignored.
pub fn parse_waveform_csv(text: &str) -> Result<Waveform> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut times = Vec::new();
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::malformed(format!("row {}: {e}", row + 1)))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if record.len() < 2 {
            return Err(Error::malformed(format!(
                "row {} has {} column(s), need at least 2",
                row + 1,
                record.len()
            )));
        }
        match (parse_f64(&record[0]), parse_f64(&record[1])) {
            (Some(t), Some(v)) => {
                times.push(t);
                values.push(v);
            }
            // header row
            _ if row == 0 => {}
            _ => {
                return Err(Error::malformed(format!(
                    "row {}: non-numeric field in `{},{}`",
                    row + 1,
                    &record[0],
                    &record[1]
                )))
            }
        }
    }
    Waveform::new(times, values)
}

pub fn read_waveform_csv(path: impl AsRef<Path>) -> Result<Waveform> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_waveform_csv(&text)?.with_source_id(path.display().to_string()))
}

/// Renders a waveform as CSV with a `time,amplitude` header. Numbers use the
/// shortest decimal form that parses back to the identical `f64`.
pub fn format_waveform_csv(w: &Waveform) -> String {
    let mut out = String::with_capacity(w.len() * 28 + 16);
    out.push_str("time,amplitude\n");
    for (t, v) in w.times.iter().zip(&w.values) {
        use std::fmt::Write as _;
        let _ = writeln!(out, "{t:?},{v:?}");
    }
    out
}

pub fn write_waveform_csv(w: &Waveform, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(format_waveform_csv(w).as_bytes())
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_rows() {
        let w = parse_waveform_csv("0,0\n1e-6,1\n2e-6,0").unwrap();
        assert_eq!(w.times(), &[0.0, 1e-6, 2e-6]);
        assert_eq!(w.values(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn skips_header_and_extra_columns() {
        let plain = parse_waveform_csv("0,0\n1e-6,1\n2e-6,0").unwrap();
        let with_header = parse_waveform_csv("time,amplitude\n0,0\n1e-6,1\n2e-6,0").unwrap();
        assert_eq!(plain, with_header);
        let crlf = parse_waveform_csv("time,amplitude,ch2\r\n0,0,9\r\n1e-6,1,9\r\n2e-6,0,9\r\n")
            .unwrap();
        assert_eq!(plain, crlf);
    }

    #[test]
    fn rejects_bad_inputs() {
        for bad in [
            "1e-6,1\n0,0",
            "0,0\n0,1",
            "0,0\n1,NaN",
            "0,0\n1,inf",
            "0,0",
            "time,amplitude\n",
            "0,0\n1\n2,0",
            "0,0\nx,1\n2,0",
        ] {
            assert!(
                matches!(parse_waveform_csv(bad), Err(Error::MalformedInput(_))),
                "accepted {bad:?}"
            );
        }
    }

    #[test]
    fn round_trips_awkward_values() {
        let w = Waveform::new(
            vec![0.0, 1e-9, 0.1 + 0.2, 1.0 / 3.0, 12345.678_9e10],
            vec![-0.0, f64::MIN_POSITIVE, -1.0 / 7.0, 5e-324, 1e300],
        )
        .unwrap();
        let back = parse_waveform_csv(&format_waveform_csv(&w)).unwrap();
        assert_eq!(back.times(), w.times());
        for (a, b) in back.values().iter().zip(w.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn write_to_missing_directory_is_io_error() {
        let w = Waveform::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let err = write_waveform_csv(&w, "/nonexistent-dir/sub/w.csv").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn class_order_and_parsing() {
        assert!(PdClass::C < PdClass::I && PdClass::CS < PdClass::SI);
        for c in PdClass::ALL {
            assert_eq!(c.as_str().parse::<PdClass>().unwrap(), c);
            assert_eq!(PdClass::from_index(c.index()), Some(c));
        }
        assert!("X".parse::<PdClass>().is_err());
        assert_eq!(PdClass::SI.constituents(), &[PdClass::S, PdClass::I]);
    }
}
