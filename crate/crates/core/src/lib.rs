//! Partial-discharge (PD) analysis under switching-voltage excitation.
//!
//! The pipeline turns time-domain PD waveforms into Amplitude–Width–Area
//! (AWA) pattern images and classifies six source conditions:
//!
//! - [`signal`]: waveform records and their CSV form
//! - [`detect`]: local maxima, prominence and half-prominence width
//! - [`awa`]: per-pulse features and the AWA raster
//! - [`simulator`]: synthetic PD waveforms with exact ground truth
//! - [`dataset`]: leak-free split, augmentation and integrity checks
//! - [`features`]: the 74-value handcrafted image descriptor
//! - [`forest`]: random forest over handcrafted features
//! - [`eval`]: accuracy, confusion matrices and timing
//! - [`pipeline`]: the end-to-end experiment driven by one config

pub mod awa;
pub mod dataset;
pub mod detect;
pub mod error;
pub mod eval;
pub mod features;
pub mod forest;
pub mod pipeline;
pub mod raster;
pub mod signal;
pub mod simulator;

pub use awa::{AwaImage, AxisRanges, PulseFeatures, Range, RenderConfig};
pub use detect::{DetectionConfig, Peak};
pub use error::{Error, Result};
pub use signal::{PdClass, Waveform};
