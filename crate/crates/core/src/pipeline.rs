//! The full synthetic experiment as one configurable run.
//!
//! Output layout under `out_dir`:
//!
//! ```text
//! config.json            resolved configuration
//! waveforms/<class>/     simulated records and ground truth (optional)
//! pulses/<class>/        detected pulse lists
//! dataset/               images + manifest.json
//! features/<subset>.csv
//! model.json
//! report.json
//! confusion.png
//! ```
//!
//! A `.partial` marker sits in `out_dir` until every stage has finished.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::awa::{extract_features, AxisRanges, Range, RenderConfig};
use crate::dataset::{self, AugmentSpec, Source, SplitRatios, Subset};
use crate::detect::{detect_pulses, format_pulse_csv, DetectionConfig};
use crate::error::{Error, Result};
use crate::eval::{evaluate, render_confusion_png, EvalReport};
use crate::features::{self, feature_names, LabeledFeatures};
use crate::forest::{self, ForestConfig, ForestModel, TrainingSet};
use crate::signal::{format_waveform_csv, PdClass};
use crate::simulator::{self, format_ground_truth_csv, SimulatorConfig};

pub const CONFIG_VERSION: u32 = 1;
pub const PARTIAL_MARKER: &str = ".partial";
pub const MODEL_NAME: &str = "random_forest";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct ImageSettings {
    pub size: u32,
    pub point_radius: u32,
    pub margin: u32,
}

impl Default for ImageSettings {
    fn default() -> Self {
        ImageSettings {
            size: crate::awa::DEFAULT_IMAGE_SIZE,
            point_radius: 2,
            margin: 8,
        }
    }
}

impl ImageSettings {
    /// Render settings with placeholder ranges; the dataset stage fills in
    /// the shared ranges.
    pub fn render_config(&self) -> RenderConfig {
        let unit = Range::new(0.0, 1.0);
        RenderConfig {
            point_radius: self.point_radius,
            margin: self.margin,
            ..RenderConfig::with_ranges(AxisRanges {
                amplitude: unit,
                area: unit,
                width: unit,
            })
            .with_size(self.size)
        }
    }
}

/// Every stage's settings in one document. Missing fields take their
/// defaults. The seeds inside `simulator` and `forest` are overwritten from
/// `master_seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub version: u32,
    pub out_dir: PathBuf,
    pub master_seed: u64,
    /// Simulated records per class; each becomes one original image.
    pub runs_per_class: usize,
    /// Persist the simulated waveforms and ground truth as CSV.
    pub write_waveforms: bool,
    pub simulator: SimulatorConfig,
    /// `None` references thresholds to each record's own noise level.
    pub detection: Option<DetectionConfig>,
    pub image: ImageSettings,
    pub augment: AugmentSpec,
    pub split: SplitRatios,
    pub forest: ForestConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let simulator = simulator::default_config();
        PipelineConfig {
            version: CONFIG_VERSION,
            out_dir: PathBuf::from("pdawa-out"),
            master_seed: simulator.master_seed,
            runs_per_class: 20,
            write_waveforms: true,
            simulator,
            detection: None,
            image: ImageSettings::default(),
            augment: AugmentSpec::default(),
            split: SplitRatios::default(),
            forest: ForestConfig::default(),
        }
    }
}

fn in_stage<T>(stage: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        e @ Error::Stage { .. } => e,
        e => Error::Stage {
            stage,
            source: Box::new(e),
        },
    })
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// JSON schema of the configuration document.
    pub fn schema() -> schemars::schema::RootSchema {
        schemars::schema_for!(PipelineConfig)
    }

    /// Copy with the master seed pushed into every seeded stage.
    pub fn resolved(&self) -> PipelineConfig {
        let mut cfg = self.clone();
        cfg.simulator.master_seed = self.master_seed;
        cfg.forest.seed = self.master_seed;
        cfg
    }

    /// Checks each stage's settings; failures name the stage.
    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::invalid(format!(
                "config version {} is not supported (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        in_stage("simulate", self.simulator.validate())?;
        if self.runs_per_class == 0 {
            return in_stage("simulate", Err(Error::invalid("runs_per_class must be >= 1")));
        }
        if let Some(d) = &self.detection {
            in_stage("detect", d.validate())?;
        }
        in_stage("render", self.image.render_config().validate())?;
        in_stage("dataset", self.split.validate())?;
        in_stage("dataset", self.augment.validate())?;
        in_stage("train-rf", self.forest.validate(features::N_FEATURES))
    }
}

/// Runs `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T, F>(threads: Option<usize>, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::invalid("--threads must be >= 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::invalid(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Simulates and detects every run, returning one pulse set per run.
fn simulate_and_detect(cfg: &PipelineConfig, out: &Path) -> Result<Vec<Source>> {
    for class in PdClass::ALL {
        in_stage("detect", create_dir(&out.join("pulses").join(class.as_str())))?;
        if cfg.write_waveforms {
            in_stage("simulate", create_dir(&out.join("waveforms").join(class.as_str())))?;
        }
    }
    let jobs: Vec<(PdClass, u64)> = PdClass::ALL
        .iter()
        .flat_map(|&c| (0..cfg.runs_per_class as u64).map(move |r| (c, r)))
        .collect();
    jobs.par_iter()
        .map(|&(class, run)| {
            let w = in_stage("simulate", simulator::simulate(class, &cfg.simulator, run))?;
            let id = w.source_id.clone();
            if cfg.write_waveforms {
                let dir = out.join("waveforms").join(class.as_str());
                let gt = simulator::ground_truth(class, &cfg.simulator, run)?;
                in_stage("simulate", write(&dir.join(format!("{id}.csv")), format_waveform_csv(&w)))?;
                in_stage(
                    "simulate",
                    write(&dir.join(format!("{id}_gt.csv")), format_ground_truth_csv(&gt)),
                )?;
            }
            let detection = cfg
                .detection
                .unwrap_or_else(|| DetectionConfig::noise_referenced(&w));
            let peaks = detect_pulses(&w, &detection);
            let path = out.join("pulses").join(class.as_str()).join(format!("{id}.csv"));
            in_stage("detect", write(&path, format_pulse_csv(&peaks)))?;
            Ok(Source {
                id,
                class,
                pulses: extract_features(&peaks),
            })
        })
        .collect()
}

fn training_rows(rows: &[LabeledFeatures]) -> (Vec<Vec<f64>>, Vec<PdClass>) {
    rows.iter().map(|r| (r.values.clone(), r.class)).unzip()
}

/// Runs every stage and returns the test-set report.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<EvalReport> {
    cfg.validate()?;
    let cfg = cfg.resolved();
    let out = cfg.out_dir.as_path();
    create_dir(out)?;
    let marker = out.join(PARTIAL_MARKER);
    write(&marker, "")?;
    write(&out.join("config.json"), cfg.to_json()?)?;

    let sources = simulate_and_detect(&cfg, out)?;

    let dataset_dir = out.join("dataset");
    let manifest = in_stage("dataset", {
        if dataset_dir.join(dataset::MANIFEST_FILE).exists() {
            std::fs::remove_dir_all(&dataset_dir).map_err(|e| Error::io(&dataset_dir, e))?;
        }
        dataset::build_dataset(
            &sources,
            &cfg.image.render_config(),
            &cfg.augment,
            &cfg.split,
            cfg.master_seed,
            &dataset_dir,
        )
    })?;
    let integrity = in_stage("dataset", dataset::verify_integrity(&manifest, &dataset_dir))?;
    if !integrity.is_clean() {
        return in_stage(
            "dataset",
            Err(Error::malformed(format!(
                "integrity check failed: {}",
                serde_json::to_string(&integrity)?
            ))),
        );
    }

    let features_dir = out.join("features");
    in_stage("features", create_dir(&features_dir))?;
    let mut by_subset = Vec::new();
    for subset in Subset::ALL {
        let rows = in_stage("features", features::extract_dir(&dataset_dir.join(subset.as_str())))?;
        in_stage(
            "features",
            features::write_features_csv(&rows, &features_dir.join(format!("{subset}.csv"))),
        )?;
        by_subset.push(rows);
    }
    let [train_rows, _, test_rows] = <[_; 3]>::try_from(by_subset).expect("three subsets");

    let model = in_stage("train-rf", {
        let (x, y) = training_rows(&train_rows);
        let data = TrainingSet::new(&x, &y)?;
        let model = forest::train(data, feature_names(), &cfg.forest)?;
        model.save(&out.join("model.json"))?;
        Ok(model)
    })?;

    let report = in_stage("eval", evaluate_model(&model, &test_rows))?;
    in_stage("eval", write(&out.join("report.json"), serde_json::to_string_pretty(&report)?))?;
    in_stage("eval", write(&out.join("confusion.png"), render_confusion_png(&report)?))?;

    std::fs::remove_file(&marker).map_err(|e| Error::io(&marker, e))?;
    Ok(report)
}

/// Evaluates a forest on labeled feature rows.
pub fn evaluate_model(model: &ForestModel, rows: &[LabeledFeatures]) -> Result<EvalReport> {
    let items: Vec<(&[f64], PdClass)> = rows.iter().map(|r| (r.values.as_slice(), r.class)).collect();
    evaluate(MODEL_NAME, &items, |x| Ok(model.predict(x)?.class))
}
