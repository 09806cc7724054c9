use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pdawa::awa::{self, render_awa, AxisRanges, Range, RenderConfig};
use pdawa::dataset::{self, AugmentSpec, DatasetManifest, Source, SplitRatios};
use pdawa::detect::{detect_pulses, format_pulse_csv, DetectionConfig};
use pdawa::eval::{render_confusion_png, EvalReport};
use pdawa::features::{self, feature_names};
use pdawa::forest::{self, ForestConfig, ForestModel, TrainingSet};
use pdawa::pipeline::{self, PipelineConfig};
use pdawa::signal::{self, PdClass};
use pdawa::simulator::{self, SimulatorConfig};
use pdawa::{Error, Result};

#[derive(Parser)]
#[command(name = "pdawa", version, about = "Partial-discharge AWA toolkit")]
struct Cli {
    /// Worker threads; outputs do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate waveforms and ground truth for one class.
    Simulate(SimulateArgs),
    /// Detect pulses in a waveform CSV.
    Detect(DetectArgs),
    /// Render a pulse-list CSV as an AWA image.
    Render(RenderArgs),
    /// Build or verify an image dataset.
    #[command(subcommand)]
    Dataset(DatasetCommand),
    /// Extract handcrafted features from a directory of class folders.
    Features(FeaturesArgs),
    /// Train a random forest on a features CSV.
    TrainRf(TrainArgs),
    /// Predict classes for a features CSV.
    PredictRf(PredictArgs),
    /// Evaluate a model, or render and gate an existing report.
    Eval(EvalArgs),
    /// Run the whole synthetic experiment.
    All(AllArgs),
    /// Print version information or the configuration schema.
    Info(InfoArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    class: PdClass,
    #[arg(long, default_value_t = 1)]
    runs: u64,
    /// Simulator config JSON; the bundled default otherwise.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Defaults to a noise-referenced threshold.
    #[arg(long)]
    min_height: Option<f64>,
    /// Defaults to the height threshold.
    #[arg(long)]
    min_prominence: Option<f64>,
    /// Detect on signed values instead of magnitudes.
    #[arg(long)]
    no_abs: bool,
    /// Output CSV; stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    /// Pulse-list CSV as written by `detect`.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = awa::DEFAULT_IMAGE_SIZE)]
    size: u32,
    #[arg(long, default_value_t = 2)]
    radius: u32,
    /// Upper bounds `amplitude,area,width`; lower bounds are 0.
    #[arg(long, conflicts_with = "auto_ranges_from")]
    ranges: Option<String>,
    /// Use the shared ranges recorded in a dataset manifest.
    #[arg(long)]
    auto_ranges_from: Option<PathBuf>,
}

#[derive(Subcommand)]
enum DatasetCommand {
    /// Render, split and augment pulse lists laid out as `<dir>/<class>/<id>.csv`.
    Build(BuildArgs),
    /// Check a built dataset for leakage and on-disk mismatches.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    pulses: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Pipeline config supplying image, augmentation and split settings.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    multiplier: Option<usize>,
    #[arg(long)]
    size: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    dir: PathBuf,
}

#[derive(Args)]
struct FeaturesArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Forest config JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trees: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    features: PathBuf,
    /// Output CSV; stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, requires = "features", conflicts_with = "report")]
    model: Option<PathBuf>,
    #[arg(long)]
    features: Option<PathBuf>,
    /// Existing report JSON, e.g. from an external classifier.
    #[arg(long, required_unless_present = "model")]
    report: Option<PathBuf>,
    /// Directory for report.json and confusion.png.
    #[arg(long)]
    out: PathBuf,
    /// Fail with exit code 1 below this overall accuracy (percent).
    #[arg(long)]
    min_accuracy: Option<f64>,
}

#[derive(Args)]
struct AllArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InfoArgs {
    /// Dump the pipeline config JSON schema.
    #[arg(long)]
    schema: bool,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.into(),
            source: e,
        })?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes to stdout; a closed pipe ends output quietly.
fn print(text: &str) -> Result<()> {
    use std::io::Write as _;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io {
            path: "<stdout>".into(),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write(path, text),
        None => print(text),
    }
}

fn simulate(args: SimulateArgs) -> Result<ExitCode> {
    let mut cfg: SimulatorConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => simulator::default_config(),
    };
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    cfg.validate()?;
    for run in 0..args.runs {
        let w = simulator::simulate(args.class, &cfg, run)?;
        let gt = simulator::ground_truth(args.class, &cfg, run)?;
        let id = &w.source_id;
        write(&args.out.join(format!("{id}.csv")), signal::format_waveform_csv(&w))?;
        write(
            &args.out.join(format!("{id}_gt.csv")),
            simulator::format_ground_truth_csv(&gt),
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

fn detect(args: DetectArgs) -> Result<ExitCode> {
    let w = signal::read_waveform_csv(&args.input)?;
    let auto = DetectionConfig::noise_referenced(&w);
    let min_height = args.min_height.unwrap_or(auto.min_height);
    let min_prominence = args
        .min_prominence
        .unwrap_or(min_height.max(f64::MIN_POSITIVE));
    let cfg = DetectionConfig::new(min_height, min_prominence, !args.no_abs)?;
    emit(args.out.as_deref(), &format_pulse_csv(&detect_pulses(&w, &cfg)))?;
    Ok(ExitCode::SUCCESS)
}

fn parse_ranges(text: &str) -> Result<AxisRanges> {
    let his: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| invalid(format!("--ranges expects three numbers, got `{text}`")))?;
    let [a, r, w] = his[..] else {
        return Err(invalid(format!("--ranges expects three numbers, got `{text}`")));
    };
    Ok(AxisRanges {
        amplitude: Range::new(0.0, a),
        area: Range::new(0.0, r),
        width: Range::new(0.0, w),
    })
}

fn render(args: RenderArgs) -> Result<ExitCode> {
    let pulses = awa::read_pulse_csv(&args.input)?;
    let ranges = match (&args.ranges, &args.auto_ranges_from) {
        (Some(text), _) => parse_ranges(text)?,
        (None, Some(manifest)) => DatasetManifest::load(manifest)?.axis_ranges,
        (None, None) => awa::auto_ranges([pulses.as_slice()])?,
    };
    let cfg = RenderConfig {
        point_radius: args.radius,
        ..RenderConfig::with_ranges(ranges).with_size(args.size)
    };
    write(&args.out, render_awa(&pulses, &cfg)?.to_png()?)?;
    Ok(ExitCode::SUCCESS)
}

fn read_sources(dir: &Path) -> Result<Vec<Source>> {
    let mut sources = Vec::new();
    for class in PdClass::ALL {
        let class_dir = dir.join(class.as_str());
        let entries = match std::fs::read_dir(&class_dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => continue,
            Err(e) => {
                return Err(Error::Io {
                    path: class_dir,
                    source: e,
                })
            }
        };
        let mut paths: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .collect();
        paths.sort();
        for path in paths {
            let id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or_default()
                .to_string();
            sources.push(Source {
                id,
                class,
                pulses: awa::read_pulse_csv(&path)?,
            });
        }
    }
    Ok(sources)
}

fn dataset_build(args: BuildArgs) -> Result<ExitCode> {
    let base = match &args.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    let mut image = base.image;
    if let Some(size) = args.size {
        image.size = size;
    }
    let augment = AugmentSpec {
        multiplier: args.multiplier.unwrap_or(base.augment.multiplier),
        ..base.augment
    };
    let split: SplitRatios = base.split;
    let seed = args.seed.unwrap_or(base.master_seed);
    let sources = read_sources(&args.pulses)?;
    let manifest = dataset::build_dataset(
        &sources,
        &image.render_config(),
        &augment,
        &split,
        seed,
        &args.out,
    )?;
    print(&format!(
        "{} images written to {}\n",
        manifest.records.len(),
        args.out.display()
    ))?;
    Ok(ExitCode::SUCCESS)
}

fn dataset_verify(args: VerifyArgs) -> Result<ExitCode> {
    let manifest = DatasetManifest::load(&args.dir.join(dataset::MANIFEST_FILE))?;
    let report = dataset::verify_integrity(&manifest, &args.dir)?;
    print(&format!("{}\n", serde_json::to_string_pretty(&report)?))?;
    Ok(if report.is_clean() {
        ExitCode::SUCCESS
    } else {
        eprintln!("dataset integrity check failed");
        ExitCode::from(1)
    })
}

fn features(args: FeaturesArgs) -> Result<ExitCode> {
    let rows = features::extract_dir(&args.input)?;
    features::write_features_csv(&rows, &args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn train_rf(args: TrainArgs) -> Result<ExitCode> {
    let mut cfg: ForestConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => ForestConfig::default(),
    };
    if let Some(n) = args.trees {
        cfg.n_trees = n;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let rows = features::read_features_csv(&args.features)?;
    let (x, y): (Vec<Vec<f64>>, Vec<PdClass>) =
        rows.into_iter().map(|r| (r.values, r.class)).unzip();
    let model = forest::train(TrainingSet::new(&x, &y)?, feature_names(), &cfg)?;
    model.save(&args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn predict_rf(args: PredictArgs) -> Result<ExitCode> {
    use std::fmt::Write as _;
    let model = ForestModel::load(&args.model)?;
    let rows = features::read_features_csv(&args.features)?;
    let mut out = String::from("image_id,class,predicted");
    for c in PdClass::ALL {
        let _ = write!(out, ",votes_{c}");
    }
    out.push('\n');
    for row in &rows {
        let p = model.predict(&row.values)?;
        let _ = write!(out, "{},{},{}", row.image_id, row.class, p.class);
        for v in &p.votes {
            let _ = write!(out, ",{v:?}");
        }
        out.push('\n');
    }
    emit(args.out.as_deref(), &out)?;
    Ok(ExitCode::SUCCESS)
}

fn eval(args: EvalArgs) -> Result<ExitCode> {
    let report = match (&args.model, &args.features, &args.report) {
        (Some(model), Some(features), _) => {
            let model = ForestModel::load(model)?;
            let rows = features::read_features_csv(features)?;
            pipeline::evaluate_model(&model, &rows)?
        }
        (_, _, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            EvalReport::from_json(&text)?
        }
        _ => return Err(invalid("pass --model with --features, or --report")),
    };
    write(
        &args.out.join("report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    write(&args.out.join("confusion.png"), render_confusion_png(&report)?)?;
    print(&format!("overall accuracy: {:.2}%\n", report.overall_accuracy))?;
    if let Some(gate) = args.min_accuracy {
        if report.overall_accuracy < gate {
            eprintln!(
                "accuracy {:.2}% is below the {gate:.2}% gate",
                report.overall_accuracy
            );
            return Ok(ExitCode::from(1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn all(args: AllArgs) -> Result<ExitCode> {
    let mut cfg = match &args.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = args.out {
        cfg.out_dir = out;
    }
    let report = pipeline::run_pipeline(&cfg)?;
    print(&format!(
        "overall accuracy: {:.2}% on {} test images ({})\n",
        report.overall_accuracy,
        report.n_test,
        cfg.out_dir.display()
    ))?;
    Ok(ExitCode::SUCCESS)
}

fn info(args: InfoArgs) -> Result<ExitCode> {
    if args.schema {
        print(&format!(
            "{}\n",
            serde_json::to_string_pretty(&PipelineConfig::schema())?
        ))?;
        return Ok(ExitCode::SUCCESS);
    }
    print(&format!(
        "pdawa {}\n\
         pipeline config version: {}\n\
         dataset manifest version: {}\n\
         model format version: {}\n\
         determinism: all randomness derives from the master seed; \
         outputs do not depend on --threads; report timing fields vary between runs\n",
        env!("CARGO_PKG_VERSION"),
        pipeline::CONFIG_VERSION,
        dataset::MANIFEST_VERSION,
        forest::FORMAT_VERSION,
    ))?;
    Ok(ExitCode::SUCCESS)
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Simulate(a) => simulate(a),
        Command::Detect(a) => detect(a),
        Command::Render(a) => render(a),
        Command::Dataset(DatasetCommand::Build(a)) => dataset_build(a),
        Command::Dataset(DatasetCommand::Verify(a)) => dataset_verify(a),
        Command::Features(a) => features(a),
        Command::TrainRf(a) => train_rf(a),
        Command::PredictRf(a) => predict_rf(a),
        Command::Eval(a) => eval(a),
        Command::All(a) => all(a),
        Command::Info(a) => info(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match pipeline::with_threads(cli.threads, || run(cli.command)).and_then(|r| r) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
