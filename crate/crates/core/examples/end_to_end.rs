//! Runs the full synthetic experiment at reduced scale: simulate, detect,
//! build the dataset, extract features, train and evaluate.
//!
//! cargo run --release --example end_to_end [out_dir]

use pdawa::pipeline::{run_pipeline, PipelineConfig};

fn main() -> pdawa::Result<()> {
    let mut cfg = PipelineConfig {
        runs_per_class: 30,
        write_waveforms: false,
        ..PipelineConfig::default()
    };
    cfg.out_dir = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("pdawa-e2e"));
    cfg.image.size = 128;
    cfg.augment.multiplier = 3;

    let report = run_pipeline(&cfg)?;
    println!(
        "accuracy {:.2}% on {} test images, {:.4} ms per image",
        report.overall_accuracy, report.n_test, report.mean_test_time_per_image_ms
    );
    for (class, row) in report.classes.iter().zip(&report.confusion) {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:5.1}")).collect();
        println!("{class:>2} | {}", cells.join(" "));
    }
    println!("artifacts in {}", cfg.out_dir.display());
    Ok(())
}
