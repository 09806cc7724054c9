//! Builds an evaluation report from raw counts and renders its confusion
//! matrix. The same JSON form is accepted from external classifiers.
//!
//! cargo run --release --example confusion [out.png]

use pdawa::eval::{render_confusion_png, EvalReport};

fn main() -> pdawa::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("pdawa-confusion.png"));
    let counts = vec![
        vec![48, 2, 0, 0, 0, 0],
        vec![1, 45, 0, 4, 0, 0],
        vec![0, 0, 50, 0, 0, 0],
        vec![0, 6, 0, 44, 0, 0],
        vec![3, 0, 2, 0, 45, 0],
        vec![0, 0, 0, 0, 0, 0],
    ];
    let report = EvalReport::from_counts("example", counts, 0.0)?;
    let json = serde_json::to_string_pretty(&report)?;
    let back = EvalReport::from_json(&json)?;
    println!(
        "accuracy {:.2}%, empty rows {:?}",
        back.overall_accuracy, back.empty_rows
    );
    std::fs::write(&out, render_confusion_png(&back)?).expect("write png");
    println!("confusion matrix -> {}", out.display());
    Ok(())
}
