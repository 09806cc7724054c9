//! Simulates one record per PD class and compares detected pulses with the
//! injected ground truth.
//!
//! cargo run --release --example simulate [out_dir]

use pdawa::detect::{detect_pulses, DetectionConfig};
use pdawa::signal::{write_waveform_csv, PdClass};
use pdawa::simulator::{default_config, ground_truth, simulate};

fn main() -> pdawa::Result<()> {
    let out = std::env::args().nth(1).map(std::path::PathBuf::from);
    let cfg = default_config();
    println!(
        "{} edges, {} samples per record",
        cfg.excitation.n_edges(),
        pdawa::simulator::record_times(&cfg).len()
    );
    for class in PdClass::ALL {
        let w = simulate(class, &cfg, 0)?;
        let truth = ground_truth(class, &cfg, 0)?;
        let peaks = detect_pulses(&w, &DetectionConfig::noise_referenced(&w));
        let max = truth.iter().map(|p| p.amplitude).fold(0.0, f64::max);
        println!(
            "{class:>2}: {:>3} injected, {:>3} detected, largest {:.4} V",
            truth.len(),
            peaks.len(),
            max
        );
        if let Some(dir) = &out {
            std::fs::create_dir_all(dir).expect("create output directory");
            write_waveform_csv(&w, dir.join(format!("{}.csv", w.source_id)))?;
        }
    }
    Ok(())
}
