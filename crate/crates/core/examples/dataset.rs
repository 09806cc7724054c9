//! Builds a small leak-free dataset and verifies it.
//!
//! cargo run --release --example dataset [out_dir]

use pdawa::awa::extract_features;
use pdawa::dataset::{build_dataset, verify_integrity, AugmentSpec, Source, SplitRatios, Subset};
use pdawa::detect::{detect_pulses, DetectionConfig};
use pdawa::pipeline::ImageSettings;
use pdawa::simulator::{default_config, simulate};
use pdawa::PdClass;

fn main() -> pdawa::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("pdawa-dataset"));
    let _ = std::fs::remove_dir_all(&out);

    let cfg = default_config();
    let mut sources = Vec::new();
    for class in PdClass::ALL {
        for run in 0..10 {
            let w = simulate(class, &cfg, run)?;
            let peaks = detect_pulses(&w, &DetectionConfig::noise_referenced(&w));
            sources.push(Source {
                id: w.source_id.clone(),
                class,
                pulses: extract_features(&peaks),
            });
        }
    }

    let image = ImageSettings {
        size: 128,
        ..ImageSettings::default()
    };
    let augment = AugmentSpec {
        multiplier: 3,
        ..AugmentSpec::default()
    };
    let manifest = build_dataset(
        &sources,
        &image.render_config(),
        &augment,
        &SplitRatios::default(),
        7,
        &out,
    )?;
    let counts = manifest.counts();
    for class in PdClass::ALL {
        let n = |s| counts.get(&(class, s)).copied().unwrap_or(0);
        println!(
            "{class:>2}: train {} val {} test {}",
            n(Subset::Train),
            n(Subset::Val),
            n(Subset::Test)
        );
    }
    let report = verify_integrity(&manifest, &out)?;
    println!("integrity clean: {} ({})", report.is_clean(), out.display());
    Ok(())
}
