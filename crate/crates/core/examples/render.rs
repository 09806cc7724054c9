//! Renders one AWA image per class with shared axis ranges.
//!
//! cargo run --release --example render [out_dir]

use pdawa::awa::{auto_ranges, extract_features, render_awa, RenderConfig};
use pdawa::detect::{detect_pulses, DetectionConfig};
use pdawa::simulator::{default_config, simulate};
use pdawa::PdClass;

fn main() -> pdawa::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("pdawa-render"));
    std::fs::create_dir_all(&out).expect("create output directory");

    let cfg = default_config();
    let mut sets = Vec::new();
    for class in PdClass::ALL {
        let w = simulate(class, &cfg, 0)?;
        let peaks = detect_pulses(&w, &DetectionConfig::noise_referenced(&w));
        sets.push((class, extract_features(&peaks)));
    }
    let ranges = auto_ranges(sets.iter().map(|(_, p)| p.as_slice()))?;
    let render = RenderConfig::with_ranges(ranges);
    for (class, pulses) in &sets {
        let img = render_awa(pulses, &render)?;
        let path = out.join(format!("{class}.png"));
        std::fs::write(&path, img.to_png()?).expect("write png");
        println!("{class:>2}: {:>3} pulses -> {}", img.n_pulses, path.display());
    }
    Ok(())
}
