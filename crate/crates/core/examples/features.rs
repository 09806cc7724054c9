//! Extracts the 74-value handcrafted descriptor from a rendered AWA image.
//!
//! cargo run --release --example features

use pdawa::awa::{auto_ranges, extract_features, render_awa, RenderConfig};
use pdawa::detect::{detect_pulses, DetectionConfig};
use pdawa::features::{extract, feature_names};
use pdawa::simulator::{default_config, simulate};
use pdawa::PdClass;

fn main() -> pdawa::Result<()> {
    let cfg = default_config();
    let w = simulate(PdClass::CS, &cfg, 3)?;
    let pulses = extract_features(&detect_pulses(&w, &DetectionConfig::noise_referenced(&w)));
    let render = RenderConfig::with_ranges(auto_ranges([pulses.as_slice()])?);
    let img = render_awa(&pulses, &render)?;

    let fv = extract(&img.image);
    println!(
        "{} foreground pixels, aspect ratio {:.3}",
        fv.fg_count, fv.aspect_ratio
    );
    for (name, value) in feature_names().iter().zip(fv.to_vec()).take(10) {
        println!("{name:>12} {value:.5}");
    }
    let occupied = fv.grid_occupancy.iter().filter(|&&v| v > 0.0).count();
    println!("{occupied} of 64 grid cells occupied");
    Ok(())
}
