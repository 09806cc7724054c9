//! Detects pulses in a hand-built record: a triangle and a sampled damped
//! sinusoid on a flat baseline.
//!
//! cargo run --release --example detect

use pdawa::detect::{detect_pulses, format_pulse_csv, DetectionConfig};
use pdawa::Waveform;

fn main() -> pdawa::Result<()> {
    let dt = 20e-9;
    let mut values = vec![0.0; 400];
    // Triangle of height 1 spanning 20 samples.
    for (k, v) in values[20..41].iter_mut().enumerate() {
        *v = 1.0 - (k as f64 - 10.0).abs() / 10.0;
    }
    // Damped 5 MHz oscillation starting at sample 200.
    for (k, v) in values[200..].iter_mut().enumerate() {
        let t = k as f64 * dt;
        *v = 0.4 * (-1.0e7 * t).exp() * (2.0 * std::f64::consts::PI * 5e6 * t).sin();
    }
    let w = Waveform::uniform(0.0, dt, values)?;

    let cfg = DetectionConfig::new(0.05, 0.05, true)?;
    let peaks = detect_pulses(&w, &cfg);
    for p in &peaks {
        println!(
            "t = {:>8.1} ns  height {:.4}  prominence {:.4}  width {:>6.1} ns",
            p.time * 1e9,
            p.height,
            p.prominence,
            p.width * 1e9
        );
    }
    print!("{}", format_pulse_csv(&peaks));
    Ok(())
}
