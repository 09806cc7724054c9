mod common;

use common::{brute_force_peaks, random_signal, rel_close, rng};
use pdawa::detect::{detect_pulses, find_local_maxima, prominence, DetectionConfig};
use pdawa::signal::{format_waveform_csv, parse_waveform_csv};
use pdawa::Waveform;
use proptest::prelude::*;

fn unit_wave(values: &[f64]) -> Waveform {
    Waveform::uniform(0.0, 1.0, values.to_vec()).unwrap()
}

fn signed_cfg(h: f64, p: f64) -> DetectionConfig {
    DetectionConfig::new(h, p, false).unwrap()
}

#[test]
fn matches_brute_force_on_seeded_signals() {
    let mut r = rng(11);
    for case in 0..300 {
        let v = random_signal(&mut r, 256);
        let times: Vec<f64> = (0..v.len()).map(|i| i as f64 * 0.5).collect();
        let w = Waveform::new(times.clone(), v.clone()).unwrap();
        let got = detect_pulses(&w, &signed_cfg(0.0, 1e-12));
        let want = brute_force_peaks(&times, &v, 0.0, 1e-12);
        let got_idx: Vec<usize> = got.iter().map(|p| p.index).collect();
        let want_idx: Vec<usize> = want.iter().map(|p| p.index).collect();
        assert_eq!(got_idx, want_idx, "case {case}: {v:?}");
        for (g, o) in got.iter().zip(&want) {
            assert!(rel_close(g.prominence, o.prominence, 1e-9), "case {case}");
            assert!(rel_close(g.width, o.width, 1e-9), "case {case}");
        }
    }
}

#[test]
fn prominence_rejects_non_peaks() {
    let v = [0.0, 1.0, 0.5, 2.0, 0.0];
    assert!(prominence(&v, 2).is_err());
    assert!(prominence(&v, 0).is_err());
    assert_eq!(prominence(&v, 3).unwrap().prominence, 2.0);
    assert_eq!(prominence(&v, 1).unwrap().prominence, 0.5);
}

#[test]
fn asymmetric_triangles_have_closed_form_width() {
    let mut r = rng(5);
    for _ in 0..200 {
        use rand::Rng;
        let rise = r.random_range(2..40usize);
        let fall = r.random_range(2..40usize);
        let dt = r.random_range(1e-9..1e-6);
        let height = r.random_range(0.1..10.0);
        let pad = 5;
        let mut v = vec![0.0; pad];
        v.extend((1..=rise).map(|k| height * k as f64 / rise as f64));
        v.extend((1..=fall).map(|k| height * (1.0 - k as f64 / fall as f64)));
        v.extend(vec![0.0; pad]);
        let w = Waveform::uniform(0.0, dt, v).unwrap();
        let peaks = detect_pulses(&w, &signed_cfg(0.0, 1e-12));
        assert_eq!(peaks.len(), 1);
        let want = dt * (rise + fall) as f64 / 2.0;
        assert!(rel_close(peaks[0].width, want, 1e-9), "{} vs {want}", peaks[0].width);
        assert!(rel_close(peaks[0].prominence, height, 1e-12));
    }
}

#[test]
fn rectified_bipolar_pulse_is_found_once() {
    let v = [0.0, -0.2, -1.0, -0.2, 0.0];
    let w = unit_wave(&v);
    let abs = DetectionConfig::new(0.5, 0.5, true).unwrap();
    let peaks = detect_pulses(&w, &abs);
    assert_eq!(peaks.len(), 1);
    assert_eq!(peaks[0].index, 2);
    assert_eq!(peaks[0].height, 1.0);
    assert!(detect_pulses(&w, &signed_cfg(0.5, 0.5)).is_empty());
}

fn signal_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![(-4i32..=4).prop_map(|k| k as f64 / 2.0), -2.0..2.0f64], 3..200)
}

proptest! {
    #[test]
    fn maxima_are_oracle_maxima(v in signal_strategy()) {
        let times: Vec<f64> = (0..v.len()).map(|i| i as f64).collect();
        let want: Vec<usize> = brute_force_peaks(&times, &v, f64::NEG_INFINITY, 0.0)
            .iter().map(|p| p.index).collect();
        prop_assert_eq!(find_local_maxima(&v), want);
    }

    #[test]
    fn raising_thresholds_only_removes_peaks(
        v in signal_strategy(),
        h in 0.0..1.5f64, dh in 0.0..1.0f64,
        p in 1e-6..1.0f64, dp in 0.0..1.0f64,
    ) {
        let w = unit_wave(&v);
        let loose: Vec<usize> = detect_pulses(&w, &signed_cfg(h, p)).iter().map(|x| x.index).collect();
        let strict: Vec<usize> = detect_pulses(&w, &signed_cfg(h + dh, p + dp)).iter().map(|x| x.index).collect();
        prop_assert!(strict.iter().all(|i| loose.contains(i)));
    }

    #[test]
    fn time_translation_shifts_peak_times(v in signal_strategy(), t0 in -1.0e3..1.0e3f64) {
        let base = unit_wave(&v);
        let shifted = Waveform::uniform(t0, 1.0, v.clone()).unwrap();
        let cfg = signed_cfg(0.0, 1e-9);
        let a = detect_pulses(&base, &cfg);
        let b = detect_pulses(&shifted, &cfg);
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.index, y.index);
            prop_assert_eq!(x.prominence, y.prominence);
            prop_assert!((x.width - y.width).abs() <= 1e-9 * (1.0 + t0.abs()));
            prop_assert!((y.time - x.time - t0).abs() <= 1e-9 * (1.0 + t0.abs()));
        }
    }

    #[test]
    fn time_scaling_scales_widths(v in signal_strategy(), k in 1e-9..1e3f64) {
        let base = unit_wave(&v);
        let scaled = base.scale_time(k).unwrap();
        let cfg = signed_cfg(0.0, 1e-9);
        let a = detect_pulses(&base, &cfg);
        let b = detect_pulses(&scaled, &cfg);
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.index, y.index);
            prop_assert!(rel_close(y.width, k * x.width, 1e-9));
        }
    }

    #[test]
    fn amplitude_scaling_keeps_indices(v in signal_strategy(), c in 1e-3..1e3f64) {
        let scaled: Vec<f64> = v.iter().map(|x| x * c).collect();
        let a = detect_pulses(&unit_wave(&v), &signed_cfg(0.1, 0.1));
        let b = detect_pulses(&unit_wave(&scaled), &signed_cfg(0.1 * c, 0.1 * c));
        let ia: Vec<usize> = a.iter().map(|p| p.index).collect();
        let ib: Vec<usize> = b.iter().map(|p| p.index).collect();
        prop_assert_eq!(ia, ib);
    }

    #[test]
    fn waveform_csv_round_trips(v in prop::collection::vec(-1e3..1e3f64, 2..100), t0 in -1.0..1.0f64) {
        let w = Waveform::uniform(t0, 2e-8, v).unwrap();
        let back = parse_waveform_csv(&format_waveform_csv(&w)).unwrap();
        prop_assert_eq!(back.times(), w.times());
        prop_assert_eq!(back.values(), w.values());
    }
}
