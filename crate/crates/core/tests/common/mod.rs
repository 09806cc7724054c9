//! Brute-force reference implementations used as test oracles. Each one is
//! written from the definitions, independently of the library code.

#![allow(dead_code)]

use pdawa::PdClass;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One reference peak: index, height, prominence, width.
#[derive(Debug, Clone, Copy)]
pub struct RefPeak {
    pub index: usize,
    pub prominence: f64,
    pub width: f64,
}

/// `i` starts a plateau (possibly of length one) that rises strictly from the
/// left and falls strictly on the right, away from both ends.
fn is_peak_start(v: &[f64], i: usize) -> bool {
    if i == 0 || i + 1 >= v.len() || v[i - 1] >= v[i] {
        return false;
    }
    match v[i + 1..].iter().find(|&&x| x != v[i]) {
        Some(&next) => next < v[i],
        None => false,
    }
}

/// Quadratic-time peak search following the definitions literally.
pub fn brute_force_peaks(times: &[f64], v: &[f64], min_height: f64, min_prominence: f64) -> Vec<RefPeak> {
    let mut out = Vec::new();
    for i in 0..v.len() {
        if !is_peak_start(v, i) || v[i] < min_height {
            continue;
        }
        let h = v[i];
        // Each side extends until the first strictly higher sample.
        let left_stop = (0..i).rev().find(|&j| v[j] > h).map_or(0, |j| j + 1);
        let right_stop = (i + 1..v.len()).find(|&j| v[j] > h).unwrap_or(v.len());
        let left_min = v[left_stop..i].iter().copied().fold(f64::INFINITY, f64::min);
        let right_min = v[i + 1..right_stop].iter().copied().fold(f64::INFINITY, f64::min);
        let prominence = h - left_min.max(right_min);
        if prominence < min_prominence {
            continue;
        }
        let level = h - prominence / 2.0;

        // Nearest sample at or below the level on each side, then linear
        // interpolation toward the peak.
        let l = (left_stop..i).rev().find(|&j| v[j] <= level).expect("left min is below level");
        let left = if v[l] == level {
            times[l]
        } else {
            let f = (level - v[l]) / (v[l + 1] - v[l]);
            times[l] + f * (times[l + 1] - times[l])
        };
        let r = (i + 1..right_stop).find(|&j| v[j] <= level).expect("right min is below level");
        let right = if v[r] == level {
            times[r]
        } else {
            let f = (level - v[r]) / (v[r - 1] - v[r]);
            times[r] - f * (times[r] - times[r - 1])
        };
        out.push(RefPeak {
            index: i,
            prominence,
            width: right - left,
        });
    }
    out
}

/// Random test signal: a mix of smooth bumps, plateaus (values snapped to a
/// coarse grid) and noise.
pub fn random_signal(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<f64> {
    let n = rng.random_range(3..=max_len);
    let style = rng.random_range(0..3);
    (0..n)
        .map(|i| {
            let x = i as f64;
            let raw = match style {
                0 => rng.random::<f64>(),
                1 => (x * 0.37).sin() + 0.3 * (x * 1.3).cos() + 0.2 * rng.random::<f64>(),
                _ => rng.random_range(-2.0..2.0),
            };
            if rng.random_bool(0.5) {
                (raw * 4.0).round() / 4.0
            } else {
                raw
            }
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Exhaustive best split by weighted Gini impurity: every feature, every
/// midpoint between distinct sorted values. Ties resolve to the lowest
/// feature, then the lowest threshold.
pub fn brute_force_split(rows: &[Vec<f64>], labels: &[PdClass], min_leaf: usize) -> Option<(usize, f64, f64)> {
    let n = rows.len();
    let gini_weighted = |idx: &[usize]| -> f64 {
        if idx.is_empty() {
            return 0.0;
        }
        let mut counts = [0usize; 6];
        for &i in idx {
            counts[labels[i].index()] += 1;
        }
        let m = idx.len() as f64;
        let sum_sq: f64 = counts.iter().map(|&c| (c as f64 / m).powi(2)).sum();
        m * (1.0 - sum_sq)
    };
    let mut best: Option<(usize, f64, f64)> = None;
    for f in 0..rows[0].len() {
        let mut values: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let thr = w[0] + (w[1] - w[0]) / 2.0;
            let thr = if thr >= w[1] { w[0] } else { thr };
            let left: Vec<usize> = (0..n).filter(|&i| rows[i][f] <= thr).collect();
            let right: Vec<usize> = (0..n).filter(|&i| rows[i][f] > thr).collect();
            if left.len() < min_leaf || right.len() < min_leaf {
                continue;
            }
            let g = gini_weighted(&left) + gini_weighted(&right);
            if best.is_none_or(|(_, _, bg)| g < bg - 1e-9) {
                best = Some((f, thr, g));
            }
        }
    }
    best
}

/// Outcome of matching detected peaks against injected pulses.
#[derive(Debug, Clone, Copy, Default)]
pub struct Recovery {
    /// Injected pulses with no other pulse closer than the minimum separation.
    pub isolated: usize,
    /// Isolated pulses recovered within the amplitude and width tolerances.
    pub recovered: usize,
    pub worst_amplitude_error: f64,
    pub worst_width_error: f64,
    /// Detected peaks lying outside every edge window.
    pub outside_windows: usize,
    pub injected: usize,
    pub detected: usize,
}

impl Recovery {
    pub fn merge(&mut self, o: Recovery) {
        self.isolated += o.isolated;
        self.recovered += o.recovered;
        self.worst_amplitude_error = self.worst_amplitude_error.max(o.worst_amplitude_error);
        self.worst_width_error = self.worst_width_error.max(o.worst_width_error);
        self.outside_windows += o.outside_windows;
        self.injected += o.injected;
        self.detected += o.detected;
    }

    pub fn rate(&self) -> f64 {
        self.recovered as f64 / self.isolated.max(1) as f64
    }
}

/// Simulates one run and scores detection against the ground truth. A pulse
/// counts as recovered when the nearest detected peak lies within half its
/// width and matches amplitude within `amp_tol` and width within `width_tol`.
pub fn score_run(
    class: PdClass,
    cfg: &pdawa::simulator::SimulatorConfig,
    run: u64,
    amp_tol: f64,
    width_tol: f64,
) -> Recovery {
    use pdawa::detect::{detect_pulses, DetectionConfig};
    use pdawa::simulator::{ground_truth, simulate};

    let w = simulate(class, cfg, run).unwrap();
    let truth = ground_truth(class, cfg, run).unwrap();
    let peaks = detect_pulses(&w, &DetectionConfig::noise_referenced(&w));
    let gap = cfg
        .class_models
        .values()
        .map(|m| m.min_separation)
        .fold(f64::INFINITY, f64::min);
    let jitter = cfg
        .class_models
        .values()
        .map(|m| m.edge_jitter)
        .fold(0.0, f64::max);

    let mut out = Recovery {
        injected: truth.len(),
        detected: peaks.len(),
        ..Recovery::default()
    };
    for (k, p) in truth.iter().enumerate() {
        let crowded = truth
            .iter()
            .enumerate()
            .any(|(j, q)| j != k && (q.time - p.time).abs() < gap);
        if crowded {
            continue;
        }
        out.isolated += 1;
        let Some(best) = peaks
            .iter()
            .min_by(|a, b| (a.time - p.time).abs().total_cmp(&(b.time - p.time).abs()))
        else {
            continue;
        };
        if (best.time - p.time).abs() > p.width / 2.0 {
            continue;
        }
        let ea = (best.height - p.amplitude).abs() / p.amplitude;
        let ew = (best.width - p.width).abs() / p.width;
        out.worst_amplitude_error = out.worst_amplitude_error.max(ea);
        out.worst_width_error = out.worst_width_error.max(ew);
        if ea <= amp_tol && ew <= width_tol {
            out.recovered += 1;
        }
    }
    for p in &peaks {
        let inside = (0..cfg.excitation.n_edges()).any(|e| {
            let s = cfg.excitation.edge_start(e);
            p.time >= s && p.time <= s + jitter
        });
        if !inside {
            out.outside_windows += 1;
        }
    }
    out
}

/// `per_class` sources per class with random pulse clouds. Classes differ in
/// where their clouds sit so rendered images never coincide.
pub fn random_sources(seed: u64, per_class: usize) -> Vec<pdawa::dataset::Source> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for class in PdClass::ALL {
        let k = class.index() as f64;
        for i in 0..per_class {
            let n = r.random_range(15..40);
            let pulses = (0..n)
                .map(|_| {
                    pdawa::PulseFeatures::new(
                        (0.1 + 0.12 * k + r.random_range(0.0..0.2)).min(1.0),
                        r.random_range(1e-7..(2.0 + k) * 2e-7),
                        r.random_range(0.0..1.0),
                    )
                })
                .collect();
            out.push(pdawa::dataset::Source {
                id: format!("{class}-{i:04}"),
                class,
                pulses,
            });
        }
    }
    out
}

/// Render configuration shared by dataset tests.
pub fn small_render(size: u32) -> pdawa::RenderConfig {
    pdawa::RenderConfig::with_ranges(pdawa::AxisRanges {
        amplitude: pdawa::Range::new(0.0, 1.0),
        area: pdawa::Range::new(0.0, 1.6e-6),
        width: pdawa::Range::new(0.0, 1.6e-6),
    })
    .with_size(size)
}

/// Every file under `dir`, relative path to bytes.
pub fn read_tree(dir: &std::path::Path) -> std::collections::BTreeMap<String, Vec<u8>> {
    fn walk(root: &std::path::Path, dir: &std::path::Path, out: &mut std::collections::BTreeMap<String, Vec<u8>>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    let mut out = std::collections::BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}
