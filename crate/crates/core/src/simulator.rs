//! Synthetic PD-channel waveforms under trapezoidal switching excitation.
//!
//! Pulses cluster after each rising and falling edge. Every draw comes from a
//! ChaCha stream seeded by a hash of `(master_seed, population, run, edge,
//! pulse)`, so a run is reproducible on its own and independent of the order
//! in which runs are generated. Mixed classes are the union of their two
//! single-source populations, each drawn from that population's own streams.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{PdClass, Waveform};

const DEFAULT_CONFIG_JSON: &str = include_str!("../config/simulator_default.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ExcitationConfig {
    /// Hz.
    pub frequency: f64,
    /// Fraction of the period at the high level.
    pub duty: f64,
    /// Rise and fall time, seconds.
    pub edge_time: f64,
    /// Volts; only used for the optional excitation trace.
    pub peak_voltage: f64,
    pub n_cycles: u32,
    /// Samples per second.
    pub sample_rate: f64,
}

impl ExcitationConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.frequency > 0.0
            && self.frequency.is_finite()
            && self.duty > 0.0
            && self.duty < 1.0
            && self.edge_time > 0.0
            && self.edge_time < self.duty / self.frequency
            && self.sample_rate.is_finite()
            && self.sample_rate * self.edge_time >= 10.0
            && self.n_cycles >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid excitation config {self:?}")))
        }
    }

    pub fn period(&self) -> f64 {
        1.0 / self.frequency
    }

    pub fn duration(&self) -> f64 {
        self.n_cycles as f64 / self.frequency
    }

    pub fn n_edges(&self) -> usize {
        2 * self.n_cycles as usize
    }

    /// Start time of switching edge `e`; even edges rise, odd edges fall.
    /// The first rising edge sits `(1 - duty) * T / 2` into the record.
    pub fn edge_start(&self, edge: usize) -> f64 {
        let t = self.period();
        let cycle = (edge / 2) as f64;
        let lead = (1.0 - self.duty) * t / 2.0;
        let start = cycle * t + lead;
        if edge % 2 == 0 {
            start
        } else {
            start + self.duty * t
        }
    }

    /// Trapezoidal excitation level at time `t`.
    pub fn voltage_at(&self, t: f64) -> f64 {
        let period = self.period();
        let lead = (1.0 - self.duty) * period / 2.0;
        let phase = (t - lead).rem_euclid(period);
        let high_end = self.duty * period;
        let v = self.peak_voltage;
        if phase < self.edge_time {
            v * phase / self.edge_time
        } else if phase < high_end {
            v
        } else if phase < high_end + self.edge_time {
            v * (1.0 - (phase - high_end) / self.edge_time)
        } else {
            0.0
        }
    }
}

/// Log-normal draw parameterized by its median and log-space sigma.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct LogNormalSpec {
    pub median: f64,
    pub log_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ClassPulseModel {
    /// Poisson mean of pulses per edge.
    pub pulses_per_edge: f64,
    /// Pulses fall in `[edge_start, edge_start + edge_jitter]`, seconds.
    pub edge_jitter: f64,
    /// Minimum spacing between pulses of this population within one edge,
    /// seconds. The per-edge count is capped at what fits.
    pub min_separation: f64,
    /// Volts.
    pub amplitude: LogNormalSpec,
    /// Seconds.
    pub width: LogNormalSpec,
    /// Correlation of log-amplitude and log-width.
    pub correlation: f64,
    /// Widths are clamped to `[lo, hi]` seconds.
    pub width_bounds: [f64; 2],
    pub outlier_probability: f64,
    /// Amplitude multiplier for outliers.
    pub outlier_scale: f64,
}

impl ClassPulseModel {
    pub fn validate(&self) -> Result<()> {
        let ok = self.pulses_per_edge > 0.0
            && self.pulses_per_edge.is_finite()
            && self.edge_jitter > 0.0
            && self.min_separation >= 0.0
            && self.amplitude.median > 0.0
            && self.amplitude.log_sigma >= 0.0
            && self.width.median > 0.0
            && self.width.log_sigma >= 0.0
            && self.correlation.abs() <= 1.0
            && self.width_bounds[0] > 0.0
            && self.width_bounds[1] >= self.width_bounds[0]
            && (0.0..=1.0).contains(&self.outlier_probability)
            && self.outlier_scale > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid class pulse model {self:?}")))
        }
    }
}

/// Damped sinusoid `exp(-decay * t) * sin(2π carrier t)`. Only the ratio of
/// the two fixes the pulse shape; each pulse is time-scaled to its drawn width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct PulseShape {
    /// Hz.
    pub carrier_frequency: f64,
    /// 1/s.
    pub decay_constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Acquisition {
    /// Every sample of the full `n_cycles / frequency` record.
    Continuous,
    /// Only samples in `[edge_start - pre_edge, edge_start + edge_jitter + post_edge]`
    /// around each edge, like a segmented-memory capture triggered on the
    /// switching edges. Timestamps keep their absolute values.
    EdgeSegments { pre_edge: f64, post_edge: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SimulatorConfig {
    pub excitation: ExcitationConfig,
    /// Models for the single-source classes C, I and S.
    pub class_models: BTreeMap<PdClass, ClassPulseModel>,
    /// Volts, additive white Gaussian noise.
    pub noise_sigma: f64,
    pub pulse_shape: PulseShape,
    pub acquisition: Acquisition,
    pub master_seed: u64,
}

/// The shipped default configuration. The excitation matches the measurement
/// setup (60 Hz, 50 % duty, 18 µs edges, 20 cycles, 50 MS/s); the class
/// models are engineering stand-ins shaped after the published pattern
/// morphologies, not fitted statistics.
pub fn default_config() -> SimulatorConfig {
    serde_json::from_str(DEFAULT_CONFIG_JSON).expect("bundled simulator config is valid")
}

impl SimulatorConfig {
    pub fn validate(&self) -> Result<()> {
        self.excitation.validate()?;
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::invalid("noise_sigma must be finite and >= 0"));
        }
        let shape = self.pulse_shape;
        if !(shape.carrier_frequency > 0.0 && shape.decay_constant > 0.0) {
            return Err(Error::invalid(
                "pulse shape needs positive carrier frequency and decay constant",
            ));
        }
        if let Acquisition::EdgeSegments {
            pre_edge,
            post_edge,
        } = self.acquisition
        {
            if !(pre_edge >= 0.0 && post_edge >= 0.0) {
                return Err(Error::invalid("segment margins must be >= 0"));
            }
        }
        for class in [PdClass::C, PdClass::I, PdClass::S] {
            let model = self.class_models.get(&class).ok_or_else(|| {
                Error::invalid(format!("missing pulse model for class {class}"))
            })?;
            model.validate()?;
            if model.edge_jitter <= 2.0 * self.guard() {
                return Err(Error::invalid(format!(
                    "edge_jitter of class {class} is shorter than two samples"
                )));
            }
        }
        if let Some(mixed) = self.class_models.keys().find(|c| !c.is_single_source()) {
            return Err(Error::invalid(format!(
                "class {mixed} is a union of single-source models and takes no model of its own"
            )));
        }
        Ok(())
    }

    fn guard(&self) -> f64 {
        2.0 / self.excitation.sample_rate
    }

    fn model(&self, class: PdClass) -> &ClassPulseModel {
        &self.class_models[&class]
    }
}

/// Half-prominence geometry of the unit pulse `exp(-r τ) sin τ` on its first lobe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeSolution {
    /// Decay per radian of carrier phase, `decay / (2π carrier)`.
    pub ratio: f64,
    pub tau_peak: f64,
    pub peak: f64,
    pub tau_left: f64,
    pub tau_right: f64,
}

impl ShapeSolution {
    pub fn solve(shape: &PulseShape) -> Self {
        let ratio = shape.decay_constant / (2.0 * PI * shape.carrier_frequency);
        let g = |tau: f64| (-ratio * tau).exp() * tau.sin();
        let tau_peak = (1.0 / ratio).atan();
        let peak = g(tau_peak);
        let half = peak / 2.0;
        let tau_left = bisect(|t| g(t) - half, 0.0, tau_peak);
        let tau_right = bisect(|t| half - g(t), tau_peak, PI);
        ShapeSolution {
            ratio,
            tau_peak,
            peak,
            tau_left,
            tau_right,
        }
    }

    /// Half-prominence width of the unit pulse, in units of τ.
    pub fn unit_width(&self) -> f64 {
        self.tau_right - self.tau_left
    }

    /// Normalized unit pulse: 1 at the peak, 0 before onset.
    pub fn value(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            0.0
        } else {
            (-self.ratio * tau).exp() * tau.sin() / self.peak
        }
    }

    /// τ beyond which the envelope is below 1e-12 of the peak.
    fn support(&self) -> f64 {
        (self.peak * 1e12).ln() / self.ratio
    }
}

/// Root of `f` on `[lo, hi]` where `f(lo) < 0 <= f(hi)`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One injected pulse. `time` is the instant of the rectified maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InjectedPulse {
    pub time: f64,
    pub amplitude: f64,
    pub width: f64,
    /// +1 on rising edges, -1 on falling edges.
    pub polarity: f64,
    pub edge: usize,
    pub population: PdClass,
}

impl InjectedPulse {
    /// Time of the pulse onset given the shape geometry.
    pub fn onset(&self, shape: &ShapeSolution) -> f64 {
        self.time - shape.tau_peak * self.time_scale(shape)
    }

    /// Seconds per unit τ.
    pub fn time_scale(&self, shape: &ShapeSolution) -> f64 {
        self.width / shape.unit_width()
    }
}

const COUNT_STREAM: u64 = u64::MAX;
const NOISE_STREAM: u64 = u64::MAX - 1;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive 64-bit hash of a tuple of words.
pub fn stream_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x5EED_0F_A11_u64, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

fn stream(parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(parts))
}

fn population_pulses(
    population: PdClass,
    cfg: &SimulatorConfig,
    run_id: u64,
    edge: usize,
) -> Vec<InjectedPulse> {
    let model = cfg.model(population);
    let key = |pulse: u64| {
        [
            cfg.master_seed,
            population.index() as u64,
            run_id,
            edge as u64,
            pulse,
        ]
    };

    let mut rng = stream(&key(COUNT_STREAM));
    let drawn = Poisson::new(model.pulses_per_edge)
        .expect("validated rate")
        .sample(&mut rng) as usize;

    let guard = cfg.guard();
    let span = model.edge_jitter - 2.0 * guard;
    let capacity = if model.min_separation > 0.0 {
        (span / model.min_separation).floor() as usize + 1
    } else {
        usize::MAX
    };
    let k = drawn.min(capacity);
    if k == 0 {
        return Vec::new();
    }

    // Uniform placement conditioned on a minimum gap: draw in the shrunken
    // span, sort, then re-insert the gaps.
    let free = span - (k - 1) as f64 * model.min_separation;
    let mut offsets: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * free).collect();
    offsets.sort_by(f64::total_cmp);

    let edge_start = cfg.excitation.edge_start(edge);
    let polarity = if edge % 2 == 0 { 1.0 } else { -1.0 };
    let rho = model.correlation;
    offsets
        .iter()
        .enumerate()
        .map(|(j, offset)| {
            let mut rng = stream(&key(j as u64));
            let z_a: f64 = rng.sample(StandardNormal);
            let z_b: f64 = rng.sample(StandardNormal);
            let outlier = rng.random::<f64>() < model.outlier_probability;

            let z_w = rho * z_a + (1.0 - rho * rho).sqrt() * z_b;
            let mut amplitude = model.amplitude.median * (model.amplitude.log_sigma * z_a).exp();
            if outlier {
                amplitude *= model.outlier_scale;
            }
            let width = (model.width.median * (model.width.log_sigma * z_w).exp())
                .clamp(model.width_bounds[0], model.width_bounds[1]);
            InjectedPulse {
                time: edge_start + guard + offset + j as f64 * model.min_separation,
                amplitude,
                width,
                polarity,
                edge,
                population,
            }
        })
        .collect()
}

/// Injected pulses of one population for a run, in time order.
pub fn population_ground_truth(
    population: PdClass,
    cfg: &SimulatorConfig,
    run_id: u64,
) -> Vec<InjectedPulse> {
    (0..cfg.excitation.n_edges())
        .flat_map(|edge| population_pulses(population, cfg, run_id, edge))
        .collect()
}

/// The exact pulses `simulate` injects for `(class, cfg, run_id)`, sorted by time.
pub fn ground_truth(class: PdClass, cfg: &SimulatorConfig, run_id: u64) -> Result<Vec<InjectedPulse>> {
    cfg.validate()?;
    let mut pulses: Vec<InjectedPulse> = class
        .constituents()
        .iter()
        .flat_map(|&pop| population_ground_truth(pop, cfg, run_id))
        .collect();
    pulses.sort_by(|a, b| {
        a.time
            .total_cmp(&b.time)
            .then(a.population.cmp(&b.population))
    });
    Ok(pulses)
}

/// Sample indices (global grid `i / sample_rate`) covered by the record.
fn record_indices(cfg: &SimulatorConfig) -> Vec<u64> {
    let ex = &cfg.excitation;
    let fs = ex.sample_rate;
    let total = (ex.duration() * fs).floor() as u64;
    match cfg.acquisition {
        Acquisition::Continuous => (0..total).collect(),
        Acquisition::EdgeSegments {
            pre_edge,
            post_edge,
        } => {
            let jitter = [PdClass::C, PdClass::I, PdClass::S]
                .iter()
                .map(|&c| cfg.model(c).edge_jitter)
                .fold(0.0, f64::max);
            let mut out: Vec<u64> = Vec::new();
            for edge in 0..ex.n_edges() {
                let start = ex.edge_start(edge);
                let lo = ((start - pre_edge) * fs).ceil().max(0.0) as u64;
                let hi = (((start + jitter + post_edge) * fs).floor() as u64).min(total - 1);
                let from = match out.last() {
                    Some(&last) if last >= lo => last + 1,
                    _ => lo,
                };
                out.extend(from..=hi);
            }
            out
        }
    }
}

/// Renders injected pulses plus optional noise onto sample times.
pub fn synthesize(
    times: &[f64],
    pulses: &[InjectedPulse],
    shape: &PulseShape,
    noise_sigma: f64,
    noise_seed: u64,
) -> Vec<f64> {
    let solution = ShapeSolution::solve(shape);
    let support = solution.support();
    let mut values = vec![0.0; times.len()];
    for p in pulses {
        let scale = p.time_scale(&solution);
        let onset = p.onset(&solution);
        let end = onset + support * scale;
        let first = times.partition_point(|&t| t <= onset);
        let last = times.partition_point(|&t| t < end);
        for i in first..last {
            values[i] += p.polarity * p.amplitude * solution.value((times[i] - onset) / scale);
        }
    }
    if noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
        for v in values.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v += noise_sigma * z;
        }
    }
    values
}

/// Time stamps of the record produced for `cfg`.
pub fn record_times(cfg: &SimulatorConfig) -> Vec<f64> {
    let fs = cfg.excitation.sample_rate;
    record_indices(cfg)
        .into_iter()
        .map(|i| i as f64 / fs)
        .collect()
}

/// Synthetic PD-channel waveform for `(class, cfg, run_id)`.
pub fn simulate(class: PdClass, cfg: &SimulatorConfig, run_id: u64) -> Result<Waveform> {
    let pulses = ground_truth(class, cfg, run_id)?;
    let times = record_times(cfg);
    let noise_seed = stream_seed(&[cfg.master_seed, class.index() as u64, run_id, NOISE_STREAM]);
    let values = synthesize(&times, &pulses, &cfg.pulse_shape, cfg.noise_sigma, noise_seed);
    Ok(Waveform::new(times, values)?
        .with_label(class)
        .with_source_id(format!("{class}-{run_id:05}")))
}

/// The trapezoidal excitation sampled on the same time stamps as `w`.
pub fn excitation_waveform(cfg: &ExcitationConfig, w: &Waveform) -> Result<Waveform> {
    let values = w.times().iter().map(|&t| cfg.voltage_at(t)).collect();
    Waveform::new(w.times().to_vec(), values)
}

/// Ground-truth CSV with columns `time_s,amplitude_v,width_s`.
pub fn format_ground_truth_csv(pulses: &[InjectedPulse]) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("time_s,amplitude_v,width_s\n");
    for p in pulses {
        let _ = writeln!(out, "{:?},{:?},{:?}", p.time, p.amplitude, p.width);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet(mut cfg: SimulatorConfig) -> SimulatorConfig {
        cfg.noise_sigma = 0.0;
        cfg
    }

    #[test]
    fn default_excitation_values() {
        let cfg = default_config();
        cfg.validate().unwrap();
        assert_eq!(cfg.excitation.frequency, 60.0);
        assert_eq!(cfg.excitation.duty, 0.5);
        assert_eq!(cfg.excitation.edge_time, 18e-6);
        assert_eq!(cfg.excitation.n_cycles, 20);
        assert_eq!(cfg.excitation.sample_rate, 50e6);
    }

    #[test]
    fn edges_alternate_and_fit_in_record() {
        let ex = default_config().excitation;
        assert_eq!(ex.n_edges(), 40);
        let starts: Vec<f64> = (0..ex.n_edges()).map(|e| ex.edge_start(e)).collect();
        assert!(starts.windows(2).all(|w| w[1] > w[0]));
        assert!(*starts.last().unwrap() < ex.duration());
        assert!((ex.voltage_at(ex.edge_start(0) + ex.edge_time / 2.0) - ex.peak_voltage / 2.0).abs() < 1e-6);
        assert_eq!(ex.voltage_at(ex.edge_start(0) + ex.edge_time * 2.0), ex.peak_voltage);
        assert_eq!(ex.voltage_at(ex.edge_start(1) + ex.edge_time * 2.0), 0.0);
    }

    #[test]
    fn shape_solution_is_consistent() {
        let s = ShapeSolution::solve(&default_config().pulse_shape);
        assert!((s.value(s.tau_peak) - 1.0).abs() < 1e-15);
        assert!((s.value(s.tau_left) - 0.5).abs() < 1e-12);
        assert!((s.value(s.tau_right) - 0.5).abs() < 1e-12);
        assert!(s.tau_left < s.tau_peak && s.tau_peak < s.tau_right);
    }

    #[test]
    fn simulation_is_deterministic() {
        let cfg = default_config();
        let a = simulate(PdClass::SI, &cfg, 3).unwrap();
        let b = simulate(PdClass::SI, &cfg, 3).unwrap();
        assert_eq!(a, b);
        let c = simulate(PdClass::SI, &cfg, 4).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn mixed_classes_are_unions() {
        let cfg = default_config();
        for class in [PdClass::CI, PdClass::CS, PdClass::SI] {
            let mut union: Vec<InjectedPulse> = class
                .constituents()
                .iter()
                .flat_map(|&c| ground_truth(c, &cfg, 11).unwrap())
                .collect();
            union.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.population.cmp(&b.population)));
            assert_eq!(ground_truth(class, &cfg, 11).unwrap(), union);
        }
    }

    #[test]
    fn pulses_sit_in_edge_windows_with_separation() {
        let cfg = default_config();
        for class in [PdClass::C, PdClass::I, PdClass::S] {
            let model = &cfg.class_models[&class];
            let gt = ground_truth(class, &cfg, 0).unwrap();
            assert!(!gt.is_empty());
            for p in &gt {
                let start = cfg.excitation.edge_start(p.edge);
                assert!(p.time >= start && p.time <= start + model.edge_jitter);
                assert!(p.width >= model.width_bounds[0] && p.width <= model.width_bounds[1]);
            }
            for pair in gt.windows(2) {
                if pair[0].edge == pair[1].edge {
                    assert!(pair[1].time - pair[0].time >= model.min_separation * (1.0 - 1e-9));
                }
            }
        }
    }

    #[test]
    fn vanishing_rate_gives_no_pulses() {
        let mut cfg = default_config();
        for m in cfg.class_models.values_mut() {
            m.pulses_per_edge = 1e-9;
        }
        for class in PdClass::ALL {
            assert!(ground_truth(class, &cfg, 1).unwrap().is_empty());
        }
        let w = simulate(PdClass::S, &quiet(cfg), 1).unwrap();
        assert!(w.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn segmented_record_has_increasing_times() {
        let cfg = default_config();
        let times = record_times(&cfg);
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        assert!(times.len() < 100_000);
        let mut cont = default_config();
        cont.excitation.n_cycles = 1;
        cont.excitation.sample_rate = 1e6;
        cont.acquisition = Acquisition::Continuous;
        assert_eq!(record_times(&cont).len(), (1e6 / 60.0) as usize);
    }

    #[test]
    fn rejects_invalid_configs() {
        let mut cfg = default_config();
        cfg.excitation.duty = 1.0;
        assert!(simulate(PdClass::C, &cfg, 0).is_err());

        let mut cfg = default_config();
        cfg.excitation.sample_rate = 1e5;
        assert!(cfg.validate().is_err());

        let mut cfg = default_config();
        cfg.class_models.get_mut(&PdClass::I).unwrap().correlation = 1.5;
        assert!(matches!(cfg.validate(), Err(Error::InvalidArgument(_))));

        let mut cfg = default_config();
        let model = cfg.class_models[&PdClass::C].clone();
        cfg.class_models.insert(PdClass::CI, model);
        assert!(cfg.validate().is_err());

        let mut cfg = default_config();
        cfg.class_models.remove(&PdClass::S);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn stream_seed_is_order_sensitive() {
        assert_ne!(stream_seed(&[1, 2]), stream_seed(&[2, 1]));
        assert_eq!(stream_seed(&[1, 2, 3]), stream_seed(&[1, 2, 3]));
    }
}
