mod common;

use common::{score_run, Recovery};
use pdawa::simulator::{default_config, ground_truth, record_times, simulate, stream_seed};
use pdawa::PdClass;

#[test]
fn noiseless_isolated_pulses_are_recovered() {
    let mut cfg = default_config();
    cfg.noise_sigma = 0.0;
    for class in PdClass::ALL {
        let mut total = Recovery::default();
        for run in 0..3 {
            total.merge(score_run(class, &cfg, run, 0.02, 0.05));
        }
        assert!(total.isolated > 0, "{class}: no isolated pulses");
        assert!(total.rate() >= 0.99, "{class}: {total:?}");
        assert_eq!(total.outside_windows, 0, "{class}: {total:?}");
    }
}

#[test]
fn runs_are_reproducible_and_distinct() {
    let cfg = default_config();
    let a = simulate(PdClass::CS, &cfg, 4).unwrap();
    let b = simulate(PdClass::CS, &cfg, 4).unwrap();
    let c = simulate(PdClass::CS, &cfg, 5).unwrap();
    assert_eq!(a.values(), b.values());
    assert_ne!(a.values(), c.values());
    assert_eq!(a.len(), record_times(&cfg).len());
}

#[test]
fn mixed_classes_are_unions_of_their_constituents() {
    let cfg = default_config();
    let mixed = ground_truth(PdClass::SI, &cfg, 2).unwrap();
    let s = ground_truth(PdClass::S, &cfg, 2).unwrap();
    let i = ground_truth(PdClass::I, &cfg, 2).unwrap();
    assert_eq!(mixed.len(), s.len() + i.len());
    assert!(s.iter().chain(&i).all(|p| mixed.contains(p)));
    assert!(mixed.windows(2).all(|w| w[0].time <= w[1].time));
}

#[test]
fn stream_seeds_depend_on_order() {
    assert_ne!(stream_seed(&[1, 2]), stream_seed(&[2, 1]));
    assert_eq!(stream_seed(&[7, 8, 9]), stream_seed(&[7, 8, 9]));
}
