//! Trains a random forest on a toy problem, then saves and reloads it.
//!
//! cargo run --release --example forest

use pdawa::forest::{train, ForestConfig, ForestModel, TrainingSet};
use pdawa::PdClass;
use rand::{Rng, SeedableRng};

fn main() -> pdawa::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let mut sample = |n: usize| {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..n {
            let class = PdClass::ALL[rng.random_range(0..PdClass::COUNT)];
            let centre = class.index() as f64;
            rows.push(vec![
                centre + rng.random_range(-0.4..0.4),
                rng.random_range(0.0..1.0),
                (centre * 0.5).sin() + rng.random_range(-0.2..0.2),
            ]);
            labels.push(class);
        }
        (rows, labels)
    };
    let (x, y) = sample(600);
    let (tx, ty) = sample(200);

    let cfg = ForestConfig {
        n_trees: 50,
        features_per_split: 2,
        ..ForestConfig::default()
    };
    let names = vec!["centre".into(), "noise".into(), "wave".into()];
    let model = train(TrainingSet::new(&x, &y)?, names, &cfg)?;

    let path = std::env::temp_dir().join("pdawa-forest.json");
    model.save(&path)?;
    let loaded = ForestModel::load(&path)?;

    let mut correct = 0;
    for (row, truth) in tx.iter().zip(&ty) {
        let p = loaded.predict(row)?;
        assert_eq!(p.class, model.predict(row)?.class);
        correct += usize::from(p.class == *truth);
    }
    println!(
        "test accuracy {:.1}% with {} trees (model at {})",
        100.0 * correct as f64 / ty.len() as f64,
        loaded.trees.len(),
        path.display()
    );
    Ok(())
}
