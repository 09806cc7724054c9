//! Random forest classifier over handcrafted feature vectors.
//!
//! Trees are grown on bootstrap samples with Gini splits over a random feature
//! subset per node. Candidate thresholds are midpoints between consecutive
//! distinct values. Every tie (split score, leaf majority, forest vote) goes
//! to the lowest feature index, lowest threshold or lowest canonical class.

use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::PdClass;
use crate::simulator::stream_seed;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// `None` grows until purity or `min_samples_leaf`.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub features_per_split: usize,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 200,
            max_depth: None,
            min_samples_leaf: 1,
            features_per_split: 8,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self, n_features: usize) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::invalid("n_trees must be >= 1"));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::invalid("min_samples_leaf must be >= 1"));
        }
        if self.features_per_split == 0 || self.features_per_split > n_features {
            return Err(Error::invalid(format!(
                "features_per_split must be in 1..={n_features}, got {}",
                self.features_per_split
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node {
    Split {
        feat: usize,
        thr: f64,
        l: usize,
        r: usize,
    },
    Leaf {
        counts: Vec<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    /// Node 0 is the root; children always follow their parent.
    pub nodes: Vec<Node>,
}

impl Tree {
    fn leaf_for(&self, x: &[f64]) -> &[u64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split { feat, thr, l, r } => i = if x[*feat] <= *thr { *l } else { *r },
                Node::Leaf { counts } => return counts,
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        argmax_lowest(self.leaf_for(x))
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Split { l, r, .. } => 1 + go(nodes, *l).max(go(nodes, *r)),
                Node::Leaf { .. } => 0,
            }
        }
        go(&self.nodes, 0)
    }
}

fn argmax_lowest(counts: &[u64]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub version: u32,
    pub classes: Vec<PdClass>,
    pub feature_names: Vec<String>,
    pub config: ForestConfig,
    pub trees: Vec<Tree>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub class: PdClass,
    /// Share of trees voting for each class, canonical order.
    pub votes: Vec<f64>,
}

/// Training rows: `rows[i]` has label `labels[i]`.
#[derive(Debug, Clone, Copy)]
pub struct TrainingSet<'a> {
    pub rows: &'a [Vec<f64>],
    pub labels: &'a [PdClass],
}

impl<'a> TrainingSet<'a> {
    pub fn new(rows: &'a [Vec<f64>], labels: &'a [PdClass]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("training set is empty"));
        }
        if rows.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let width = rows[0].len();
        if width == 0 {
            return Err(Error::invalid("rows have no features"));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::invalid(format!(
                    "row {i} has {} features, expected {width}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("row {i} has a non-finite feature")));
            }
        }
        Ok(TrainingSet { rows, labels })
    }

    pub fn n_features(&self) -> usize {
        self.rows[0].len()
    }
}

/// A chosen split. `score` is `Σ_L c²/n_L + Σ_R c²/n_R` kept as an exact
/// fraction `num / den`; higher score means lower weighted Gini impurity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    num: u128,
    den: u128,
}

impl Split {
    /// Size-weighted Gini impurity of the two children, `n - score`.
    pub fn weighted_gini(&self, n: usize) -> f64 {
        n as f64 - self.num as f64 / self.den as f64
    }

    fn beats(&self, other: &Split) -> bool {
        self.num * other.den > other.num * self.den
    }
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m >= b {
        a
    } else {
        m
    }
}

/// Best split of the node holding `node_rows`, considering `features` in
/// ascending order. Returns `None` when no threshold leaves at least
/// `min_samples_leaf` rows on each side.
pub fn best_split(
    data: &TrainingSet<'_>,
    node_rows: &[usize],
    features: &[usize],
    min_samples_leaf: usize,
) -> Option<Split> {
    let n = node_rows.len();
    let n_classes = PdClass::COUNT;
    let mut total = vec![0u64; n_classes];
    for &i in node_rows {
        total[data.labels[i].index()] += 1;
    }

    let mut sorted_features = features.to_vec();
    sorted_features.sort_unstable();

    let mut best: Option<Split> = None;
    let mut pairs: Vec<(f64, usize)> = Vec::with_capacity(n);
    for &f in &sorted_features {
        pairs.clear();
        pairs.extend(node_rows.iter().map(|&i| (data.rows[i][f], data.labels[i].index())));
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut left = vec![0u64; n_classes];
        for k in 0..n - 1 {
            left[pairs[k].1] += 1;
            let (a, b) = (pairs[k].0, pairs[k + 1].0);
            if a == b {
                continue;
            }
            let n_l = k + 1;
            let n_r = n - n_l;
            if n_l < min_samples_leaf || n_r < min_samples_leaf {
                continue;
            }
            let s_l: u128 = left.iter().map(|&c| (c as u128) * (c as u128)).sum();
            let s_r: u128 = left
                .iter()
                .zip(&total)
                .map(|(&l, &t)| ((t - l) as u128).pow(2))
                .sum();
            let cand = Split {
                feature: f,
                threshold: midpoint(a, b),
                num: s_l * n_r as u128 + s_r * n_l as u128,
                den: (n_l * n_r) as u128,
            };
            if best.as_ref().is_none_or(|b| cand.beats(b)) {
                best = Some(cand);
            }
        }
    }
    best
}

struct Grower<'a> {
    data: TrainingSet<'a>,
    cfg: &'a ForestConfig,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

impl Grower<'_> {
    fn leaf(&self, rows: &[usize]) -> Node {
        let mut counts = vec![0u64; PdClass::COUNT];
        for &i in rows {
            counts[self.data.labels[i].index()] += 1;
        }
        Node::Leaf { counts }
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let first = self.data.labels[rows[0]];
        let pure = rows.iter().all(|&i| self.data.labels[i] == first);
        let depth_capped = self.cfg.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_capped || rows.len() < 2 * self.cfg.min_samples_leaf {
            let leaf = self.leaf(&rows);
            self.nodes.push(leaf);
            return id;
        }

        let n_features = self.data.n_features();
        let features = sample(&mut self.rng, n_features, self.cfg.features_per_split).into_vec();
        let Some(split) = best_split(&self.data, &rows, &features, self.cfg.min_samples_leaf)
        else {
            let leaf = self.leaf(&rows);
            self.nodes.push(leaf);
            return id;
        };

        // placeholder, patched once children exist
        self.nodes.push(Node::Leaf { counts: Vec::new() });
        let (left, right): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&i| self.data.rows[i][split.feature] <= split.threshold);
        let l = self.grow(left, depth + 1);
        let r = self.grow(right, depth + 1);
        self.nodes[id] = Node::Split {
            feat: split.feature,
            thr: split.threshold,
            l,
            r,
        };
        id
    }
}

fn grow_tree(data: TrainingSet<'_>, cfg: &ForestConfig, tree_index: usize) -> Tree {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(&[cfg.seed, tree_index as u64]));
    let n = data.rows.len();
    let rows: Vec<usize> = if cfg.bootstrap {
        (0..n).map(|_| rng.random_range(0..n)).collect()
    } else {
        (0..n).collect()
    };
    let mut grower = Grower {
        data,
        cfg,
        rng,
        nodes: Vec::new(),
    };
    grower.grow(rows, 0);
    Tree {
        nodes: grower.nodes,
    }
}

/// Trains a forest. Single-class data is accepted and gives constant trees.
pub fn train(
    data: TrainingSet<'_>,
    feature_names: Vec<String>,
    cfg: &ForestConfig,
) -> Result<ForestModel> {
    cfg.validate(data.n_features())?;
    if feature_names.len() != data.n_features() {
        return Err(Error::invalid(format!(
            "{} feature names for {} features",
            feature_names.len(),
            data.n_features()
        )));
    }
    let trees = (0..cfg.n_trees)
        .into_par_iter()
        .map(|t| grow_tree(data, cfg, t))
        .collect();
    Ok(ForestModel {
        version: FORMAT_VERSION,
        classes: PdClass::ALL.to_vec(),
        feature_names,
        config: cfg.clone(),
        trees,
    })
}

impl ForestModel {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        if x.len() != self.n_features() {
            return Err(Error::invalid(format!(
                "expected {} features, got {}",
                self.n_features(),
                x.len()
            )));
        }
        let mut tally = vec![0u64; self.classes.len()];
        for tree in &self.trees {
            tally[tree.predict(x)] += 1;
        }
        let n = self.trees.len() as f64;
        Ok(Prediction {
            class: self.classes[argmax_lowest(&tally)],
            votes: tally.iter().map(|&c| c as f64 / n).collect(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: ForestModel =
            serde_json::from_str(text).map_err(|e| Error::ModelFormat(e.to_string()))?;
        model.check()?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::ModelFormat(msg));
        if self.version != FORMAT_VERSION {
            return bad(format!(
                "model version {} not supported (expected {FORMAT_VERSION})",
                self.version
            ));
        }
        if self.classes != PdClass::ALL {
            return bad("class list is not the canonical six".into());
        }
        if self.trees.is_empty() {
            return bad("model has no trees".into());
        }
        let n_classes = self.classes.len();
        for (t, tree) in self.trees.iter().enumerate() {
            if tree.nodes.is_empty() {
                return bad(format!("tree {t} is empty"));
            }
            for (i, node) in tree.nodes.iter().enumerate() {
                match node {
                    Node::Split { feat, thr, l, r } => {
                        let children_ok = *l > i && *r > i && *l < tree.nodes.len() && *r < tree.nodes.len();
                        if !children_ok || *feat >= self.n_features() || !thr.is_finite() {
                            return bad(format!("tree {t} node {i} is malformed"));
                        }
                    }
                    Node::Leaf { counts } => {
                        if counts.len() != n_classes {
                            return bad(format!("tree {t} leaf {i} has wrong class count"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Impurity of a set of class counts; exposed for tests and reports.
pub fn gini(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}
