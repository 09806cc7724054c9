//! Leak-free image dataset construction.
//!
//! Originals are split per class first; augmentation then happens inside
//! each subset, so every derived image lives next to its parent. Files are
//! laid out as `<out>/<subset>/<class>/<image_id>.png` with a `manifest.json`
//! recording provenance and SHA-256 content digests.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

use image::RgbImage;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::awa::{auto_ranges, render_awa, AxisRanges, PulseFeatures, RenderConfig};
use crate::error::{Error, Result};
use crate::raster::{self, Affine};
use crate::signal::PdClass;
use crate::simulator::stream_seed;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_VERSION: u32 = 1;
const SPLIT_STREAM: u64 = 0x5350_4c49_54;
const AUGMENT_STREAM: u64 = 0x4155_474d;
const MAX_REDRAWS: u64 = 64;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema,
)]
#[serde(rename_all = "lowercase")]
pub enum Subset {
    Train,
    Val,
    Test,
}

impl Subset {
    pub const ALL: [Subset; 3] = [Subset::Train, Subset::Val, Subset::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Subset::Train => "train",
            Subset::Val => "val",
            Subset::Test => "test",
        }
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.6,
            val: 0.2,
            test: 0.2,
        }
    }
}

impl SplitRatios {
    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.val, self.test];
        if parts.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::invalid("split ratios must be finite and >= 0"));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("split ratios sum to {sum}, not 1")));
        }
        Ok(())
    }

    /// `(train, val, test)` counts for `n` items: val and test are floored,
    /// the remainder goes to train.
    pub fn counts(&self, n: usize) -> (usize, usize, usize) {
        let floor = |r: f64| ((n as f64 * r) + 1e-9).floor() as usize;
        let val = floor(self.val);
        let test = floor(self.test);
        (n - val - test, val, test)
    }
}

/// Minimum originals per class accepted by [`split`].
pub const MIN_PER_CLASS: usize = 5;

/// Seeded per-class shuffle followed by a contiguous train/val/test partition.
pub fn split(
    ids: &BTreeMap<PdClass, Vec<String>>,
    ratios: &SplitRatios,
    seed: u64,
) -> Result<BTreeMap<String, Subset>> {
    ratios.validate()?;
    let mut out = BTreeMap::new();
    for (&class, class_ids) in ids {
        if class_ids.len() < MIN_PER_CLASS {
            return Err(Error::invalid(format!(
                "class {class} has {} images, need at least {MIN_PER_CLASS}",
                class_ids.len()
            )));
        }
        let mut shuffled = class_ids.clone();
        let mut rng =
            ChaCha8Rng::seed_from_u64(stream_seed(&[seed, SPLIT_STREAM, class.index() as u64]));
        shuffled.shuffle(&mut rng);
        let (n_train, n_val, _) = ratios.counts(shuffled.len());
        for (k, id) in shuffled.into_iter().enumerate() {
            let subset = if k < n_train {
                Subset::Train
            } else if k < n_train + n_val {
                Subset::Val
            } else {
                Subset::Test
            };
            if out.insert(id.clone(), subset).is_some() {
                return Err(Error::invalid(format!("duplicate image id `{id}`")));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Scale,
    GaussianBlur,
    Brightness,
    Contrast,
    Shear,
    Rotation,
    HorizontalFlip,
}

impl TransformKind {
    pub const ALL: [TransformKind; 7] = [
        TransformKind::Scale,
        TransformKind::GaussianBlur,
        TransformKind::Brightness,
        TransformKind::Contrast,
        TransformKind::Shear,
        TransformKind::Rotation,
        TransformKind::HorizontalFlip,
    ];
}

/// A concrete transform with its drawn parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transform {
    Scale { factor: f64 },
    GaussianBlur { sigma: f64 },
    /// Shift as a fraction of full scale (255).
    Brightness { delta: f64 },
    Contrast { factor: f64 },
    Shear { degrees: f64 },
    Rotation { degrees: f64 },
    HorizontalFlip,
}

impl Transform {
    /// Applies the transform; geometric ones fill exposed area with `fill`.
    pub fn apply(&self, img: &RgbImage, fill: [u8; 3]) -> RgbImage {
        match *self {
            Transform::Scale { factor } => raster::warp_affine(img, Affine::scale(factor), fill),
            Transform::GaussianBlur { sigma } => raster::gaussian_blur(img, sigma as f32),
            Transform::Brightness { delta } => raster::shift_brightness(img, delta * 255.0),
            Transform::Contrast { factor } => raster::scale_contrast(img, factor),
            Transform::Shear { degrees } => raster::warp_affine(img, Affine::shear_x(degrees), fill),
            Transform::Rotation { degrees } => {
                raster::warp_affine(img, Affine::rotation(degrees), fill)
            }
            Transform::HorizontalFlip => raster::flip_horizontal(img),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default)]
pub struct AugmentSpec {
    /// Transforms to draw from, uniformly.
    pub kinds: Vec<TransformKind>,
    pub scale: [f64; 2],
    /// Pixels.
    pub blur_sigma: [f64; 2],
    /// Fraction of full scale.
    pub brightness: [f64; 2],
    pub contrast: [f64; 2],
    /// Degrees.
    pub shear: [f64; 2],
    /// Degrees.
    pub rotation: [f64; 2],
    /// Images per original, the original included.
    pub multiplier: usize,
}

impl Default for AugmentSpec {
    fn default() -> Self {
        AugmentSpec {
            kinds: TransformKind::ALL.to_vec(),
            scale: [0.9, 1.1],
            blur_sigma: [0.5, 1.5],
            brightness: [-0.07, 0.07],
            contrast: [0.9, 1.1],
            shear: [-10.0, 10.0],
            rotation: [-15.0, 15.0],
            multiplier: 5,
        }
    }
}

impl AugmentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.multiplier < 1 {
            return Err(Error::invalid("augmentation multiplier must be >= 1"));
        }
        if self.multiplier > 1 && self.kinds.is_empty() {
            return Err(Error::invalid("no transform kinds enabled"));
        }
        for (name, r) in [
            ("scale", self.scale),
            ("blur_sigma", self.blur_sigma),
            ("brightness", self.brightness),
            ("contrast", self.contrast),
            ("shear", self.shear),
            ("rotation", self.rotation),
        ] {
            if !(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]) {
                return Err(Error::invalid(format!("{name} range {r:?} is not ordered")));
            }
        }
        if self.scale[0] <= 0.0 || self.blur_sigma[0] <= 0.0 || self.contrast[0] <= 0.0 {
            return Err(Error::invalid(
                "scale, blur and contrast ranges must be positive",
            ));
        }
        Ok(())
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Transform {
        let kind = self.kinds[rng.random_range(0..self.kinds.len())];
        let mut uniform = |r: [f64; 2]| r[0] + (r[1] - r[0]) * rng.random::<f64>();
        match kind {
            TransformKind::Scale => Transform::Scale {
                factor: uniform(self.scale),
            },
            TransformKind::GaussianBlur => Transform::GaussianBlur {
                sigma: uniform(self.blur_sigma),
            },
            TransformKind::Brightness => Transform::Brightness {
                delta: uniform(self.brightness),
            },
            TransformKind::Contrast => Transform::Contrast {
                factor: uniform(self.contrast),
            },
            TransformKind::Shear => Transform::Shear {
                degrees: uniform(self.shear),
            },
            TransformKind::Rotation => Transform::Rotation {
                degrees: uniform(self.rotation),
            },
            TransformKind::HorizontalFlip => Transform::HorizontalFlip,
        }
    }
}

/// The original followed by `multiplier - 1` single-transform variants.
/// A variant whose pixels repeat an earlier member of the family is redrawn.
pub fn augment(
    img: &RgbImage,
    spec: &AugmentSpec,
    item_seed: u64,
    fill: [u8; 3],
) -> Result<Vec<(Option<Transform>, RgbImage)>> {
    spec.validate()?;
    let mut family: Vec<(Option<Transform>, RgbImage)> = vec![(None, img.clone())];
    for variant in 1..spec.multiplier as u64 {
        let mut accepted = None;
        for attempt in 0..MAX_REDRAWS {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(&[
                item_seed,
                AUGMENT_STREAM,
                variant,
                attempt,
            ]));
            let t = spec.draw(&mut rng);
            let out = t.apply(img, fill);
            if family.iter().all(|(_, prev)| prev.as_raw() != out.as_raw()) {
                accepted = Some((Some(t), out));
                break;
            }
        }
        let Some(member) = accepted else {
            return Err(Error::invalid(format!(
                "could not draw a distinct variant {variant} after {MAX_REDRAWS} attempts"
            )));
        };
        family.push(member);
    }
    Ok(family)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// One rendered pulse population to turn into an image.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    pub id: String,
    pub class: PdClass,
    pub pulses: Vec<PulseFeatures>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub image_id: String,
    pub class: PdClass,
    pub subset: Subset,
    /// `None` for originals.
    pub parent_id: Option<String>,
    pub transform: Option<Transform>,
    /// SHA-256 of the PNG bytes, hex.
    pub digest: String,
    /// Relative to the dataset root.
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub version: u32,
    pub classes: Vec<PdClass>,
    pub split_ratios: SplitRatios,
    pub axis_ranges: AxisRanges,
    pub render: RenderConfig,
    pub augment: AugmentSpec,
    pub master_seed: u64,
    pub records: Vec<ImageRecord>,
}

impl DatasetManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Number of images per `(class, subset)`.
    pub fn counts(&self) -> BTreeMap<(PdClass, Subset), usize> {
        let mut out = BTreeMap::new();
        for r in &self.records {
            *out.entry((r.class, r.subset)).or_insert(0) += 1;
        }
        out
    }

    pub fn originals(&self) -> impl Iterator<Item = &ImageRecord> {
        self.records.iter().filter(|r| r.parent_id.is_none())
    }
}

/// An image produced by the builder, kept in memory with its record.
pub struct BuiltImage {
    pub record: ImageRecord,
    pub png: Vec<u8>,
}

fn relative_path(subset: Subset, class: PdClass, id: &str) -> String {
    format!("{subset}/{class}/{id}.png")
}

/// Renders, splits and augments without touching the filesystem.
pub fn assemble(
    sources: &[Source],
    render: &RenderConfig,
    spec: &AugmentSpec,
    ratios: &SplitRatios,
    seed: u64,
) -> Result<(DatasetManifest, Vec<BuiltImage>)> {
    spec.validate()?;
    ratios.validate()?;

    let mut ids: BTreeMap<PdClass, Vec<String>> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for s in sources {
        if !seen.insert(s.id.as_str()) {
            return Err(Error::invalid(format!("duplicate source id `{}`", s.id)));
        }
        ids.entry(s.class).or_default().push(s.id.clone());
    }
    if let Some(missing) = PdClass::ALL.iter().find(|c| !ids.contains_key(c)) {
        return Err(Error::invalid(format!("no sources for class {missing}")));
    }
    let assignment = split(&ids, ratios, seed)?;

    let ranges = auto_ranges(sources.iter().map(|s| s.pulses.as_slice()))?;
    let render = RenderConfig { ranges, ..*render };
    render.validate()?;

    let families: Vec<Vec<BuiltImage>> = sources
        .par_iter()
        .enumerate()
        .map(|(k, source)| {
            let subset = assignment[&source.id];
            let original = render_awa(&source.pulses, &render)?.image;
            let item_seed = stream_seed(&[seed, k as u64]);
            augment(&original, spec, item_seed, render.background)?
                .into_iter()
                .enumerate()
                .map(|(v, (transform, img))| {
                    let image_id = if v == 0 {
                        source.id.clone()
                    } else {
                        format!("{}_a{v}", source.id)
                    };
                    let png = raster::encode_png(&img)?;
                    Ok(BuiltImage {
                        record: ImageRecord {
                            path: relative_path(subset, source.class, &image_id),
                            image_id,
                            class: source.class,
                            subset,
                            parent_id: (v > 0).then(|| source.id.clone()),
                            transform,
                            digest: sha256_hex(&png),
                        },
                        png,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let images: Vec<BuiltImage> = families.into_iter().flatten().collect();

    let mut by_digest: HashMap<&str, &str> = HashMap::new();
    for img in &images {
        if let Some(other) = by_digest.insert(&img.record.digest, &img.record.image_id) {
            return Err(Error::invalid(format!(
                "images `{other}` and `{}` have identical content",
                img.record.image_id
            )));
        }
    }

    let manifest = DatasetManifest {
        version: MANIFEST_VERSION,
        classes: PdClass::ALL.to_vec(),
        split_ratios: *ratios,
        axis_ranges: ranges,
        render,
        augment: spec.clone(),
        master_seed: seed,
        records: images.iter().map(|i| i.record.clone()).collect(),
    };
    Ok((manifest, images))
}

/// Builds the dataset under `out_dir` and returns its manifest.
pub fn build_dataset(
    sources: &[Source],
    render: &RenderConfig,
    spec: &AugmentSpec,
    ratios: &SplitRatios,
    seed: u64,
    out_dir: &Path,
) -> Result<DatasetManifest> {
    let (manifest, images) = assemble(sources, render, spec, ratios, seed)?;
    for subset in Subset::ALL {
        for class in PdClass::ALL {
            let dir = out_dir.join(subset.as_str()).join(class.as_str());
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
    }
    images.par_iter().try_for_each(|img| {
        let path = out_dir.join(&img.record.path);
        std::fs::write(&path, &img.png).map_err(|e| Error::io(&path, e))
    })?;
    let path = out_dir.join(MANIFEST_FILE);
    std::fs::write(&path, manifest.to_json()?).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// A digest found in more than one subset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DigestCollision {
    pub digest: String,
    pub paths: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IntegrityReport {
    /// Same content present in different subsets.
    pub cross_subset_digests: Vec<DigestCollision>,
    /// Augmented images whose parent sits in another subset (or is missing).
    pub cross_subset_parents: Vec<String>,
    /// Manifest entries with no file on disk.
    pub missing_files: Vec<String>,
    /// Files whose bytes no longer match the manifest digest.
    pub digest_mismatches: Vec<String>,
    /// Files on disk that the manifest does not list.
    pub unlisted_files: Vec<String>,
}

impl IntegrityReport {
    pub fn is_clean(&self) -> bool {
        self.cross_subset_digests.is_empty()
            && self.cross_subset_parents.is_empty()
            && self.missing_files.is_empty()
            && self.digest_mismatches.is_empty()
            && self.unlisted_files.is_empty()
    }
}

fn list_pngs(root: &Path, dir: &Path, out: &mut Vec<String>) -> Result<()> {
    let entries = match std::fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(()),
        Err(e) => return Err(Error::io(dir, e)),
    };
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            list_pngs(root, &path, out)?;
        } else if path.extension().is_some_and(|e| e == "png") {
            let rel = path.strip_prefix(root).unwrap_or(&path);
            out.push(rel.to_string_lossy().replace('\\', "/"));
        }
    }
    Ok(())
}

/// Recomputes digests on disk and checks subsets for leakage.
pub fn verify_integrity(manifest: &DatasetManifest, out_dir: &Path) -> Result<IntegrityReport> {
    let mut report = IntegrityReport::default();

    let mut on_disk = Vec::new();
    for subset in Subset::ALL {
        list_pngs(out_dir, &out_dir.join(subset.as_str()), &mut on_disk)?;
    }
    on_disk.sort();

    let digests: Vec<(String, String)> = on_disk
        .par_iter()
        .map(|rel| {
            let path = out_dir.join(rel);
            let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
            Ok((rel.clone(), sha256_hex(&bytes)))
        })
        .collect::<Result<_>>()?;
    let disk: BTreeMap<&str, &str> = digests
        .iter()
        .map(|(p, d)| (p.as_str(), d.as_str()))
        .collect();

    let mut by_digest: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (path, digest) in &disk {
        by_digest.entry(digest).or_default().push(path);
    }
    for (digest, paths) in by_digest {
        let subsets: BTreeSet<&str> = paths
            .iter()
            .map(|p| p.split('/').next().unwrap_or_default())
            .collect();
        if subsets.len() > 1 {
            report.cross_subset_digests.push(DigestCollision {
                digest: digest.to_string(),
                paths: paths.iter().map(|p| p.to_string()).collect(),
            });
        }
    }

    let subset_of: HashMap<&str, Subset> = manifest
        .records
        .iter()
        .map(|r| (r.image_id.as_str(), r.subset))
        .collect();
    for r in &manifest.records {
        if let Some(parent) = &r.parent_id {
            if subset_of.get(parent.as_str()) != Some(&r.subset) {
                report.cross_subset_parents.push(r.image_id.clone());
            }
        }
        match disk.get(r.path.as_str()) {
            None => report.missing_files.push(r.path.clone()),
            Some(d) if *d != r.digest => report.digest_mismatches.push(r.path.clone()),
            Some(_) => {}
        }
    }

    let listed: BTreeSet<&str> = manifest.records.iter().map(|r| r.path.as_str()).collect();
    report.unlisted_files = disk
        .keys()
        .filter(|p| !listed.contains(*p))
        .map(|p| p.to_string())
        .collect();
    Ok(report)
}

/// Decodes every image of a subset from disk, in manifest order.
pub fn load_subset(
    manifest: &DatasetManifest,
    out_dir: &Path,
    subset: Subset,
) -> Result<Vec<(ImageRecord, RgbImage)>> {
    manifest
        .records
        .par_iter()
        .filter(|r| r.subset == subset)
        .map(|r| {
            let path: PathBuf = out_dir.join(&r.path);
            let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
            Ok((r.clone(), raster::decode_png(&bytes)?))
        })
        .collect()
}
