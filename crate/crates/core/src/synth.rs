//! Procedural textures, synthetic "material" datasets with planted
//! texture-to-CPS links, and a deterministic filter-bank encoder standing in
//! for a convolutional backbone.
//!
//! Everything here is seeded per sample (`derive_seed(global, sample_id)`), so
//! generation order and parallelism never change the output.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exchange::{ActivationSet, DatasetManifest, SemClass, Tensor, TextureClass, STAGE_COUNT};
use crate::image::GrayImage;

pub const MIN_IMAGE_SIDE: usize = 32;

/// Every dataset image is contrast-normalized to this mean and standard
/// deviation, the way an exporter normalizes inputs before inference.
pub const IMAGE_MEAN: f64 = 0.5;
pub const IMAGE_STD: f64 = 0.15;

/// Stable 64-bit seed for one named entity under a global seed.
pub fn derive_seed(global: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(global.to_le_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TextureKind {
    Dotted,
    Striped,
    Checkered,
    Blotchy,
    Constant,
    Noise,
}

impl TextureKind {
    pub const ALL: [TextureKind; 6] = [
        TextureKind::Dotted,
        TextureKind::Striped,
        TextureKind::Checkered,
        TextureKind::Blotchy,
        TextureKind::Constant,
        TextureKind::Noise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TextureKind::Dotted => "dotted",
            TextureKind::Striped => "striped",
            TextureKind::Checkered => "checkered",
            TextureKind::Blotchy => "blotchy",
            TextureKind::Constant => "constant",
            TextureKind::Noise => "noise",
        }
    }

    /// Characteristic length in pixels: disk radius, stripe period, cell size,
    /// or blob spacing.
    fn default_scale(self) -> f64 {
        match self {
            TextureKind::Dotted => 3.0,
            TextureKind::Striped => 8.0,
            TextureKind::Checkered => 6.0,
            TextureKind::Blotchy => 16.0,
            TextureKind::Constant | TextureKind::Noise => 1.0,
        }
    }
}

impl fmt::Display for TextureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TextureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TextureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown texture kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextureSpec {
    pub kind: TextureKind,
    pub height: usize,
    pub width: usize,
    /// See [`TextureKind`]'s characteristic length.
    pub scale: f64,
    /// Fraction of the area covered by disks (`dotted` only).
    pub density: f64,
    /// Angle of the stripe normal in radians; 0 gives vertical stripes.
    pub orientation: f64,
    pub seed: u64,
}

impl TextureSpec {
    pub fn new(kind: TextureKind, height: usize, width: usize, seed: u64) -> Self {
        TextureSpec {
            kind,
            height,
            width,
            scale: kind.default_scale(),
            density: 0.3,
            orientation: 0.0,
            seed,
        }
    }

    /// Same kind with seeded intra-class variation of scale, orientation and phase.
    pub fn jittered(kind: TextureKind, height: usize, width: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let mut spec = TextureSpec::new(kind, height, width, seed);
        spec.scale *= rng.random_range(0.8..1.25);
        spec.density = rng.random_range(0.2..0.4);
        spec.orientation = rng.random_range(-0.25..0.25);
        spec
    }
}

const LOW: f64 = 0.2;
const HIGH: f64 = 0.8;

pub fn gen_texture(spec: &TextureSpec) -> Result<GrayImage> {
    let (h, w) = (spec.height, spec.width);
    if h < MIN_IMAGE_SIDE || w < MIN_IMAGE_SIDE {
        return Err(Error::Usage(format!(
            "texture size {h}x{w} below the {MIN_IMAGE_SIDE}x{MIN_IMAGE_SIDE} minimum"
        )));
    }
    if !(spec.scale > 0.0) || !(0.0..=1.0).contains(&spec.density) {
        return Err(Error::Usage(format!(
            "texture scale must be positive and density in [0, 1]: {spec:?}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut img = GrayImage::filled(w, h, 0.5);
    match spec.kind {
        TextureKind::Constant => {}
        TextureKind::Dotted => {
            img = GrayImage::filled(w, h, LOW);
            let r = spec.scale;
            let count = (spec.density * (h * w) as f64 / (PI * r * r)).round() as usize;
            let px = img.pixels_mut();
            for _ in 0..count {
                let cy = rng.random_range(0.0..h as f64);
                let cx = rng.random_range(0.0..w as f64);
                let (r0, r1) = ((cy - r).floor().max(0.0) as usize, ((cy + r).ceil() as usize).min(h - 1));
                let (c0, c1) = ((cx - r).floor().max(0.0) as usize, ((cx + r).ceil() as usize).min(w - 1));
                for row in r0..=r1 {
                    for col in c0..=c1 {
                        let (dy, dx) = (row as f64 + 0.5 - cy, col as f64 + 0.5 - cx);
                        if dy * dy + dx * dx <= r * r {
                            px[row * w + col] = HIGH;
                        }
                    }
                }
            }
        }
        TextureKind::Striped => {
            let phase = rng.random_range(0.0..spec.scale);
            let (cos, sin) = (spec.orientation.cos(), spec.orientation.sin());
            for (i, p) in img.pixels_mut().iter_mut().enumerate() {
                let (row, col) = ((i / w) as f64, (i % w) as f64);
                let u = col * cos + row * sin + phase;
                let band = (2.0 * u / spec.scale).floor() as i64;
                *p = if band.rem_euclid(2) == 0 { HIGH } else { LOW };
            }
        }
        TextureKind::Checkered => {
            let cell = spec.scale.round().max(1.0) as usize;
            let (dr, dc) = (rng.random_range(0..cell), rng.random_range(0..cell));
            for (i, p) in img.pixels_mut().iter_mut().enumerate() {
                let (row, col) = (i / w + dr, i % w + dc);
                *p = if (row / cell + col / cell) % 2 == 0 { HIGH } else { LOW };
            }
        }
        TextureKind::Blotchy => {
            let step = spec.scale;
            let gh = (h as f64 / step).ceil() as usize + 2;
            let gw = (w as f64 / step).ceil() as usize + 2;
            let grid: Vec<f64> = (0..gh * gw).map(|_| rng.random_range(0.0..1.0)).collect();
            for (i, p) in img.pixels_mut().iter_mut().enumerate() {
                let (y, x) = ((i / w) as f64 / step, (i % w) as f64 / step);
                let (y0, x0) = (y.floor() as usize, x.floor() as usize);
                let (fy, fx) = (y - y0 as f64, x - x0 as f64);
                // smoothstep keeps the blobs soft-edged
                let (sy, sx) = (fy * fy * (3.0 - 2.0 * fy), fx * fx * (3.0 - 2.0 * fx));
                let g = |r: usize, c: usize| grid[r * gw + c];
                let top = g(y0, x0) * (1.0 - sx) + g(y0, x0 + 1) * sx;
                let bot = g(y0 + 1, x0) * (1.0 - sx) + g(y0 + 1, x0 + 1) * sx;
                *p = LOW + (HIGH - LOW) * (top * (1.0 - sy) + bot * sy);
            }
        }
        TextureKind::Noise => {
            for p in img.pixels_mut() {
                *p = rng.random_range(0.0..1.0);
            }
        }
    }
    Ok(img)
}

/// Channel layout of [`standin_encoder`] stages.
pub const ENCODER_CHANNELS: [&str; 13] = [
    "mean",
    "variance",
    "grad_h",
    "grad_v",
    "grad_diag",
    "band2_h",
    "band2_v",
    "band2_d",
    "band2_a",
    "band4_h",
    "band4_v",
    "band4_d",
    "band4_a",
];

/// Fixed gain on the variance, gradient and band-pass energies, bringing them to
/// the same order of magnitude as the local-mean channel on contrast-normalized
/// input.
pub const ENERGY_GAIN: f64 = 30.0;

/// Per-pixel channel planes at full resolution. The variance plane holds `x²`
/// so that block pooling yields `E[x²]`, converted to a variance afterwards.
fn pixel_planes(img: &GrayImage) -> Vec<Vec<f64>> {
    let (h, w) = (img.height(), img.width());
    let n = h * w;
    let mut planes = vec![vec![0.0; n]; ENCODER_CHANNELS.len()];
    // (drow, dcol) for horizontal, vertical, diagonal, anti-diagonal directions
    const DIRS: [(isize, isize); 4] = [(0, 1), (1, 0), (1, 1), (1, -1)];
    for r in 0..h as isize {
        for c in 0..w as isize {
            let i = r as usize * w + c as usize;
            let x = img.get_clamped(r, c);
            let at = |dr: isize, dc: isize| img.get_clamped(r + dr, c + dc);
            planes[0][i] = x;
            planes[1][i] = x * x;
            planes[2][i] = ((at(0, 1) - at(0, -1)) / 2.0).powi(2);
            planes[3][i] = ((at(1, 0) - at(-1, 0)) / 2.0).powi(2);
            planes[4][i] = (((at(1, 1) - at(-1, -1)) / 2.0).powi(2)
                + ((at(1, -1) - at(-1, 1)) / 2.0).powi(2))
                / 2.0;
            for (band, step) in [2isize, 4].into_iter().enumerate() {
                for (k, (dr, dc)) in DIRS.into_iter().enumerate() {
                    let resp = x - 0.5 * (at(dr * step, dc * step) + at(-dr * step, -dc * step));
                    planes[5 + 4 * band + k][i] = resp * resp;
                }
            }
        }
    }
    planes
}

/// Five-stage pyramid of non-negative filter-bank energies. Stage `s` average-pools
/// the per-pixel channels over `2^s × 2^s` blocks, so extents halve per stage.
pub fn standin_encoder(img: &GrayImage, sample_id: &str, class_id: &str) -> Result<ActivationSet> {
    let (h, w) = (img.height(), img.width());
    if h < MIN_IMAGE_SIDE || w < MIN_IMAGE_SIDE {
        return Err(Error::Usage(format!(
            "encoder input {h}x{w} below the {MIN_IMAGE_SIDE}x{MIN_IMAGE_SIDE} minimum"
        )));
    }
    let planes = pixel_planes(img);
    let channels = planes.len();
    let mut stages = Vec::with_capacity(STAGE_COUNT);
    for s in 1..=STAGE_COUNT {
        let block = 1usize << s;
        let (sh, sw) = (h / block, w / block);
        let area = (block * block) as f64;
        let mut data = vec![0.0f32; channels * sh * sw];
        for (ch, plane) in planes.iter().enumerate() {
            for br in 0..sh {
                for bc in 0..sw {
                    let mut sum = 0.0;
                    for r in br * block..(br + 1) * block {
                        let row = &plane[r * w + bc * block..r * w + (bc + 1) * block];
                        sum += row.iter().sum::<f64>();
                    }
                    data[ch * sh * sw + br * sw + bc] = (sum / area) as f32;
                }
            }
        }
        // E[x²] - E[x]², clamped against rounding
        for i in 0..sh * sw {
            let mean = data[i] as f64;
            let var = (data[sh * sw + i] as f64 - mean * mean).max(0.0);
            data[sh * sw + i] = var as f32;
        }
        for v in &mut data[sh * sw..] {
            *v = (*v as f64 * ENERGY_GAIN) as f32;
        }
        stages.push(Tensor::new(vec![channels, sh, sw], data)?);
    }
    let stages: [Tensor; STAGE_COUNT] = stages.try_into().expect("five stages");
    ActivationSet::new(sample_id, class_id, stages)
}

/// Interpretable dataset: one class per texture kind.
#[derive(Debug, Clone, PartialEq)]
pub struct TextureDatasetSpec {
    pub kinds: Vec<TextureKind>,
    pub samples_per_class: usize,
    pub size: usize,
    pub seed: u64,
}

impl TextureDatasetSpec {
    pub fn texture_sample_id(kind: TextureKind, j: usize) -> String {
        format!("{}_{j:03}", kind.name())
    }
}

/// Synthetic target-domain dataset. Each image is a patchwork of pure component
/// textures whose cell kinds are drawn from the class mixture weights; the class
/// CPS is `intercept + link · weights + noise`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialSpec {
    pub kinds: Vec<TextureKind>,
    /// One weight vector per class, aligned with `kinds`.
    pub mixtures: Vec<Vec<f64>>,
    pub samples_per_class: usize,
    pub cps_intercept: f64,
    pub cps_link: Vec<f64>,
    pub noise_amplitude: f64,
    pub size: usize,
    pub seed: u64,
}

impl MaterialSpec {
    pub fn class_id(i: usize) -> String {
        format!("batch_{i:02}")
    }

    /// Classes spread along a strength axis `t` in `[0, 1]`: planted-positive
    /// kinds get weight growing with `t`, planted-negative kinds weight
    /// shrinking with `t`, neutral kinds a fixed share. CPS rises with `t`.
    ///
    /// The most salient patch decides an image's feature, so a kind that wins
    /// saliency everywhere (`striped` under the stand-in encoder) is best kept neutral.
    pub fn planted(
        positive: &[TextureKind],
        negative: &[TextureKind],
        neutral: &[TextureKind],
        classes: usize,
        samples_per_class: usize,
        seed: u64,
    ) -> Self {
        let strengths: Vec<f64> = (0..classes)
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &Self::class_id(i)));
                let base = if classes > 1 { i as f64 / (classes - 1) as f64 } else { 0.5 };
                (base + rng.random_range(-0.05..0.05)).clamp(0.0, 1.0)
            })
            .collect();
        Self::planted_with_strengths(positive, negative, neutral, &strengths, samples_per_class, seed)
    }

    /// Two CPS regimes: half of the classes near `t = 0.15`, half near `t = 0.85`.
    pub fn two_regimes(
        positive: &[TextureKind],
        negative: &[TextureKind],
        neutral: &[TextureKind],
        classes: usize,
        samples_per_class: usize,
        seed: u64,
    ) -> Self {
        let strengths: Vec<f64> = (0..classes)
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &Self::class_id(i)));
                let centre = if i < classes / 2 { 0.15 } else { 0.85 };
                centre + rng.random_range(-0.1..0.1)
            })
            .collect();
        Self::planted_with_strengths(positive, negative, neutral, &strengths, samples_per_class, seed)
    }

    pub fn planted_with_strengths(
        positive: &[TextureKind],
        negative: &[TextureKind],
        neutral: &[TextureKind],
        strengths: &[f64],
        samples_per_class: usize,
        seed: u64,
    ) -> Self {
        const PLANTED_SHARE: f64 = 0.8;
        let kinds: Vec<TextureKind> = positive.iter().chain(negative).chain(neutral).copied().collect();
        let neutral_share = if neutral.is_empty() { 0.0 } else { 1.0 - PLANTED_SHARE };
        let planted_share = 1.0 - neutral_share;
        let mixtures = strengths
            .iter()
            .map(|&t| {
                let mut w = Vec::with_capacity(kinds.len());
                w.extend(positive.iter().map(|_| planted_share * t / positive.len() as f64));
                w.extend(negative.iter().map(|_| planted_share * (1.0 - t) / negative.len() as f64));
                w.extend(neutral.iter().map(|_| neutral_share / neutral.len() as f64));
                let total: f64 = w.iter().sum();
                w.iter().map(|x| x / total).collect()
            })
            .collect();
        let cps_link = positive
            .iter()
            .map(|_| 100.0 / positive.len() as f64)
            .chain(negative.iter().map(|_| -100.0 / negative.len() as f64))
            .chain(neutral.iter().map(|_| 0.0))
            .collect();
        MaterialSpec {
            kinds,
            mixtures,
            samples_per_class,
            cps_intercept: 200.0,
            cps_link,
            noise_amplitude: 2.0,
            size: 128,
            seed,
        }
    }
}

/// One generated image with its identity.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSample {
    pub sample_id: String,
    pub class_id: String,
    pub image: GrayImage,
}

#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub manifest: DatasetManifest,
    pub samples: Vec<SynthSample>,
}

pub fn gen_texture_dataset(spec: &TextureDatasetSpec) -> Result<SynthDataset> {
    if spec.kinds.is_empty() || spec.samples_per_class == 0 {
        return Err(Error::Spec("texture dataset needs kinds and samples".into()));
    }
    let jobs: Vec<(TextureKind, String)> = spec
        .kinds
        .iter()
        .flat_map(|&k| (0..spec.samples_per_class).map(move |j| (k, TextureDatasetSpec::texture_sample_id(k, j))))
        .collect();
    let samples = jobs
        .par_iter()
        .map(|(kind, id)| {
            let tspec = TextureSpec::jittered(*kind, spec.size, spec.size, derive_seed(spec.seed, id));
            Ok(SynthSample {
                sample_id: id.clone(),
                class_id: kind.name().to_string(),
                image: gen_texture(&tspec)?.standardized(IMAGE_MEAN, IMAGE_STD),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let classes = spec
        .kinds
        .iter()
        .map(|&k| TextureClass {
            id: k.name().to_string(),
            samples: (0..spec.samples_per_class)
                .map(|j| TextureDatasetSpec::texture_sample_id(k, j))
                .collect(),
        })
        .collect();
    Ok(SynthDataset {
        manifest: DatasetManifest::new(vec![], classes, None)?,
        samples,
    })
}

fn check_material_spec(spec: &MaterialSpec) -> Result<()> {
    if spec.mixtures.len() < 2 {
        return Err(Error::Spec(format!(
            "material dataset needs at least 2 classes, got {}",
            spec.mixtures.len()
        )));
    }
    if spec.samples_per_class == 0 || spec.kinds.is_empty() {
        return Err(Error::Spec("material dataset needs samples and texture kinds".into()));
    }
    if spec.cps_link.len() != spec.kinds.len() {
        return Err(Error::Spec("cps_link must have one coefficient per texture kind".into()));
    }
    for (i, w) in spec.mixtures.iter().enumerate() {
        let sum: f64 = w.iter().sum();
        if w.len() != spec.kinds.len() || w.iter().any(|x| !(*x >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Spec(format!(
                "mixture of class {i} must be {} non-negative weights summing to 1, got {w:?}",
                spec.kinds.len()
            )));
        }
    }
    Ok(())
}

/// CPS of every class, including its seeded noise term.
pub fn material_cps(spec: &MaterialSpec) -> Result<Vec<f64>> {
    check_material_spec(spec)?;
    let cps: Vec<f64> = spec
        .mixtures
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, &format!("cps/{}", MaterialSpec::class_id(i))));
            let noise = if spec.noise_amplitude > 0.0 {
                spec.noise_amplitude * rng.random_range(-1.0..=1.0)
            } else {
                0.0
            };
            spec.cps_intercept + w.iter().zip(&spec.cps_link).map(|(a, b)| a * b).sum::<f64>() + noise
        })
        .collect();
    if cps.iter().any(|c| !c.is_finite()) {
        return Err(Error::Spec("cps link produced non-finite values".into()));
    }
    if cps.iter().all(|&c| c == cps[0]) {
        return Err(Error::Spec("every class has the same CPS; the link is degenerate".into()));
    }
    Ok(cps)
}

/// Material images are a `PATCH_GRID × PATCH_GRID` patchwork of pure phases.
pub const PATCH_GRID: usize = 2;

/// Component index of every patch cell, drawn from the mixture weights.
fn patch_layout(weights: &[f64], seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..PATCH_GRID * PATCH_GRID)
        .map(|_| {
            let mut u = rng.random_range(0.0..1.0);
            for (k, &w) in weights.iter().enumerate() {
                if u < w {
                    return k;
                }
                u -= w;
            }
            // rounding left u just above the last positive weight
            weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
        })
        .collect()
}

pub fn gen_material_dataset(spec: &MaterialSpec) -> Result<SynthDataset> {
    let cps = material_cps(spec)?;
    let jobs: Vec<(usize, String)> = (0..spec.mixtures.len())
        .flat_map(|i| {
            (0..spec.samples_per_class).map(move |j| (i, format!("{}_{j:03}", MaterialSpec::class_id(i))))
        })
        .collect();
    let samples = jobs
        .par_iter()
        .map(|(i, id)| {
            let weights = &spec.mixtures[*i];
            let layout = patch_layout(weights, derive_seed(spec.seed, &format!("{id}/layout")));
            let mut pixels = vec![0.0; spec.size * spec.size];
            for (k, kind) in spec.kinds.iter().enumerate() {
                if !layout.contains(&k) {
                    continue;
                }
                let seed = derive_seed(spec.seed, &format!("{id}/{kind}"));
                let layer = gen_texture(&TextureSpec::jittered(*kind, spec.size, spec.size, seed))?
                    .standardized(IMAGE_MEAN, IMAGE_STD);
                for (j, (p, l)) in pixels.iter_mut().zip(layer.pixels()).enumerate() {
                    let (row, col) = (j / spec.size, j % spec.size);
                    let cell = row * PATCH_GRID / spec.size * PATCH_GRID + col * PATCH_GRID / spec.size;
                    if layout[cell] == k {
                        *p = *l;
                    }
                }
            }
            Ok(SynthSample {
                sample_id: id.clone(),
                class_id: MaterialSpec::class_id(*i),
                image: GrayImage::new(spec.size, spec.size, pixels)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let classes = cps
        .iter()
        .enumerate()
        .map(|(i, &c)| SemClass {
            id: MaterialSpec::class_id(i),
            cps: c,
            samples: (0..spec.samples_per_class)
                .map(|j| format!("{}_{j:03}", MaterialSpec::class_id(i)))
                .collect(),
        })
        .collect();
    Ok(SynthDataset {
        manifest: DatasetManifest::new(classes, vec![], None)?,
        samples,
    })
}

impl SynthDataset {
    pub fn merge(self, other: SynthDataset) -> Result<SynthDataset> {
        let mut samples = self.samples;
        samples.extend(other.samples);
        Ok(SynthDataset {
            manifest: self.manifest.merge(other.manifest)?,
            samples,
        })
    }

    pub fn encode(&self) -> Result<Vec<ActivationSet>> {
        self.samples
            .par_iter()
            .map(|s| standin_encoder(&s.image, &s.sample_id, &s.class_id))
            .collect()
    }

    /// Writes `images/<id>.pgm`, `activations/<id>.z<s>.txa` and `manifest.toml`
    /// under `root`, the same layout an exporter run produces.
    pub fn write(&self, root: &Path) -> Result<()> {
        let images = root.join("images");
        let activations = root.join("activations");
        for dir in [&images, &activations] {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        self.samples.par_iter().try_for_each(|s| {
            s.image.save_pgm(&images.join(format!("{}.pgm", s.sample_id)))?;
            standin_encoder(&s.image, &s.sample_id, &s.class_id)?.save(&activations)
        })?;
        self.manifest.save(&root.join("manifest.toml"))
    }
}
