//! Per-stage saliency statistics, map normalization, multi-scale fusion, and
//! feature read-out at the most salient location.
//!
//! The per-stage statistic is a scale-like channel statistic
//! `s(h, w) = (1/C) * sum_c x_c * ln(x_c / mu)`, where `mu` is the channel mean
//! at that location and activations are clamped to [`SMOE_EPSILON`] first.
//! It is zero where all channels agree and grows with channel heterogeneity,
//! and it scales linearly with the activations, so the ordering of locations
//! is invariant to positive rescaling.

use crate::error::{Error, Result};
use crate::exchange::{ActivationSet, Tensor, STAGE_COUNT};
use crate::image::GrayImage;

pub const SMOE_EPSILON: f64 = 1e-7;

/// Default fusion weights: every stage counts equally.
pub const UNIFORM_WEIGHTS: [f64; STAGE_COUNT] = [0.2; STAGE_COUNT];

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapStage {
    Stage(usize),
    Combined,
}

/// Dense `height × width` map over spatial locations.
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap {
    height: usize,
    width: usize,
    values: Vec<f64>,
    stage: MapStage,
}

impl SaliencyMap {
    pub fn new(height: usize, width: usize, values: Vec<f64>, stage: MapStage) -> Result<Self> {
        if height == 0 || width == 0 || values.len() != height * width {
            return Err(Error::Validation(format!(
                "saliency map {height}x{width} needs {} values, got {}",
                height * width,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("non-finite saliency at flat index {i}")));
        }
        Ok(SaliencyMap {
            height,
            width,
            values,
            stage,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn stage(&self) -> MapStage {
        self.stage
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    /// `height × width` f32 tensor for the `.txa` exchange format.
    pub fn to_tensor(&self) -> Tensor {
        let data = self.values.iter().map(|&v| v as f32).collect();
        Tensor::new(vec![self.height, self.width], data).expect("finite map")
    }

    /// Grayscale rendering for overlays; assumes values in `[0, 1]`.
    pub fn to_image(&self) -> GrayImage {
        GrayImage::new(self.width, self.height, self.values.clone()).expect("finite map")
    }
}

/// Channel statistic of a `C × H × W` activation, one value per location.
pub fn smoe_statistic(activation: &Tensor, stage: usize) -> Result<SaliencyMap> {
    let &[channels, height, width] = activation.shape() else {
        return Err(Error::Validation(format!(
            "stage activation must be C x H x W, got {:?}",
            activation.shape()
        )));
    };
    let plane = height * width;
    let data = activation.data();
    if let Some(i) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::Validation(format!("non-finite activation at flat index {i}")));
    }
    let clamped = |v: f32| (v as f64).max(SMOE_EPSILON);

    let mut mean = vec![0.0f64; plane];
    // a location whose channels all agree scores exactly 0, even when the
    // summed mean is an ulp away from the shared value
    let mut uniform = vec![true; plane];
    for c in 0..channels {
        let chan = &data[c * plane..(c + 1) * plane];
        for (i, (m, &v)) in mean.iter_mut().zip(chan).enumerate() {
            *m += clamped(v);
            uniform[i] &= clamped(v) == clamped(data[i]);
        }
    }
    mean.iter_mut().for_each(|m| *m /= channels as f64);

    let mut stat = vec![0.0f64; plane];
    for c in 0..channels {
        let chan = &data[c * plane..(c + 1) * plane];
        for ((s, &v), &m) in stat.iter_mut().zip(chan).zip(&mean) {
            let x = clamped(v);
            *s += x * (x / m).ln();
        }
    }
    for (s, u) in stat.iter_mut().zip(&uniform) {
        *s = if *u { 0.0 } else { *s / channels as f64 };
    }

    SaliencyMap::new(height, width, stat, MapStage::Stage(stage))
}

/// Z-score over all locations (population statistics) followed by the
/// logistic function. Constant maps become 0.5 everywhere.
pub fn normalize_map(map: &SaliencyMap) -> SaliencyMap {
    let n = map.values.len() as f64;
    let mean = map.values.iter().sum::<f64>() / n;
    let var = map.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    let values = if std > 0.0 {
        map.values
            .iter()
            .map(|v| 1.0 / (1.0 + (-(v - mean) / std).exp()))
            .collect()
    } else {
        vec![0.5; map.values.len()]
    };
    SaliencyMap {
        values,
        ..map.clone()
    }
}

/// Bilinear resampling with half-pixel centers (`align_corners = false`):
/// output pixel `i` samples source coordinate `(i + 0.5) * in / out - 0.5`,
/// clamped to the valid range.
pub fn bilinear_resize(
    values: &[f64],
    (in_h, in_w): (usize, usize),
    (out_h, out_w): (usize, usize),
) -> Vec<f64> {
    fn taps(i: usize, n_in: usize, n_out: usize) -> (usize, usize, f64) {
        let src = ((i as f64 + 0.5) * n_in as f64 / n_out as f64 - 0.5).max(0.0);
        let lo = (src.floor() as usize).min(n_in - 1);
        let hi = (lo + 1).min(n_in - 1);
        (lo, hi, src - lo as f64)
    }
    let cols: Vec<_> = (0..out_w).map(|c| taps(c, in_w, out_w)).collect();
    let mut out = Vec::with_capacity(out_h * out_w);
    for r in 0..out_h {
        let (r0, r1, fr) = taps(r, in_h, out_h);
        for &(c0, c1, fc) in &cols {
            let top = values[r0 * in_w + c0] * (1.0 - fc) + values[r0 * in_w + c1] * fc;
            let bot = values[r1 * in_w + c0] * (1.0 - fc) + values[r1 * in_w + c1] * fc;
            out.push(top * (1.0 - fr) + bot * fr);
        }
    }
    out
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.len() != STAGE_COUNT {
        return Err(Error::Config(format!(
            "expected {STAGE_COUNT} stage weights, got {}",
            weights.len()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::Config(format!("stage weights must be non-negative: {weights:?}")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(Error::Config(format!("stage weights sum to {sum}, not 1")));
    }
    Ok(())
}

/// Upsamples each normalized stage map to `output_shape` and takes the weighted mean.
pub fn combine_maps(
    maps: &[SaliencyMap],
    output_shape: (usize, usize),
    weights: &[f64],
) -> Result<SaliencyMap> {
    check_weights(weights)?;
    if maps.len() != STAGE_COUNT {
        return Err(Error::Usage(format!("expected {STAGE_COUNT} maps, got {}", maps.len())));
    }
    let (out_h, out_w) = output_shape;
    for m in maps {
        if m.height > out_h || m.width > out_w {
            return Err(Error::Usage(format!(
                "output {out_h}x{out_w} is smaller than a {}x{} input map",
                m.height, m.width
            )));
        }
        if m.values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Validation("combine_maps expects normalized maps".into()));
        }
    }
    let mut out = vec![0.0; out_h * out_w];
    for (m, &w) in maps.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        let up = bilinear_resize(&m.values, m.shape(), output_shape);
        for (o, u) in out.iter_mut().zip(up) {
            *o += w * u;
        }
    }
    // rounding in the weighted sum can leave values a few ulps outside [0, 1]
    out.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
    SaliencyMap::new(out_h, out_w, out, MapStage::Combined)
}

/// Row and column of the maximum; ties go to the smallest row-major index.
pub fn salient_location(map: &SaliencyMap) -> (usize, usize) {
    let mut best = 0;
    for (i, &v) in map.values.iter().enumerate().skip(1) {
        if v > map.values[best] {
            best = i;
        }
    }
    (best / map.width, best % map.width)
}

/// Where a feature vector was read from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSource {
    pub sample_id: String,
    pub stage: usize,
    pub row: usize,
    pub col: usize,
    /// Spatial extent of the source stage, for mapping the location back onto the image.
    pub stage_shape: (usize, usize),
}

impl FeatureSource {
    /// Cell covered by the location as fractions of image width and height:
    /// `[left, top, right, bottom]`.
    pub fn box_fraction(&self) -> [f64; 4] {
        let (h, w) = self.stage_shape;
        [
            self.col as f64 / w as f64,
            self.row as f64 / h as f64,
            (self.col + 1) as f64 / w as f64,
            (self.row + 1) as f64 / h as f64,
        ]
    }
}

/// Channel vector of one stage at one location.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
    source: Option<FeatureSource>,
}

impl FeatureVector {
    /// A vector with no provenance, e.g. a hand-built query.
    pub fn new(values: Vec<f64>) -> Self {
        FeatureVector {
            values,
            source: None,
        }
    }

    pub fn with_source(values: Vec<f64>, source: FeatureSource) -> Self {
        FeatureVector {
            values,
            source: Some(source),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn source(&self) -> Option<&FeatureSource> {
        self.source.as_ref()
    }
}

/// Channel vector at `(row, col)` of a `C × H × W` tensor.
fn channel_vector(t: &Tensor, row: usize, col: usize) -> Vec<f64> {
    let (h, w) = (t.shape()[1], t.shape()[2]);
    let plane = h * w;
    let offset = row * w + col;
    t.data()
        .iter()
        .skip(offset)
        .step_by(plane)
        .map(|&v| v as f64)
        .collect()
}

/// Reads the channel vector at the most salient location of `stage`, using
/// that stage's own statistic map.
pub fn extract_feature(set: &ActivationSet, stage: usize) -> Result<FeatureVector> {
    let t = set.stage(stage)?;
    let map = smoe_statistic(t, stage)?;
    let (row, col) = salient_location(&map);
    Ok(FeatureVector::with_source(
        channel_vector(t, row, col),
        FeatureSource {
            sample_id: set.sample_id().to_string(),
            stage,
            row,
            col,
            stage_shape: map.shape(),
        },
    ))
}

/// Normalized statistic maps of all five stages, fused at the stage-1 resolution.
pub fn combined_map(set: &ActivationSet, weights: &[f64]) -> Result<SaliencyMap> {
    let maps = set
        .stages()
        .iter()
        .enumerate()
        .map(|(i, t)| smoe_statistic(t, i + 1).map(|m| normalize_map(&m)))
        .collect::<Result<Vec<_>>>()?;
    let out = maps[0].shape();
    combine_maps(&maps, out, weights)
}
