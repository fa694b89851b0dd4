//! Texture-versus-CPS correlation rankings and batch profile similarity.
//!
//! Correlations run per texture class along the target-class axis, so every
//! compared vector has one entry per target class, matching the CPS vector.
//! Both sides are z-normalized with the population standard deviation before
//! the cosine, which makes each reported value a Pearson correlation.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::RelevanceMatrix;

/// How relevance distances are oriented before correlating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignConvention {
    /// Negate distances so that "closer" reads as "more present".
    #[default]
    Similarity,
    /// Correlate the raw distances.
    Distance,
}

impl SignConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            SignConvention::Similarity => "similarity",
            SignConvention::Distance => "distance",
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            SignConvention::Similarity => SignConvention::Distance,
            SignConvention::Distance => SignConvention::Similarity,
        }
    }

    fn orient(self, v: f64) -> f64 {
        match self {
            SignConvention::Similarity => -v,
            SignConvention::Distance => v,
        }
    }
}

impl FromStr for SignConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "similarity" => Ok(SignConvention::Similarity),
            "distance" => Ok(SignConvention::Distance),
            other => Err(Error::Usage(format!(
                "sign convention must be similarity or distance, got {other:?}"
            ))),
        }
    }
}

/// Subtract the mean and divide by the population standard deviation.
pub fn znorm(v: &[f64], name: &str) -> Result<Vec<f64>> {
    if v.len() < 2 {
        return Err(Error::Degenerate(format!(
            "{name}: z-normalization needs at least 2 values, got {}",
            v.len()
        )));
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if !(std > 0.0) || v.iter().all(|&x| x == v[0]) {
        return Err(Error::Degenerate(format!("{name}: constant vector")));
    }
    Ok(v.iter().map(|x| (x - mean) / std).collect())
}

/// Cosine of the angle between two vectors, clamped to `[-1, 1]`.
pub fn cosine(w: &[f64], y: &[f64]) -> Result<f64> {
    if w.len() != y.len() {
        return Err(Error::Usage(format!(
            "cosine of vectors with lengths {} and {}",
            w.len(),
            y.len()
        )));
    }
    let dot: f64 = w.iter().zip(y).map(|(a, b)| a * b).sum();
    let nw = w.iter().map(|a| a * a).sum::<f64>().sqrt();
    let ny = y.iter().map(|b| b * b).sum::<f64>().sqrt();
    if nw == 0.0 || ny == 0.0 {
        return Err(Error::Usage("cosine of a zero vector".into()));
    }
    Ok((dot / (nw * ny)).clamp(-1.0, 1.0))
}

/// Target values per class, in canonical class order.
#[derive(Debug, Clone, PartialEq)]
pub struct CpsVector {
    class_ids: Vec<String>,
    values: Vec<f64>,
}

impl CpsVector {
    pub fn new(pairs: Vec<(String, f64)>) -> Result<Self> {
        let mut pairs = pairs;
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        if pairs.len() < 2 {
            return Err(Error::Degenerate(format!(
                "CPS vector needs at least 2 classes, got {}",
                pairs.len()
            )));
        }
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Usage("duplicate class in CPS vector".into()));
        }
        if pairs.iter().any(|p| !p.1.is_finite()) {
            return Err(Error::Validation("non-finite CPS value".into()));
        }
        if pairs.iter().all(|p| p.1 == pairs[0].1) {
            return Err(Error::Degenerate("CPS vector: all classes share one value".into()));
        }
        let (class_ids, values) = pairs.into_iter().unzip();
        Ok(CpsVector { class_ids, values })
    }

    pub fn from_manifest(m: &crate::exchange::DatasetManifest) -> Result<Self> {
        Self::new(m.sem_classes().iter().map(|c| (c.id.clone(), c.cps)).collect())
    }

    pub fn class_ids(&self) -> &[String] {
        &self.class_ids
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

    fn check_rows(&self, r: &RelevanceMatrix) -> Result<()> {
        if r.sem_ids() != self.class_ids.as_slice() {
            return Err(Error::Usage(format!(
                "relevance rows {:?} do not match CPS classes {:?}",
                r.sem_ids(),
                self.class_ids
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextureCorrelation {
    pub texture_id: String,
    pub s: f64,
    /// Relevance was identical across all target classes; `s` is reported as 0.
    pub degenerate: bool,
}

/// Per-texture correlations, sorted by `s` descending, ties by texture id.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub sign_convention: SignConvention,
    pub entries: Vec<TextureCorrelation>,
}

fn sort_entries(entries: &mut [TextureCorrelation]) {
    entries.sort_by(|a, b| b.s.total_cmp(&a.s).then_with(|| a.texture_id.cmp(&b.texture_id)));
}

pub fn texture_cps_correlations(
    r: &RelevanceMatrix,
    cps: &CpsVector,
    sign: SignConvention,
) -> Result<CorrelationReport> {
    cps.check_rows(r)?;
    let w = znorm(cps.values(), "CPS vector")?;
    let mut entries = (0..r.cols())
        .into_par_iter()
        .map(|j| {
            let texture_id = r.texture_ids()[j].clone();
            let column: Vec<f64> = r.column(j).into_iter().map(|v| sign.orient(v)).collect();
            match znorm(&column, &texture_id) {
                Ok(y) => cosine(&w, &y).map(|s| TextureCorrelation {
                    texture_id,
                    s,
                    degenerate: false,
                }),
                Err(Error::Degenerate(_)) => Ok(TextureCorrelation {
                    texture_id,
                    s: 0.0,
                    degenerate: true,
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    sort_entries(&mut entries);
    Ok(CorrelationReport {
        sign_convention: sign,
        entries,
    })
}

impl CorrelationReport {
    pub fn get(&self, texture_id: &str) -> Option<&TextureCorrelation> {
        self.entries.iter().find(|e| e.texture_id == texture_id)
    }

    /// `texture_id,s,degenerate` with full-precision values.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["texture_id", "s", "degenerate"]).expect("in-memory csv");
        for e in &self.entries {
            w.write_record([e.texture_id.as_str(), &e.s.to_string(), if e.degenerate { "1" } else { "0" }])
                .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
    }

    pub fn from_csv(text: &str, sign: SignConvention) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let mut entries = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::Schema(format!("correlation csv: {e}")))?;
            if rec.len() != 3 {
                return Err(Error::Schema(format!("correlation csv row has {} fields", rec.len())));
            }
            let s = rec[1]
                .parse::<f64>()
                .map_err(|_| Error::Schema(format!("bad correlation {:?}", &rec[1])))?;
            entries.push(TextureCorrelation {
                texture_id: rec[0].to_string(),
                s,
                degenerate: &rec[2] == "1",
            });
        }
        sort_entries(&mut entries);
        Ok(CorrelationReport {
            sign_convention: sign,
            entries,
        })
    }

    /// Two-column Top/Bottom ranking at 4 decimals; the bottom column lists the
    /// most negative value first.
    pub fn ranked_table(&self, rows: usize) -> String {
        let n = rows.min(self.entries.len());
        let top = &self.entries[..n];
        let bottom: Vec<_> = self.entries.iter().rev().take(n).collect();
        let width = self
            .entries
            .iter()
            .map(|e| e.texture_id.len())
            .max()
            .unwrap_or(0)
            .max("Texture".len());
        let mut out = String::new();
        let top_title = format!("Top {n}");
        let bottom_title = format!("Bottom {n}");
        let _ = writeln!(out, "{top_title:<w$} | {bottom_title:<w$}", w = width + 13);
        let _ = writeln!(
            out,
            "{:<width$} {:>12} | {:<width$} {:>12}",
            "Texture", "Correlation", "Texture", "Correlation"
        );
        let _ = writeln!(out, "{}", "-".repeat(2 * (width + 13) + 3));
        for (t, b) in top.iter().zip(&bottom) {
            let _ = writeln!(
                out,
                "{:<width$} {:>12.4} | {:<width$} {:>12.4}",
                t.texture_id, t.s, b.texture_id, b.s
            );
        }
        out
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// One target class's oriented, z-normalized relevance row.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchProfile {
    pub class_id: String,
    pub cps: f64,
    pub values: Vec<f64>,
}

pub fn batch_texture_profiles(
    r: &RelevanceMatrix,
    cps: &CpsVector,
    sign: SignConvention,
) -> Result<Vec<BatchProfile>> {
    cps.check_rows(r)?;
    (0..r.rows())
        .map(|i| {
            let class_id = &r.sem_ids()[i];
            let row: Vec<f64> = r.row(i).iter().map(|&v| sign.orient(v)).collect();
            let values = znorm(&row, &format!("relevance row of class {class_id:?}"))?;
            Ok(BatchProfile {
                class_id: class_id.clone(),
                cps: cps.values()[i],
                values,
            })
        })
        .collect()
}

/// `class,cps,<texture ids...>`, one row per profile.
pub fn profiles_to_csv(texture_ids: &[String], profiles: &[BatchProfile]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = ["class", "cps"].into_iter().chain(texture_ids.iter().map(String::as_str));
    w.write_record(header).expect("in-memory csv");
    for p in profiles {
        let row = [p.class_id.clone(), p.cps.to_string()]
            .into_iter()
            .chain(p.values.iter().map(f64::to_string));
        w.write_record(row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

/// Inverse of [`profiles_to_csv`]: texture ids and profiles.
pub fn profiles_from_csv(text: &str) -> Result<(Vec<String>, Vec<BatchProfile>)> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r
        .headers()
        .map_err(|e| Error::Schema(format!("profile csv header: {e}")))?
        .clone();
    if header.len() < 2 || &header[0] != "class" || &header[1] != "cps" {
        return Err(Error::Schema("profile csv must start with class,cps columns".into()));
    }
    let texture_ids: Vec<String> = header.iter().skip(2).map(String::from).collect();
    let num = |f: &str| {
        f.parse::<f64>()
            .map_err(|_| Error::Schema(format!("bad profile value {f:?}")))
    };
    let mut profiles = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Schema(format!("profile csv: {e}")))?;
        profiles.push(BatchProfile {
            class_id: rec[0].to_string(),
            cps: num(&rec[1])?,
            values: rec.iter().skip(2).map(num).collect::<Result<_>>()?,
        });
    }
    Ok((texture_ids, profiles))
}

/// Symmetric matrix of pairwise profile cosines with a unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchSimilarityMatrix {
    class_ids: Vec<String>,
    values: Vec<f64>,
}

impl BatchSimilarityMatrix {
    pub fn new(class_ids: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n = class_ids.len();
        if values.len() != n * n {
            return Err(Error::Validation(format!(
                "similarity matrix over {n} classes needs {} values, got {}",
                n * n,
                values.len()
            )));
        }
        Ok(BatchSimilarityMatrix { class_ids, values })
    }

    pub fn class_ids(&self) -> &[String] {
        &self.class_ids
    }

    pub fn len(&self) -> usize {
        self.class_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Rows and columns rearranged to follow `order` (indices into the current order).
    pub fn reordered(&self, order: &[usize]) -> Self {
        let ids = order.iter().map(|&i| self.class_ids[i].clone()).collect();
        let values = order
            .iter()
            .flat_map(|&i| order.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        BatchSimilarityMatrix { class_ids: ids, values }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = std::iter::once("class").chain(self.class_ids.iter().map(String::as_str));
        w.write_record(header).expect("in-memory csv");
        for (i, id) in self.class_ids.iter().enumerate() {
            let row = std::iter::once(id.clone())
                .chain((0..self.len()).map(|j| self.get(i, j).to_string()));
            w.write_record(row).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let ids: Vec<String> = r
            .headers()
            .map_err(|e| Error::Schema(format!("similarity csv header: {e}")))?
            .iter()
            .skip(1)
            .map(String::from)
            .collect();
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::Schema(format!("similarity csv: {e}")))?;
            for f in rec.iter().skip(1) {
                values.push(
                    f.parse::<f64>()
                        .map_err(|_| Error::Schema(format!("bad similarity value {f:?}")))?,
                );
            }
        }
        Self::new(ids, values)
    }
}

pub fn batch_similarity(profiles: &[BatchProfile]) -> Result<BatchSimilarityMatrix> {
    let n = profiles.len();
    if n < 2 {
        return Err(Error::Usage(format!("batch similarity needs at least 2 profiles, got {n}")));
    }
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = cosine(&profiles[i].values, &profiles[i].values)?;
        for j in i + 1..n {
            let s = cosine(&profiles[i].values, &profiles[j].values)?;
            values[i * n + j] = s;
            values[j * n + i] = s;
        }
    }
    BatchSimilarityMatrix::new(profiles.iter().map(|p| p.class_id.clone()).collect(), values)
}
