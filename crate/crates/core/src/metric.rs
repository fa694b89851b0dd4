//! Euclidean distances between feature vectors, exact k-nearest-neighbor
//! retrieval, and the class-level aggregates built on top of them.

use std::collections::HashSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::saliency::FeatureVector;

#[inline]
fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn distance(a: &FeatureVector, b: &FeatureVector) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Usage(format!(
            "feature length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(euclidean(a.values(), b.values()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexEntry {
    pub sample_id: String,
    pub class_id: String,
    pub feature: FeatureVector,
}

impl IndexEntry {
    pub fn new(sample_id: impl Into<String>, class_id: impl Into<String>, feature: FeatureVector) -> Self {
        IndexEntry {
            sample_id: sample_id.into(),
            class_id: class_id.into(),
            feature,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub sample_id: String,
    pub class_id: String,
    pub distance: f64,
}

/// Neighbors in ascending distance; ties are ordered by sample id.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NeighborResult {
    pub neighbors: Vec<Neighbor>,
}

impl NeighborResult {
    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn sample_ids(&self) -> Vec<&str> {
        self.neighbors.iter().map(|n| n.sample_id.as_str()).collect()
    }
}

/// Immutable brute-force index over equal-length feature vectors, ordered by sample id.
#[derive(Debug, Clone)]
pub struct NeighborIndex {
    entries: Vec<IndexEntry>,
    dim: usize,
    stage: Option<usize>,
}

impl NeighborIndex {
    pub fn build(mut entries: Vec<IndexEntry>) -> Result<Self> {
        let Some(first) = entries.first() else {
            return Err(Error::Usage("cannot build an index over zero features".into()));
        };
        let dim = first.feature.len();
        let stage = first.feature.source().map(|s| s.stage);
        if let Some(bad) = entries.iter().find(|e| e.feature.len() != dim) {
            return Err(Error::Usage(format!(
                "feature of {} has length {}, expected {dim}",
                bad.sample_id,
                bad.feature.len()
            )));
        }
        let mut seen = HashSet::with_capacity(entries.len());
        if let Some(dup) = entries.iter().find(|e| !seen.insert(e.sample_id.as_str())) {
            return Err(Error::Usage(format!("duplicate sample id {:?}", dup.sample_id)));
        }
        entries.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));
        Ok(NeighborIndex {
            entries,
            dim,
            stage,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stage the indexed features were read from, when they carry provenance.
    pub fn stage(&self) -> Option<usize> {
        self.stage
    }

    pub fn entries(&self) -> &[IndexEntry] {
        &self.entries
    }

    pub fn get(&self, sample_id: &str) -> Option<&IndexEntry> {
        self.entries
            .binary_search_by(|e| e.sample_id.as_str().cmp(sample_id))
            .ok()
            .map(|i| &self.entries[i])
    }

    fn check_request(&self, query_len: usize, k: usize) -> Result<()> {
        if query_len != self.dim {
            return Err(Error::Usage(format!(
                "query has length {query_len}, index holds length {}",
                self.dim
            )));
        }
        if k == 0 || k > self.entries.len() {
            return Err(Error::Usage(format!(
                "k = {k} outside 1..={} for this index",
                self.entries.len()
            )));
        }
        Ok(())
    }

    /// Keeps the `k` smallest `(distance, entry position)` pairs in order.
    /// Entry position follows sample id order, so it doubles as the tie-break.
    fn select(&self, mut scored: Vec<(f64, usize)>, k: usize) -> NeighborResult {
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < scored.len() {
            scored.select_nth_unstable_by(k - 1, cmp);
            scored.truncate(k);
        }
        scored.sort_unstable_by(cmp);
        NeighborResult {
            neighbors: scored
                .into_iter()
                .map(|(d, i)| Neighbor {
                    sample_id: self.entries[i].sample_id.clone(),
                    class_id: self.entries[i].class_id.clone(),
                    distance: d,
                })
                .collect(),
        }
    }

    pub fn knn(&self, query: &FeatureVector, k: usize) -> Result<NeighborResult> {
        self.check_request(query.len(), k)?;
        let scored = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| (euclidean(query.values(), e.feature.values()), i))
            .collect();
        Ok(self.select(scored, k))
    }

    /// Same result as [`NeighborIndex::knn`], with distances computed in parallel.
    pub fn knn_par(&self, query: &FeatureVector, k: usize) -> Result<NeighborResult> {
        self.check_request(query.len(), k)?;
        let scored = self
            .entries
            .par_iter()
            .enumerate()
            .map(|(i, e)| (euclidean(query.values(), e.feature.values()), i))
            .collect();
        Ok(self.select(scored, k))
    }

    /// Ranks entries by their mean distance to every member of a class.
    pub fn rank_by_class(&self, class: &[FeatureVector], k: usize) -> Result<NeighborResult> {
        let first = class
            .first()
            .ok_or_else(|| Error::Usage("class query with no samples".into()))?;
        self.check_request(first.len(), k)?;
        let scored = self
            .entries
            .par_iter()
            .enumerate()
            .map(|(i, e)| class_mean_distance(class, &e.feature).map(|d| (d, i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.select(scored, k))
    }
}

/// Mean distance from `z` to each member of `class`.
pub fn class_mean_distance(class: &[FeatureVector], z: &FeatureVector) -> Result<f64> {
    if class.is_empty() {
        return Err(Error::Usage("class mean distance over an empty class".into()));
    }
    let mut sum = 0.0;
    for c in class {
        sum += distance(c, z)?;
    }
    Ok(sum / class.len() as f64)
}

/// Mean over texture samples of the class mean distance; equivalently the
/// grand mean of all pairwise distances between the two classes.
pub fn texture_relevance(sem_class: &[FeatureVector], texture_class: &[FeatureVector]) -> Result<f64> {
    if texture_class.is_empty() {
        return Err(Error::Usage("texture relevance over an empty texture class".into()));
    }
    let mut sum = 0.0;
    for t in texture_class {
        sum += class_mean_distance(sem_class, t)?;
    }
    Ok(sum / texture_class.len() as f64)
}

/// A labeled group of feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureClass {
    pub id: String,
    pub features: Vec<FeatureVector>,
}

impl FeatureClass {
    pub fn new(id: impl Into<String>, features: Vec<FeatureVector>) -> Self {
        FeatureClass {
            id: id.into(),
            features,
        }
    }
}

/// Rows are target classes, columns texture classes, both in id order.
#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceMatrix {
    sem_ids: Vec<String>,
    texture_ids: Vec<String>,
    values: Vec<f64>,
}

impl RelevanceMatrix {
    pub fn new(sem_ids: Vec<String>, texture_ids: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if values.len() != sem_ids.len() * texture_ids.len() {
            return Err(Error::Validation(format!(
                "relevance matrix {}x{} needs {} values, got {}",
                sem_ids.len(),
                texture_ids.len(),
                sem_ids.len() * texture_ids.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Validation("relevance values must be finite and non-negative".into()));
        }
        Ok(RelevanceMatrix {
            sem_ids,
            texture_ids,
            values,
        })
    }

    pub fn sem_ids(&self) -> &[String] {
        &self.sem_ids
    }

    pub fn texture_ids(&self) -> &[String] {
        &self.texture_ids
    }

    pub fn rows(&self) -> usize {
        self.sem_ids.len()
    }

    pub fn cols(&self) -> usize {
        self.texture_ids.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let n = self.cols();
        &self.values[row * n..(row + 1) * n]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows()).map(|r| self.get(r, col)).collect()
    }

    /// Header row `sem_class,<texture ids...>`, then one row per target class.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = std::iter::once("sem_class").chain(self.texture_ids.iter().map(String::as_str));
        w.write_record(header).expect("in-memory csv");
        for (i, id) in self.sem_ids.iter().enumerate() {
            let row = std::iter::once(id.clone()).chain(self.row(i).iter().map(|v| v.to_string()));
            w.write_record(row).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r
            .headers()
            .map_err(|e| Error::Schema(format!("relevance csv header: {e}")))?
            .clone();
        let texture_ids: Vec<String> = header.iter().skip(1).map(String::from).collect();
        let mut sem_ids = Vec::new();
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::Schema(format!("relevance csv: {e}")))?;
            let mut fields = rec.iter();
            sem_ids.push(fields.next().unwrap_or_default().to_string());
            for f in fields {
                values.push(
                    f.parse::<f64>()
                        .map_err(|_| Error::Schema(format!("bad relevance value {f:?}")))?,
                );
            }
        }
        Self::new(sem_ids, texture_ids, values)
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Texture relevance for every (target class, texture class) pair.
pub fn relevance_matrix(sem_classes: &[FeatureClass], texture_classes: &[FeatureClass]) -> Result<RelevanceMatrix> {
    if sem_classes.len() < 2 {
        return Err(Error::Usage(format!(
            "relevance matrix needs at least 2 target classes, got {}",
            sem_classes.len()
        )));
    }
    if texture_classes.is_empty() {
        return Err(Error::Usage("relevance matrix needs at least 1 texture class".into()));
    }
    let mut sem: Vec<&FeatureClass> = sem_classes.iter().collect();
    let mut tex: Vec<&FeatureClass> = texture_classes.iter().collect();
    sem.sort_by(|a, b| a.id.cmp(&b.id));
    tex.sort_by(|a, b| a.id.cmp(&b.id));
    for c in sem.iter().chain(&tex) {
        if c.features.is_empty() {
            return Err(Error::Usage(format!("class {:?} has no features", c.id)));
        }
    }

    let cells: Vec<(usize, usize)> = (0..sem.len())
        .flat_map(|i| (0..tex.len()).map(move |j| (i, j)))
        .collect();
    let values = cells
        .par_iter()
        .map(|&(i, j)| texture_relevance(&sem[i].features, &tex[j].features))
        .collect::<Result<Vec<f64>>>()?;
    RelevanceMatrix::new(
        sem.iter().map(|c| c.id.clone()).collect(),
        tex.iter().map(|c| c.id.clone()).collect(),
        values,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(v: &[f64]) -> FeatureVector {
        FeatureVector::new(v.to_vec())
    }

    fn index(vectors: &[&[f64]]) -> NeighborIndex {
        NeighborIndex::build(
            vectors
                .iter()
                .enumerate()
                .map(|(i, v)| IndexEntry::new(format!("s{i:02}"), "t", fv(v)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn distance_basics() {
        let x = fv(&[1.5, -2.0, 3.0]);
        assert_eq!(distance(&x, &x).unwrap(), 0.0);
        assert_eq!(distance(&fv(&[0.0, 0.0]), &fv(&[3.0, 4.0])).unwrap(), 5.0);
        assert!(matches!(distance(&fv(&[0.0]), &fv(&[0.0, 1.0])), Err(Error::Usage(_))));
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(matches!(NeighborIndex::build(vec![]), Err(Error::Usage(_))));
        let dup = vec![IndexEntry::new("a", "t", fv(&[0.0])), IndexEntry::new("a", "t", fv(&[1.0]))];
        assert!(matches!(NeighborIndex::build(dup), Err(Error::Usage(_))));
        let mixed = vec![IndexEntry::new("a", "t", fv(&[0.0])), IndexEntry::new("b", "t", fv(&[1.0, 2.0]))];
        assert!(matches!(NeighborIndex::build(mixed), Err(Error::Usage(_))));
    }

    #[test]
    fn build_sorts_by_sample_id() {
        let idx = NeighborIndex::build(vec![
            IndexEntry::new("b", "t", fv(&[0.0])),
            IndexEntry::new("a", "t", fv(&[1.0])),
        ])
        .unwrap();
        assert_eq!(idx.entries()[0].sample_id, "a");
        assert_eq!(idx.get("b").unwrap().feature.values(), &[0.0]);
        assert!(idx.get("c").is_none());
    }

    #[test]
    fn knn_exact_match_first() {
        let idx = index(&[&[0.0, 0.0], &[1.0, 1.0], &[5.0, 5.0]]);
        let r = idx.knn(&fv(&[1.0, 1.0]), 1).unwrap();
        assert_eq!(r.sample_ids(), vec!["s01"]);
        assert_eq!(r.neighbors[0].distance, 0.0);
    }

    #[test]
    fn knn_full_and_ties() {
        // s00 and s02 are equidistant from the query; the smaller id wins
        let idx = index(&[&[1.0], &[10.0], &[-1.0]]);
        let r = idx.knn(&fv(&[0.0]), 3).unwrap();
        assert_eq!(r.sample_ids(), vec!["s00", "s02", "s01"]);
        assert_eq!(idx.knn_par(&fv(&[0.0]), 3).unwrap(), r);
        assert!(matches!(idx.knn(&fv(&[0.0]), 4), Err(Error::Usage(_))));
        assert!(matches!(idx.knn(&fv(&[0.0]), 0), Err(Error::Usage(_))));
    }

    #[test]
    fn class_mean_cases() {
        let z = fv(&[3.0, 4.0]);
        let x = fv(&[0.0, 0.0]);
        assert_eq!(class_mean_distance(&[x.clone()], &z).unwrap(), 5.0);
        assert_eq!(class_mean_distance(&[x.clone(), x.clone(), x], &z).unwrap(), 5.0);
        assert!(matches!(class_mean_distance(&[], &z), Err(Error::Usage(_))));
    }

    #[test]
    fn relevance_cases() {
        let a = fv(&[0.0, 0.0]);
        let b = fv(&[3.0, 4.0]);
        assert_eq!(texture_relevance(&[a.clone()], &[b.clone()]).unwrap(), 5.0);
        let sem = [a.clone(), fv(&[6.0, 8.0])];
        assert_eq!(
            texture_relevance(&sem, &[b.clone(), b.clone(), b.clone()]).unwrap(),
            class_mean_distance(&sem, &b).unwrap()
        );
        assert!(texture_relevance(&sem, &[]).is_err());
        assert!(texture_relevance(&[], &[b]).is_err());
    }

    #[test]
    fn relevance_matrix_shape_and_order() {
        let t = FeatureClass::new("tex", vec![fv(&[1.0])]);
        let s2 = FeatureClass::new("B", vec![fv(&[0.0])]);
        let s1 = FeatureClass::new("A", vec![fv(&[0.0])]);
        let m = relevance_matrix(&[s2, s1], &[t]).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 1));
        assert_eq!(m.sem_ids(), &["A".to_string(), "B".to_string()]);
        assert_eq!(m.row(0), m.row(1));
        assert!(relevance_matrix(&[FeatureClass::new("A", vec![fv(&[0.0])])], &[]).is_err());
    }

    #[test]
    fn relevance_csv_roundtrip() {
        let m = RelevanceMatrix::new(
            vec!["A".into(), "B".into()],
            vec!["dotted".into(), "striped".into()],
            vec![0.1, 0.2, 1.0 / 3.0, 4.5],
        )
        .unwrap();
        let text = m.to_csv();
        assert!(text.starts_with("sem_class,dotted,striped\n"));
        assert_eq!(RelevanceMatrix::from_csv(&text).unwrap(), m);
    }

    #[test]
    fn rank_by_singleton_class_matches_knn() {
        let idx = index(&[&[0.0, 1.0], &[2.0, 2.0], &[5.0, -1.0], &[0.5, 0.5]]);
        let q = fv(&[1.0, 1.0]);
        assert_eq!(idx.rank_by_class(&[q.clone()], 4).unwrap(), idx.knn(&q, 4).unwrap());
    }
}
