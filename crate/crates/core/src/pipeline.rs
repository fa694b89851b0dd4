//! In-memory glue from activation sets to relevance matrices and correlation
//! reports. The command layer adds caching and file output on top.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::correlation::{
    batch_similarity, batch_texture_profiles, texture_cps_correlations, BatchProfile,
    BatchSimilarityMatrix, CorrelationReport, CpsVector, SignConvention,
};
use crate::error::{Error, Result};
use crate::exchange::{ActivationSet, DatasetManifest};
use crate::metric::{relevance_matrix, FeatureClass, IndexEntry, NeighborIndex, RelevanceMatrix};
use crate::saliency::{extract_feature, FeatureVector};

/// Feature vectors keyed by sample id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureSet {
    by_sample: BTreeMap<String, FeatureVector>,
}

impl FeatureSet {
    pub fn insert(&mut self, sample_id: impl Into<String>, f: FeatureVector) {
        self.by_sample.insert(sample_id.into(), f);
    }

    pub fn get(&self, sample_id: &str) -> Option<&FeatureVector> {
        self.by_sample.get(sample_id)
    }

    pub fn len(&self) -> usize {
        self.by_sample.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_sample.is_empty()
    }

    fn require(&self, sample_id: &str) -> Result<&FeatureVector> {
        self.get(sample_id)
            .ok_or_else(|| Error::Usage(format!("no feature for sample {sample_id:?}")))
    }

    /// Target and texture classes of `manifest`, each with its samples' features.
    pub fn classes(&self, manifest: &DatasetManifest) -> Result<(Vec<FeatureClass>, Vec<FeatureClass>)> {
        let gather = |samples: &[String]| -> Result<Vec<FeatureVector>> {
            samples.iter().map(|s| self.require(s).cloned()).collect()
        };
        let sem = manifest
            .sem_classes()
            .iter()
            .map(|c| Ok(FeatureClass::new(c.id.clone(), gather(&c.samples)?)))
            .collect::<Result<Vec<_>>>()?;
        let tex = manifest
            .texture_classes()
            .iter()
            .map(|c| Ok(FeatureClass::new(c.id.clone(), gather(&c.samples)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok((sem, tex))
    }

    /// Index over every interpretable (texture) sample.
    pub fn texture_index(&self, manifest: &DatasetManifest) -> Result<NeighborIndex> {
        let entries = manifest
            .texture_classes()
            .iter()
            .flat_map(|c| c.samples.iter().map(move |s| (s, &c.id)))
            .map(|(s, c)| Ok(IndexEntry::new(s.clone(), c.clone(), self.require(s)?.clone())))
            .collect::<Result<Vec<_>>>()?;
        NeighborIndex::build(entries)
    }
}

/// Extracts one feature per activation set, in parallel.
pub fn extract_features(sets: &[ActivationSet], stage: usize) -> Result<FeatureSet> {
    let features = sets
        .par_iter()
        .map(|s| extract_feature(s, stage).map(|f| (s.sample_id().to_string(), f)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = FeatureSet::default();
    for (id, f) in features {
        out.insert(id, f);
    }
    Ok(out)
}

pub fn relevance(manifest: &DatasetManifest, features: &FeatureSet) -> Result<RelevanceMatrix> {
    let (sem, tex) = features.classes(manifest)?;
    relevance_matrix(&sem, &tex)
}

/// Everything the correlation stage produces for one dataset.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub relevance: RelevanceMatrix,
    pub cps: CpsVector,
    pub report: CorrelationReport,
}

pub fn analyze(manifest: &DatasetManifest, features: &FeatureSet, sign: SignConvention) -> Result<Analysis> {
    let cps = CpsVector::from_manifest(manifest)?;
    let relevance = relevance(manifest, features)?;
    let report = texture_cps_correlations(&relevance, &cps, sign)?;
    Ok(Analysis {
        relevance,
        cps,
        report,
    })
}

impl Analysis {
    pub fn batch_profiles(&self, sign: SignConvention) -> Result<Vec<BatchProfile>> {
        batch_texture_profiles(&self.relevance, &self.cps, sign)
    }

    pub fn batch_similarity(&self, sign: SignConvention) -> Result<BatchSimilarityMatrix> {
        batch_similarity(&self.batch_profiles(sign)?)
    }
}
