//! Subcommand implementations behind the `texplain` binary. Each command takes
//! a [`RunConfig`], locks its output directory, and writes plain files: CSV
//! tables, TOML manifests and SVG figures.

mod config;
mod figures;
mod store;

use std::path::{Path, PathBuf};
use std::sync::atomic::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{RunConfig, Scenario, SynthConfig};
pub use figures::{correlation_bar_chart, similarity_heatmap};
pub use store::{load_feature, write_atomic, CachePaths, OutputLock};

use crate::correlation::{
    batch_similarity, batch_texture_profiles, profiles_from_csv, profiles_to_csv, BatchSimilarityMatrix,
    CorrelationReport, SignConvention,
};
use crate::error::{Error, Result};
use crate::exchange::DatasetManifest;
use crate::metric::NeighborResult;
use crate::pipeline::{analyze, FeatureSet};
use crate::saliency::FeatureVector;
use crate::synth::{gen_material_dataset, gen_texture_dataset, MaterialSpec, TextureDatasetSpec};
use store::{refresh_sample, CacheStats};

/// Rows per column of the Top/Bottom table.
pub const TABLE_ROWS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeaturesSummary {
    pub computed: usize,
    pub skipped: usize,
}

/// Caches a feature vector and combined saliency map for every manifest sample.
/// Samples are independent: when some fail, the others are still written and
/// the first failure in sample order is returned.
pub fn cmd_features(cfg: &RunConfig) -> Result<FeaturesSummary> {
    cfg.validate()?;
    let manifest = DatasetManifest::load(cfg.manifest_path()?)?;
    let root = cfg.activation_root()?;
    let _lock = OutputLock::acquire(&cfg.out_dir)?;
    let stats = CacheStats::default();
    let samples: Vec<(&str, &str)> = manifest.samples().map(|(s, c, _)| (s, c)).collect();
    let results: Vec<Result<()>> = samples
        .par_iter()
        .map(|(s, c)| refresh_sample(&cfg.out_dir, &root, s, c, cfg.stage, &cfg.weights, &stats))
        .collect();
    results.into_iter().collect::<Result<()>>()?;
    Ok(FeaturesSummary {
        computed: stats.computed.load(Ordering::Relaxed),
        skipped: stats.skipped.load(Ordering::Relaxed),
    })
}

/// Cached features of every manifest sample.
pub fn load_features(cfg: &RunConfig, manifest: &DatasetManifest) -> Result<FeatureSet> {
    let samples: Vec<&str> = manifest.samples().map(|(s, _, _)| s).collect();
    let loaded = samples
        .par_iter()
        .map(|s| load_feature(&cfg.out_dir, s, cfg.stage).map(|f| (s.to_string(), f)))
        .collect::<Result<Vec<_>>>()?;
    let mut set = FeatureSet::default();
    for (s, f) in loaded {
        set.insert(s, f);
    }
    Ok(set)
}

/// One image in a montage with the cell its feature came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MontageImage {
    pub sample_id: String,
    pub class_id: String,
    pub image: PathBuf,
    /// `[row, col]` in the feature stage's grid.
    pub location: [usize; 2],
    /// `[left, top, right, bottom]` as fractions of the image size.
    pub box_fraction: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MontageNeighbor {
    pub rank: usize,
    pub distance: f64,
    #[serde(flatten)]
    pub image: MontageImage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryMode {
    Sample,
    Class,
}

/// Retrieval result in a form an overlay renderer can consume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Montage {
    pub mode: QueryMode,
    pub query: String,
    pub stage: usize,
    pub k: usize,
    pub query_images: Vec<MontageImage>,
    pub neighbors: Vec<MontageNeighbor>,
}

impl Montage {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Schema(format!("montage: {}", e.message())))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("montage serializes")
    }
}

fn montage_image(image_root: &Path, sample_id: &str, class_id: &str, f: &FeatureVector) -> MontageImage {
    let src = f.source().expect("cached features carry a source");
    MontageImage {
        sample_id: sample_id.to_string(),
        class_id: class_id.to_string(),
        image: image_root.join(format!("{sample_id}.pgm")),
        location: [src.row, src.col],
        box_fraction: src.box_fraction(),
    }
}

/// Path of the montage file for `query`; `/` in ids becomes `__`.
pub fn montage_path(out_dir: &Path, query: &str) -> PathBuf {
    out_dir.join("retrieve").join(format!("{}.montage.toml", query.replace('/', "__")))
}

/// Nearest interpretable samples to a sample (by distance) or to a target
/// class (by mean distance over its samples). A sample id wins over a class id
/// of the same name.
pub fn cmd_retrieve(cfg: &RunConfig, query: &str) -> Result<Montage> {
    cfg.validate()?;
    let manifest = DatasetManifest::load(cfg.manifest_path()?)?;
    let image_root = cfg.image_root()?;
    let _lock = OutputLock::acquire(&cfg.out_dir)?;
    let features = load_features(cfg, &manifest)?;
    let index = features.texture_index(&manifest)?;

    let (mode, members): (QueryMode, Vec<(String, String)>) = if let Some((class, _)) = manifest.find_sample(query) {
        (QueryMode::Sample, vec![(query.to_string(), class.to_string())])
    } else if let Some(c) = manifest.sem_class(query) {
        (
            QueryMode::Class,
            c.samples.iter().map(|s| (s.clone(), c.id.clone())).collect(),
        )
    } else {
        return Err(Error::Usage(format!("{query:?} is neither a sample nor a target class id")));
    };
    let query_features: Vec<FeatureVector> = members
        .iter()
        .map(|(s, _)| features.get(s).expect("loaded for every sample").clone())
        .collect();
    let result: NeighborResult = match mode {
        QueryMode::Sample => index.knn(&query_features[0], cfg.k)?,
        QueryMode::Class => index.rank_by_class(&query_features, cfg.k)?,
    };
    let montage = Montage {
        mode,
        query: query.to_string(),
        stage: cfg.stage,
        k: cfg.k,
        query_images: members
            .iter()
            .zip(&query_features)
            .map(|((s, c), f)| montage_image(&image_root, s, c, f))
            .collect(),
        neighbors: result
            .neighbors
            .iter()
            .enumerate()
            .map(|(i, n)| MontageNeighbor {
                rank: i + 1,
                distance: n.distance,
                image: montage_image(
                    &image_root,
                    &n.sample_id,
                    &n.class_id,
                    &index.get(&n.sample_id).expect("neighbor is indexed").feature,
                ),
            })
            .collect(),
    };
    write_atomic(&montage_path(&cfg.out_dir, query), montage.to_toml_string().as_bytes())?;
    Ok(montage)
}

/// Files written by [`cmd_correlate`], under `<out>/correlate`.
#[derive(Debug, Clone)]
pub struct CorrelateOutputs {
    pub relevance_csv: PathBuf,
    pub correlations_csv: PathBuf,
    pub table: PathBuf,
    pub chart: PathBuf,
}

impl CorrelateOutputs {
    pub fn new(out_dir: &Path) -> Self {
        let d = out_dir.join("correlate");
        CorrelateOutputs {
            relevance_csv: d.join("relevance.csv"),
            correlations_csv: d.join("correlations.csv"),
            table: d.join("correlations_table.txt"),
            chart: d.join("correlations.svg"),
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Bar chart from a written correlations file.
pub fn render_correlation_chart(csv_path: &Path, sign: SignConvention) -> Result<String> {
    let report = CorrelationReport::from_csv(&read_text(csv_path)?, sign).map_err(|e| e.in_file(csv_path))?;
    Ok(correlation_bar_chart(&report))
}

pub fn cmd_correlate(cfg: &RunConfig) -> Result<CorrelationReport> {
    cfg.validate()?;
    let manifest = DatasetManifest::load(cfg.manifest_path()?)?;
    let _lock = OutputLock::acquire(&cfg.out_dir)?;
    let features = load_features(cfg, &manifest)?;
    let analysis = analyze(&manifest, &features, cfg.sign)?;
    let out = CorrelateOutputs::new(&cfg.out_dir);
    write_atomic(&out.relevance_csv, analysis.relevance.to_csv().as_bytes())?;
    write_atomic(&out.correlations_csv, analysis.report.to_csv().as_bytes())?;
    write_atomic(&out.table, analysis.report.ranked_table(TABLE_ROWS).as_bytes())?;
    let chart = render_correlation_chart(&out.correlations_csv, cfg.sign)?;
    write_atomic(&out.chart, chart.as_bytes())?;
    Ok(analysis.report)
}

/// Files written by [`cmd_batchsim`], under `<out>/batchsim`.
#[derive(Debug, Clone)]
pub struct BatchsimOutputs {
    pub profiles_csv: PathBuf,
    pub similarity_csv: PathBuf,
    pub heatmap: PathBuf,
}

impl BatchsimOutputs {
    pub fn new(out_dir: &Path) -> Self {
        let d = out_dir.join("batchsim");
        BatchsimOutputs {
            profiles_csv: d.join("batch_profiles.csv"),
            similarity_csv: d.join("batch_similarity.csv"),
            heatmap: d.join("batch_similarity.svg"),
        }
    }
}

/// Heatmap from the written profile and similarity files, rows and columns
/// sorted by increasing CPS (ties by class id).
pub fn render_similarity_heatmap(profiles_csv: &Path, similarity_csv: &Path) -> Result<String> {
    let (_, profiles) = profiles_from_csv(&read_text(profiles_csv)?).map_err(|e| e.in_file(profiles_csv))?;
    let matrix = BatchSimilarityMatrix::from_csv(&read_text(similarity_csv)?).map_err(|e| e.in_file(similarity_csv))?;
    let cps_of = |id: &str| {
        profiles
            .iter()
            .find(|p| p.class_id == id)
            .map(|p| p.cps)
            .ok_or_else(|| Error::Schema(format!("class {id:?} has no profile in {}", profiles_csv.display())))
    };
    let cps = matrix.class_ids().iter().map(|id| cps_of(id)).collect::<Result<Vec<_>>>()?;
    let mut order: Vec<usize> = (0..matrix.len()).collect();
    order.sort_by(|&a, &b| cps[a].total_cmp(&cps[b]).then_with(|| matrix.class_ids()[a].cmp(&matrix.class_ids()[b])));
    Ok(similarity_heatmap(&matrix.reordered(&order)))
}

pub fn cmd_batchsim(cfg: &RunConfig) -> Result<BatchSimilarityMatrix> {
    cfg.validate()?;
    let manifest = DatasetManifest::load(cfg.manifest_path()?)?;
    let n = manifest.sem_classes().len();
    if n < 2 {
        return Err(Error::Usage(format!("batch similarity needs at least 2 target classes, got {n}")));
    }
    let _lock = OutputLock::acquire(&cfg.out_dir)?;
    let features = load_features(cfg, &manifest)?;
    let analysis = analyze(&manifest, &features, cfg.sign)?;
    let profiles = batch_texture_profiles(&analysis.relevance, &analysis.cps, cfg.sign)?;
    let matrix = batch_similarity(&profiles)?;
    let out = BatchsimOutputs::new(&cfg.out_dir);
    write_atomic(
        &out.profiles_csv,
        profiles_to_csv(analysis.relevance.texture_ids(), &profiles).as_bytes(),
    )?;
    write_atomic(&out.similarity_csv, matrix.to_csv().as_bytes())?;
    let heatmap = render_similarity_heatmap(&out.profiles_csv, &out.similarity_csv)?;
    write_atomic(&out.heatmap, heatmap.as_bytes())?;
    Ok(matrix)
}

/// Generates a synthetic material dataset plus interpretable textures into
/// `out_dir`, laid out like exporter output (`manifest.toml`, `images/`,
/// `activations/`).
pub fn cmd_synth(cfg: &RunConfig) -> Result<DatasetManifest> {
    let s = &cfg.synth;
    let (pos, neg, neu) = (s.positive_kinds()?, s.negative_kinds()?, s.neutral_kinds()?);
    let material = match s.scenario {
        Scenario::Planted => MaterialSpec::planted(&pos, &neg, &neu, s.classes, s.samples_per_class, cfg.seed),
        Scenario::TwoRegimes => MaterialSpec::two_regimes(&pos, &neg, &neu, s.classes, s.samples_per_class, cfg.seed),
    };
    let material = MaterialSpec { size: s.size, ..material };
    let textures = TextureDatasetSpec {
        kinds: s.texture_kinds()?,
        samples_per_class: s.texture_samples,
        size: s.size,
        seed: cfg.seed,
    };
    let _lock = OutputLock::acquire(&cfg.out_dir)?;
    let data = gen_material_dataset(&material)?.merge(gen_texture_dataset(&textures)?)?;
    data.write(&cfg.out_dir)?;
    Ok(data.manifest)
}
