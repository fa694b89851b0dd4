//! On-disk feature cache under `<out>/features` and `<out>/saliency`.
//!
//! Each sample gets a feature tensor, a combined saliency map (tensor and
//! graymap), and a small TOML record written last. The record carries a
//! fingerprint of the inputs, so a rerun skips samples whose record matches.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exchange::{activation_path, read_tensor, write_tensor, ActivationSet, Tensor, STAGE_COUNT};
use crate::saliency::{combined_map, extract_feature, FeatureSource, FeatureVector};

/// Bumped whenever the cached representation changes.
const CACHE_VERSION: &str = "texplain-features-1";

/// Exclusive ownership of an output directory for one run.
#[derive(Debug)]
pub struct OutputLock {
    path: PathBuf,
}

impl OutputLock {
    pub fn acquire(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(".lock");
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(OutputLock { path }),
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => Err(Error::io(
                &path,
                io::Error::new(
                    io::ErrorKind::AlreadyExists,
                    "output directory is in use by another run (delete the lock file if that run died)",
                ),
            )),
            Err(e) => Err(Error::io(&path, e)),
        }
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// Writes through a sibling temporary file and a rename, so readers never see
/// a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct FeatureRecord {
    sample_id: String,
    class_id: String,
    stage: usize,
    row: usize,
    col: usize,
    stage_shape: [usize; 2],
    fingerprint: String,
}

/// Paths of one sample's cache entries.
#[derive(Debug, Clone)]
pub struct CachePaths {
    pub feature: PathBuf,
    pub record: PathBuf,
    pub map: PathBuf,
    pub map_image: PathBuf,
}

impl CachePaths {
    pub fn new(out_dir: &Path, sample_id: &str) -> Self {
        let f = out_dir.join("features");
        let s = out_dir.join("saliency");
        CachePaths {
            feature: f.join(format!("{sample_id}.feat.txa")),
            record: f.join(format!("{sample_id}.meta.toml")),
            map: s.join(format!("{sample_id}.map.txa")),
            map_image: s.join(format!("{sample_id}.map.pgm")),
        }
    }
}

fn fingerprint(sample_id: &str, class_id: &str, stage: usize, weights: &[f64], inputs: &[Vec<u8>]) -> String {
    let mut h = Sha256::new();
    h.update(CACHE_VERSION.as_bytes());
    for s in [sample_id, class_id] {
        h.update((s.len() as u64).to_le_bytes());
        h.update(s.as_bytes());
    }
    h.update((stage as u64).to_le_bytes());
    for w in weights {
        h.update(w.to_le_bytes());
    }
    for bytes in inputs {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Default)]
pub struct CacheStats {
    pub computed: AtomicUsize,
    pub skipped: AtomicUsize,
}

/// Brings one sample's cache entry up to date.
pub fn refresh_sample(
    out_dir: &Path,
    activation_root: &Path,
    sample_id: &str,
    class_id: &str,
    stage: usize,
    weights: &[f64],
    stats: &CacheStats,
) -> Result<()> {
    let mut inputs = Vec::with_capacity(STAGE_COUNT);
    for s in 1..=STAGE_COUNT {
        let path = activation_path(activation_root, sample_id, s);
        inputs.push(fs::read(&path).map_err(|e| Error::io(&path, e))?);
    }
    let print = fingerprint(sample_id, class_id, stage, weights, &inputs);
    let paths = CachePaths::new(out_dir, sample_id);
    if let Ok(text) = fs::read_to_string(&paths.record) {
        let fresh = toml::from_str::<FeatureRecord>(&text).is_ok_and(|r| r.fingerprint == print)
            && [&paths.feature, &paths.map, &paths.map_image].iter().all(|p| p.is_file());
        if fresh {
            stats.skipped.fetch_add(1, Ordering::Relaxed);
            return Ok(());
        }
    }

    let mut tensors = Vec::with_capacity(STAGE_COUNT);
    for (i, bytes) in inputs.iter().enumerate() {
        let path = activation_path(activation_root, sample_id, i + 1);
        tensors.push(read_tensor(bytes.as_slice()).map_err(|e| e.in_file(&path))?);
    }
    let tensors: [Tensor; STAGE_COUNT] = tensors.try_into().expect("five stages");
    let set = ActivationSet::new(sample_id, class_id, tensors)
        .map_err(|e| e.in_file(&activation_path(activation_root, sample_id, 1)))?;
    let feature = extract_feature(&set, stage)?;
    let map = combined_map(&set, weights)?;
    let source = feature.source().expect("extracted features carry a source").clone();

    // activations are f32, so the f32 feature tensor is lossless
    let values: Vec<f32> = feature.values().iter().map(|&v| v as f32).collect();
    let mut buf = Vec::new();
    write_tensor(&Tensor::new(vec![values.len()], values)?, &mut buf).expect("in-memory write");
    write_atomic(&paths.feature, &buf)?;
    buf.clear();
    write_tensor(&map.to_tensor(), &mut buf).expect("in-memory write");
    write_atomic(&paths.map, &buf)?;
    write_atomic(&paths.map_image, &map.to_image().to_pgm())?;
    let record = FeatureRecord {
        sample_id: sample_id.to_string(),
        class_id: class_id.to_string(),
        stage: source.stage,
        row: source.row,
        col: source.col,
        stage_shape: [source.stage_shape.0, source.stage_shape.1],
        fingerprint: print,
    };
    write_atomic(&paths.record, toml::to_string(&record).expect("record serializes").as_bytes())?;
    stats.computed.fetch_add(1, Ordering::Relaxed);
    Ok(())
}

/// Reads a cached feature, checking that it was produced for `stage`.
pub fn load_feature(out_dir: &Path, sample_id: &str, stage: usize) -> Result<FeatureVector> {
    let paths = CachePaths::new(out_dir, sample_id);
    let text = match fs::read_to_string(&paths.record) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            return Err(Error::Usage(format!(
                "no cached feature for sample {sample_id:?} in {}; run `features` first",
                out_dir.display()
            )))
        }
        Err(e) => return Err(Error::io(&paths.record, e)),
    };
    let record: FeatureRecord = toml::from_str(&text)
        .map_err(|e| Error::Schema(format!("{}: {}", paths.record.display(), e.message())))?;
    if record.stage != stage || record.sample_id != sample_id {
        return Err(Error::Usage(format!(
            "cached feature for {sample_id:?} is from stage {}, run asks for stage {stage}; rerun `features`",
            record.stage
        )));
    }
    let bytes = fs::read(&paths.feature).map_err(|e| Error::io(&paths.feature, e))?;
    let t = read_tensor(bytes.as_slice()).map_err(|e| e.in_file(&paths.feature))?;
    if t.shape().len() != 1 {
        return Err(Error::Validation(format!("{}: feature tensor must be 1-D", paths.feature.display())));
    }
    let values = t.data().iter().map(|&v| v as f64).collect();
    Ok(FeatureVector::with_source(
        values,
        FeatureSource {
            sample_id: record.sample_id,
            stage: record.stage,
            row: record.row,
            col: record.col,
            stage_shape: (record.stage_shape[0], record.stage_shape[1]),
        },
    ))
}
