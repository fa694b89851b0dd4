use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::correlation::SignConvention;
use crate::error::{Error, Result};
use crate::exchange::STAGE_COUNT;
use crate::saliency::UNIFORM_WEIGHTS;
use crate::synth::TextureKind;

/// Settings shared by every subcommand, read from a TOML file and overridable
/// from the command line. Relative paths in a file resolve against the file's
/// directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub manifest: Option<PathBuf>,
    /// Defaults to `activations/` next to the manifest.
    pub activation_root: Option<PathBuf>,
    /// Defaults to `images/` next to the manifest. Only referenced, never read.
    pub image_root: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub stage: usize,
    pub k: usize,
    pub weights: Vec<f64>,
    pub sign: SignConvention,
    pub seed: u64,
    pub synth: SynthConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            manifest: None,
            activation_root: None,
            image_root: None,
            out_dir: PathBuf::from("texplain-out"),
            stage: 5,
            k: 9,
            weights: UNIFORM_WEIGHTS.to_vec(),
            sign: SignConvention::Similarity,
            seed: 0,
            synth: SynthConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Classes spread evenly along the planted strength axis.
    Planted,
    /// Two clusters of classes at low and high strength.
    TwoRegimes,
}

/// Parameters of the `synth` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub scenario: Scenario,
    pub classes: usize,
    pub samples_per_class: usize,
    pub texture_samples: usize,
    pub size: usize,
    pub positive: Vec<String>,
    pub negative: Vec<String>,
    pub neutral: Vec<String>,
    /// Interpretable texture classes to generate.
    pub textures: Vec<String>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        let names = |k: &[TextureKind]| k.iter().map(|k| k.name().to_string()).collect();
        SynthConfig {
            scenario: Scenario::Planted,
            classes: 8,
            samples_per_class: 40,
            texture_samples: 20,
            size: 128,
            positive: names(&[TextureKind::Dotted, TextureKind::Checkered]),
            negative: names(&[TextureKind::Blotchy, TextureKind::Constant]),
            neutral: names(&[TextureKind::Striped, TextureKind::Noise]),
            textures: names(&TextureKind::ALL),
        }
    }
}

fn kinds(names: &[String]) -> Result<Vec<TextureKind>> {
    names.iter().map(|n| n.parse()).collect()
}

impl SynthConfig {
    pub fn positive_kinds(&self) -> Result<Vec<TextureKind>> {
        kinds(&self.positive)
    }

    pub fn negative_kinds(&self) -> Result<Vec<TextureKind>> {
        kinds(&self.negative)
    }

    pub fn neutral_kinds(&self) -> Result<Vec<TextureKind>> {
        kinds(&self.neutral)
    }

    pub fn texture_kinds(&self) -> Result<Vec<TextureKind>> {
        kinds(&self.textures)
    }
}

fn rebase(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl RunConfig {
    /// Parses TOML; relative paths are joined onto `base`.
    pub fn from_toml_str(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        for p in [&mut cfg.manifest, &mut cfg.activation_root, &mut cfg.image_root]
            .into_iter()
            .flatten()
        {
            rebase(base, p);
        }
        rebase(base, &mut cfg.out_dir);
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, base).map_err(|e| e.in_file(path))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn manifest_path(&self) -> Result<&Path> {
        self.manifest
            .as_deref()
            .ok_or_else(|| Error::Config("no manifest given (set `manifest` or pass --manifest)".into()))
    }

    fn beside_manifest(&self, dir: &str) -> Result<PathBuf> {
        let m = self.manifest_path()?;
        Ok(m.parent().unwrap_or(Path::new(".")).join(dir))
    }

    pub fn activation_root(&self) -> Result<PathBuf> {
        match &self.activation_root {
            Some(p) => Ok(p.clone()),
            None => self.beside_manifest("activations"),
        }
    }

    pub fn image_root(&self) -> Result<PathBuf> {
        match &self.image_root {
            Some(p) => Ok(p.clone()),
            None => self.beside_manifest("images"),
        }
    }

    /// Checks the numeric settings only.
    pub fn validate_settings(&self) -> Result<()> {
        if !(1..=STAGE_COUNT).contains(&self.stage) {
            return Err(Error::Config(format!("stage {} outside 1..={STAGE_COUNT}", self.stage)));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.weights.len() != STAGE_COUNT {
            return Err(Error::Config(format!(
                "weights needs {STAGE_COUNT} entries, got {}",
                self.weights.len()
            )));
        }
        let sum: f64 = self.weights.iter().sum();
        if self.weights.iter().any(|w| !(*w >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "weights must be non-negative and sum to 1, got {:?}",
                self.weights
            )));
        }
        Ok(())
    }

    /// Settings plus the input paths, which must exist.
    pub fn validate(&self) -> Result<()> {
        self.validate_settings()?;
        let manifest = self.manifest_path()?;
        if !manifest.is_file() {
            return Err(Error::Config(format!("manifest {} does not exist", manifest.display())));
        }
        let root = self.activation_root()?;
        if !root.is_dir() {
            return Err(Error::Config(format!("activation root {} does not exist", root.display())));
        }
        Ok(())
    }
}
