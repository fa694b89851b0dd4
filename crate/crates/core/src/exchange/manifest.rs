use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of the explanation a class belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// The model's own (hard to interpret) imagery, carrying target values.
    Target,
    /// The human-nameable comparison dataset.
    Interpretable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemClass {
    pub id: String,
    pub cps: f64,
    pub samples: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextureClass {
    pub id: String,
    pub samples: Vec<String>,
}

#[derive(Deserialize)]
struct RawSemClass {
    id: String,
    cps: Option<f64>,
    #[serde(default)]
    samples: Vec<String>,
}

#[derive(Deserialize)]
struct RawManifest {
    #[serde(default)]
    sem_classes: Vec<RawSemClass>,
    #[serde(default)]
    texture_classes: Vec<TextureClass>,
    preprocessing: Option<toml::Table>,
}

#[derive(Serialize)]
struct ManifestOut<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    preprocessing: Option<&'a toml::Table>,
    sem_classes: &'a [SemClass],
    texture_classes: &'a [TextureClass],
}

/// Validated, canonically ordered dataset declaration.
///
/// Classes are sorted by id and samples within each class by sample id, so
/// two manifests listing the same entries in different orders compare equal.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetManifest {
    sem_classes: Vec<SemClass>,
    texture_classes: Vec<TextureClass>,
    /// Exporter provenance (resize, crop, normalization constants); carried through untouched.
    preprocessing: Option<toml::Table>,
}

fn check_sample_id(id: &str) -> Result<()> {
    let bad = id.is_empty()
        || id.starts_with('/')
        || id.split('/').any(|part| part.is_empty() || part == "..");
    if bad {
        return Err(Error::Schema(format!("invalid sample id {id:?}")));
    }
    Ok(())
}

impl DatasetManifest {
    pub fn new(
        mut sem_classes: Vec<SemClass>,
        mut texture_classes: Vec<TextureClass>,
        preprocessing: Option<toml::Table>,
    ) -> Result<Self> {
        let mut class_ids = HashSet::new();
        let mut sample_ids = HashSet::new();
        let all = sem_classes
            .iter()
            .map(|c| (&c.id, &c.samples))
            .chain(texture_classes.iter().map(|c| (&c.id, &c.samples)));
        for (id, samples) in all {
            if id.is_empty() {
                return Err(Error::Schema("class with empty id".into()));
            }
            if !class_ids.insert(id.clone()) {
                return Err(Error::Schema(format!("duplicate class id {id:?}")));
            }
            if samples.is_empty() {
                return Err(Error::Schema(format!("class {id:?} has no samples")));
            }
            for s in samples {
                check_sample_id(s)?;
                if !sample_ids.insert(s.clone()) {
                    return Err(Error::Schema(format!("duplicate sample id {s:?}")));
                }
            }
        }
        for c in &sem_classes {
            if !c.cps.is_finite() {
                return Err(Error::Schema(format!("class {:?} has non-finite cps", c.id)));
            }
        }

        sem_classes.sort_by(|a, b| a.id.cmp(&b.id));
        texture_classes.sort_by(|a, b| a.id.cmp(&b.id));
        sem_classes.iter_mut().for_each(|c| c.samples.sort());
        texture_classes.iter_mut().for_each(|c| c.samples.sort());
        Ok(DatasetManifest {
            sem_classes,
            texture_classes,
            preprocessing,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawManifest =
            toml::from_str(text).map_err(|e| Error::Schema(format!("malformed manifest: {e}")))?;
        let sem = raw
            .sem_classes
            .into_iter()
            .map(|c| {
                let cps = c
                    .cps
                    .ok_or_else(|| Error::Schema(format!("SEM class {:?} is missing cps", c.id)))?;
                Ok(SemClass {
                    id: c.id,
                    cps,
                    samples: c.samples,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sem, raw.texture_classes, raw.preprocessing)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| e.in_file(path))
    }

    pub fn to_toml_string(&self) -> String {
        let out = ManifestOut {
            preprocessing: self.preprocessing.as_ref(),
            sem_classes: &self.sem_classes,
            texture_classes: &self.texture_classes,
        };
        toml::to_string(&out).expect("manifest serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml_string()).map_err(|e| Error::io(path, e))
    }

    /// Union of two manifests, e.g. a target-domain export and a texture export.
    pub fn merge(self, other: DatasetManifest) -> Result<Self> {
        let mut sem = self.sem_classes;
        sem.extend(other.sem_classes);
        let mut tex = self.texture_classes;
        tex.extend(other.texture_classes);
        let preprocessing = match (self.preprocessing, other.preprocessing) {
            (Some(mut a), Some(b)) => {
                a.extend(b);
                Some(a)
            }
            (a, b) => a.or(b),
        };
        Self::new(sem, tex, preprocessing)
    }

    pub fn sem_classes(&self) -> &[SemClass] {
        &self.sem_classes
    }

    pub fn texture_classes(&self) -> &[TextureClass] {
        &self.texture_classes
    }

    pub fn preprocessing(&self) -> Option<&toml::Table> {
        self.preprocessing.as_ref()
    }

    pub fn sample_count(&self) -> usize {
        self.sem_classes.iter().map(|c| c.samples.len()).sum::<usize>()
            + self.texture_classes.iter().map(|c| c.samples.len()).sum::<usize>()
    }

    /// Every `(sample_id, class_id, role)` in canonical order, target classes first.
    pub fn samples(&self) -> impl Iterator<Item = (&str, &str, Role)> {
        let sem = self.sem_classes.iter().flat_map(|c| {
            c.samples
                .iter()
                .map(move |s| (s.as_str(), c.id.as_str(), Role::Target))
        });
        let tex = self.texture_classes.iter().flat_map(|c| {
            c.samples
                .iter()
                .map(move |s| (s.as_str(), c.id.as_str(), Role::Interpretable))
        });
        sem.chain(tex)
    }

    pub fn find_sample(&self, sample_id: &str) -> Option<(&str, Role)> {
        self.samples()
            .find(|(s, _, _)| *s == sample_id)
            .map(|(_, c, r)| (c, r))
    }

    pub fn sem_class(&self, id: &str) -> Option<&SemClass> {
        self.sem_classes.iter().find(|c| c.id == id)
    }

    pub fn texture_class(&self, id: &str) -> Option<&TextureClass> {
        self.texture_classes.iter().find(|c| c.id == id)
    }
}
