use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::tensor::{read_tensor_file, write_tensor_file, Tensor};

pub const STAGE_COUNT: usize = 5;

/// Location of one stage tensor: `<root>/<sample_id>.z<stage>.txa`.
pub fn activation_path(root: &Path, sample_id: &str, stage: usize) -> PathBuf {
    root.join(format!("{sample_id}.z{stage}.txa"))
}

/// The five stage activations of one image, each shaped `channels × height × width`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationSet {
    sample_id: String,
    class_id: String,
    stages: [Tensor; STAGE_COUNT],
}

impl ActivationSet {
    pub fn new(
        sample_id: impl Into<String>,
        class_id: impl Into<String>,
        stages: [Tensor; STAGE_COUNT],
    ) -> Result<Self> {
        let sample_id = sample_id.into();
        let mut prev: Option<(usize, usize)> = None;
        for (i, t) in stages.iter().enumerate() {
            let &[_, h, w] = t.shape() else {
                return Err(Error::Validation(format!(
                    "{sample_id}: stage {} must be channels x height x width, got shape {:?}",
                    i + 1,
                    t.shape()
                )));
            };
            if let Some((ph, pw)) = prev {
                if h > ph || w > pw {
                    return Err(Error::Validation(format!(
                        "{sample_id}: stage {} spatial extent {h}x{w} exceeds stage {} ({ph}x{pw})",
                        i + 1,
                        i
                    )));
                }
            }
            prev = Some((h, w));
        }
        Ok(ActivationSet {
            sample_id,
            class_id: class_id.into(),
            stages,
        })
    }

    pub fn sample_id(&self) -> &str {
        &self.sample_id
    }

    pub fn class_id(&self) -> &str {
        &self.class_id
    }

    /// Stage tensor by 1-based index.
    pub fn stage(&self, stage: usize) -> Result<&Tensor> {
        if !(1..=STAGE_COUNT).contains(&stage) {
            return Err(Error::Usage(format!("stage {stage} outside 1..={STAGE_COUNT}")));
        }
        Ok(&self.stages[stage - 1])
    }

    pub fn stages(&self) -> &[Tensor; STAGE_COUNT] {
        &self.stages
    }

    pub fn load(root: &Path, sample_id: &str, class_id: &str) -> Result<Self> {
        let mut loaded = Vec::with_capacity(STAGE_COUNT);
        for stage in 1..=STAGE_COUNT {
            loaded.push(read_tensor_file(&activation_path(root, sample_id, stage))?);
        }
        let stages: [Tensor; STAGE_COUNT] = loaded.try_into().expect("five stages");
        Self::new(sample_id, class_id, stages)
    }

    pub fn save(&self, root: &Path) -> Result<()> {
        for (i, t) in self.stages.iter().enumerate() {
            let path = activation_path(root, &self.sample_id, i + 1);
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            write_tensor_file(t, &path)?;
        }
        Ok(())
    }
}
