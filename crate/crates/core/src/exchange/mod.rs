//! Data model shared by every other module: dense tensors with their `.txa`
//! binary encoding, per-image activation sets, and dataset manifests.

mod activation;
mod manifest;
mod tensor;

pub use activation::{activation_path, ActivationSet, STAGE_COUNT};
pub use manifest::{DatasetManifest, Role, SemClass, TextureClass};
pub use tensor::{
    read_tensor, read_tensor_file, write_tensor, write_tensor_file, Tensor, TXA_MAGIC, TXA_VERSION,
};
