pub mod commands;
pub mod correlation;
pub mod error;
pub mod exchange;
pub mod image;
pub mod metric;
pub mod pipeline;
pub mod saliency;
pub mod synth;

pub use error::{Error, Result};
