//! File-based stages and the manifest that tracks their inputs and outputs.

mod manifest;
mod stages;

pub use manifest::{sha256_file, FileDigest, PipelineManifest, StageEntry, MANIFEST_FILE};
pub use stages::*;
