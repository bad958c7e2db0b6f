//! Synthetic corpora with known answers, for tests and benchmarks.

mod config;
mod generate;
pub mod oracle;

pub use config::{CountDist, DelayDist, SynthConfig};
pub use generate::{generate, PlantedMatch, SynthCorpus, SynthMessage};
pub use oracle::{ground_truth, SynthTruth, TruthCascade};
