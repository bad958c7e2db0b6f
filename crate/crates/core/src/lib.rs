//! Reconstruction and measurement of reply cascades in group-chat logs.
//!
//! Stages: [`ingest`] parses message logs, [`cascade`] rebuilds reply trees,
//! [`metrics`] and [`motifs`] measure them, [`falsehood`] labels cascades by
//! similarity to fact-checked stories, and [`report`] aggregates everything
//! into tables and plots. [`synth`] generates corpora with known answers.

pub mod cascade;
pub mod error;
pub mod falsehood;
pub mod ingest;
pub mod io;
pub mod metrics;
pub mod motifs;
pub mod pipeline;
pub mod report;
pub mod synth;
pub mod timefmt;

pub use error::{Error, Result};
