//! Corpus-level views: class-segmented CCDFs, normalized profiles, cascade
//! counts over time, temporal overlap, motif frequencies and figures.

mod ccdf;
mod class;
mod emit;
mod overlap;
mod series;
mod svg;

pub use ccdf::{ccdf, CcdfPoint};
pub use class::{CascadeClass, Segment};
pub use emit::{emit_report, OverlapSummary, ReportInput, ReportOptions, ReportSummary};
pub use overlap::{overlap_stats, OverlapCounts, OverlapStats};
pub use series::{daily_counts, Bucket, CountSeries};
pub use svg::{BarChart, LinePlot, PlotSeries};
