//! Who-replied-to-whom graphs and the six communication motifs.

mod detect;
mod freq;
mod graph;
mod templates;
mod vf2;

use std::io::{Read, Write};

use crate::error::{Error, Result};

pub use detect::{
    detect_generic_in, detect_in, detect_motifs, detect_motifs_generic, subgraph_mode,
    DetectOptions, MotifReport, Presence, SubgraphSemantics,
};
pub use freq::{motif_frequencies, MotifFrequencies};
pub use graph::{user_graph, DiGraph, UserGraph};
pub use templates::{motif_template, Motif};
pub use vf2::{find_mapping, is_match, MatchMode};

pub const MOTIF_COLUMNS: [&str; 7] = [
    "cascade_id",
    "self_loop",
    "dyadic",
    "chain",
    "loop",
    "outgoing_star",
    "incoming_star",
];

pub fn write_motif_reports(writer: impl Write, reports: &[MotifReport]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(MOTIF_COLUMNS)?;
    for r in reports {
        let mut record = vec![r.cascade_id.as_str()];
        record.extend(r.presence().iter().map(|p| p.as_str()));
        wtr.write_record(&record)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_motif_reports(reader: impl Read, source: &str) -> Result<Vec<MotifReport>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(MOTIF_COLUMNS.iter().copied()) {
        return Err(Error::parse(
            format!("{}:1", source),
            "unexpected motif report header",
        ));
    }
    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let locator = format!("{}:{}", source, i + 2);
        if record.len() != MOTIF_COLUMNS.len() {
            return Err(Error::parse(locator, "wrong number of fields"));
        }
        let mut presence = [Presence::Absent; 6];
        for (slot, field) in presence.iter_mut().zip(record.iter().skip(1)) {
            *slot = field
                .parse()
                .map_err(|e: Error| Error::parse(locator.clone(), e))?;
        }
        out.push(MotifReport::new(&record[0], presence));
    }
    Ok(out)
}
