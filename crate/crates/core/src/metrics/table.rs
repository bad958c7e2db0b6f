use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::CascadeMetrics;
use crate::error::{Error, Result};
use crate::falsehood::FalsehoodLabel;
use crate::ingest::Category;

/// One row of the metrics table. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub cascade_id: String,
    pub group_id: String,
    pub category: Category,
    pub falsehood: FalsehoodLabel,
    pub n_nodes: usize,
    pub depth: u32,
    pub max_breadth: usize,
    pub structural_virality: f64,
    pub duration_minutes: f64,
    pub n_unique_users: usize,
}

impl MetricsRow {
    pub fn new(m: &CascadeMetrics, category: Category, falsehood: FalsehoodLabel) -> Self {
        Self {
            cascade_id: m.cascade_id.clone(),
            group_id: m.group_id.clone(),
            category,
            falsehood,
            n_nodes: m.n_nodes,
            depth: m.depth,
            max_breadth: m.max_breadth,
            structural_virality: m.structural_virality,
            duration_minutes: m.duration_minutes,
            n_unique_users: m.n_unique_users,
        }
    }
}

pub const METRICS_COLUMNS: [&str; 10] = [
    "cascade_id",
    "group_id",
    "category",
    "falsehood",
    "n_nodes",
    "depth",
    "max_breadth",
    "structural_virality",
    "duration_minutes",
    "n_unique_users",
];

pub fn write_metrics_table(writer: impl Write, rows: &[MetricsRow]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    wtr.write_record(METRICS_COLUMNS)?;
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_metrics_table(reader: impl Read, source: &str) -> Result<Vec<MetricsRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(METRICS_COLUMNS.iter().copied()) {
        return Err(Error::parse(
            format!("{}:1", source),
            format!(
                "unexpected metrics header '{}'",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut rows = Vec::new();
    for record in rdr.deserialize() {
        let row: MetricsRow = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::parse(format!("{}:{}", source, line), e)
        })?;
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_round_trip() {
        let row = MetricsRow {
            cascade_id: "g1:M2".into(),
            group_id: "g1".into(),
            category: Category::Political,
            falsehood: FalsehoodLabel::Unclassified,
            n_nodes: 4,
            depth: 2,
            max_breadth: 2,
            structural_virality: 10.0 / 6.0,
            duration_minutes: 15.0,
            n_unique_users: 3,
        };
        let mut buf = Vec::new();
        write_metrics_table(&mut buf, std::slice::from_ref(&row)).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "cascade_id,group_id,category,falsehood,n_nodes,depth,max_breadth,structural_virality,duration_minutes,n_unique_users"
        );
        assert!(text.contains("g1:M2,g1,political,unclassified,4,2,2,"));
        assert_eq!(read_metrics_table(&buf[..], "m.csv").unwrap(), vec![row]);
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(read_metrics_table(&b"a,b\n1,2\n"[..], "m.csv").is_err());
    }
}
