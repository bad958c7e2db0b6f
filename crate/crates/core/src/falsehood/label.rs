use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::matcher::{FalsehoodMatch, MatchStatus};
use crate::cascade::Cascade;
use crate::error::{Error, Result};
use crate::ingest::MessageIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FalsehoodLabel {
    Falsehood,
    Unclassified,
}

impl FalsehoodLabel {
    pub const ALL: [FalsehoodLabel; 2] = [FalsehoodLabel::Falsehood, FalsehoodLabel::Unclassified];

    pub fn as_str(self) -> &'static str {
        match self {
            FalsehoodLabel::Falsehood => "falsehood",
            FalsehoodLabel::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for FalsehoodLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FalsehoodLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "falsehood" => Ok(FalsehoodLabel::Falsehood),
            "unclassified" => Ok(FalsehoodLabel::Unclassified),
            other => Err(Error::Config(format!(
                "unknown falsehood label '{}'",
                other
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelOutcome {
    pub labels: BTreeMap<String, FalsehoodLabel>,
    pub n_falsehood: usize,
    /// Falsehood cascades whose root message itself has a confirmed match.
    pub n_root_matched: usize,
}

impl LabelOutcome {
    /// Share of falsehood cascades whose root carries the match; `None` when
    /// there are no falsehood cascades.
    pub fn root_matched_fraction(&self) -> Option<f64> {
        (self.n_falsehood > 0).then(|| self.n_root_matched as f64 / self.n_falsehood as f64)
    }
}

/// Marks a cascade `falsehood` when any of its messages has a confirmed
/// match, at any depth; everything else stays `unclassified`.
pub fn label_cascades(
    cascades: &[Cascade],
    matches: &[FalsehoodMatch],
    messages: &MessageIndex<'_>,
) -> Result<LabelOutcome> {
    let mut member: HashMap<(&str, &str), (usize, bool)> = HashMap::new();
    for (ci, c) in cascades.iter().enumerate() {
        for (ni, id) in c.nodes().iter().enumerate() {
            member.insert((c.group_id.as_str(), id.as_str()), (ci, ni == 0));
        }
    }
    let mut hit = vec![false; cascades.len()];
    let mut root_hit = vec![false; cascades.len()];
    for m in matches
        .iter()
        .filter(|m| m.status == MatchStatus::Confirmed)
    {
        if messages.get(&m.group_id, &m.message_id).is_none() {
            return Err(Error::Data(format!(
                "confirmed match names unknown message {} in group {}",
                m.message_id, m.group_id
            )));
        }
        if let Some(&(ci, is_root)) = member.get(&(m.group_id.as_str(), m.message_id.as_str())) {
            hit[ci] = true;
            root_hit[ci] |= is_root;
        }
    }
    let labels = cascades
        .iter()
        .zip(&hit)
        .map(|(c, &h)| {
            let label = if h {
                FalsehoodLabel::Falsehood
            } else {
                FalsehoodLabel::Unclassified
            };
            (c.cascade_id.clone(), label)
        })
        .collect();
    Ok(LabelOutcome {
        labels,
        n_falsehood: hit.iter().filter(|h| **h).count(),
        n_root_matched: root_hit.iter().filter(|h| **h).count(),
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct LabelRow {
    cascade_id: String,
    falsehood: FalsehoodLabel,
}

/// CSV `cascade_id,falsehood`.
pub fn write_falsehood_labels(
    writer: impl Write,
    labels: &BTreeMap<String, FalsehoodLabel>,
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["cascade_id", "falsehood"])?;
    for (id, label) in labels {
        wtr.write_record([id.as_str(), label.as_str()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_falsehood_labels(
    reader: impl Read,
    source: &str,
) -> Result<BTreeMap<String, FalsehoodLabel>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = BTreeMap::new();
    for (i, row) in rdr.deserialize::<LabelRow>().enumerate() {
        let locator = format!("{}:{}", source, i + 2);
        let row = row.map_err(|e| Error::parse(locator.clone(), e))?;
        if out.insert(row.cascade_id.clone(), row.falsehood).is_some() {
            return Err(Error::parse(
                locator,
                format!("duplicate cascade {}", row.cascade_id),
            ));
        }
    }
    Ok(out)
}
