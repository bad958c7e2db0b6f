use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{Read, Write};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{Category, GroupLabel, Message, MessageKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub group_id: String,
    pub category: Category,
    pub n_messages: usize,
    pub n_text: usize,
    pub n_media: usize,
    pub n_users: usize,
    pub reply_edges: usize,
    pub dangling_replies: usize,
    #[serde(with = "opt_time")]
    pub first: Option<DateTime<Utc>>,
    #[serde(with = "opt_time")]
    pub last: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub n_groups: usize,
    pub n_messages: usize,
    pub n_users: usize,
    pub reply_edges: usize,
    pub dangling_replies: usize,
    #[serde(with = "opt_time")]
    pub first: Option<DateTime<Utc>>,
    #[serde(with = "opt_time")]
    pub last: Option<DateTime<Utc>>,
    pub groups_by_category: BTreeMap<Category, usize>,
    /// Labels that name groups with no messages.
    pub unused_labels: Vec<String>,
    pub groups: Vec<GroupSummary>,
}

/// Checks corpus-level invariants and summarizes it.
///
/// Fails on duplicate message ids within a group, conflicting labels, and on
/// any group without a label (listing every unlabeled group).
pub fn validate_corpus(messages: &[Message], labels: &[GroupLabel]) -> Result<CorpusSummary> {
    let mut label_of: HashMap<&str, Category> = HashMap::new();
    for label in labels {
        if let Some(prev) = label_of.insert(&label.group_id, label.category) {
            if prev != label.category {
                return Err(Error::Validation(format!(
                    "group '{}' labeled both {} and {}",
                    label.group_id, prev, label.category
                )));
            }
        }
    }

    let mut by_group: BTreeMap<&str, Vec<&Message>> = BTreeMap::new();
    for m in messages {
        by_group.entry(&m.group_id).or_default().push(m);
    }

    let missing: Vec<&str> = by_group
        .keys()
        .copied()
        .filter(|g| !label_of.contains_key(g))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Validation(format!(
            "groups without a label: {}",
            missing.join(", ")
        )));
    }

    let mut groups = Vec::with_capacity(by_group.len());
    let mut all_users = HashSet::new();
    for (group_id, msgs) in &by_group {
        let mut keys: HashMap<&str, (DateTime<Utc>, u64)> = HashMap::with_capacity(msgs.len());
        for m in msgs {
            if keys.insert(&m.message_id, m.order_key()).is_some() {
                return Err(Error::Validation(format!(
                    "duplicate message_id '{}' in group '{}'",
                    m.message_id, group_id
                )));
            }
        }
        let mut reply_edges = 0;
        let mut dangling = 0;
        for m in msgs {
            if m.dangling_reply.is_some() {
                dangling += 1;
            }
            if let Some(target) = &m.reply_to {
                match keys.get(target.as_str()) {
                    Some(k) if *k < m.order_key() => reply_edges += 1,
                    _ => dangling += 1,
                }
            }
        }
        let users: HashSet<&str> = msgs.iter().map(|m| m.user_id.as_str()).collect();
        all_users.extend(users.iter().map(|u| (*group_id, *u)));
        let n_media = msgs.iter().filter(|m| m.kind == MessageKind::Media).count();
        groups.push(GroupSummary {
            group_id: group_id.to_string(),
            category: label_of[group_id],
            n_messages: msgs.len(),
            n_text: msgs.len() - n_media,
            n_media,
            n_users: users.len(),
            reply_edges,
            dangling_replies: dangling,
            first: msgs.iter().map(|m| m.timestamp).min(),
            last: msgs.iter().map(|m| m.timestamp).max(),
        });
    }

    let mut groups_by_category = BTreeMap::new();
    for g in &groups {
        *groups_by_category.entry(g.category).or_insert(0) += 1;
    }
    let distinct_users: HashSet<&str> = all_users.iter().map(|(_, u)| *u).collect();
    let mut unused_labels: Vec<String> = label_of
        .keys()
        .filter(|g| !by_group.contains_key(*g))
        .map(|g| g.to_string())
        .collect();
    unused_labels.sort();

    Ok(CorpusSummary {
        n_groups: groups.len(),
        n_messages: messages.len(),
        n_users: distinct_users.len(),
        reply_edges: groups.iter().map(|g| g.reply_edges).sum(),
        dangling_replies: groups.iter().map(|g| g.dangling_replies).sum(),
        first: groups.iter().filter_map(|g| g.first).min(),
        last: groups.iter().filter_map(|g| g.last).max(),
        groups_by_category,
        unused_labels,
        groups,
    })
}

/// Reads the `group_id,category` label file.
pub fn read_labels(reader: impl Read, source: &str) -> Result<Vec<GroupLabel>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for record in rdr.deserialize::<(String, String)>() {
        let line = match &record {
            Err(e) => e.position().map(|p| p.line()).unwrap_or(0),
            Ok(_) => 0,
        };
        let (group_id, category) =
            record.map_err(|e| Error::parse(format!("{}:{}", source, line), e))?;
        let category = category
            .parse()
            .map_err(|e: Error| Error::parse(format!("{}: group '{}'", source, group_id), e))?;
        out.push(GroupLabel { group_id, category });
    }
    Ok(out)
}

pub fn write_labels(writer: impl Write, labels: &[GroupLabel]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["group_id", "category"])?;
    for l in labels {
        wtr.write_record([l.group_id.as_str(), l.category.as_str()])?;
    }
    wtr.flush()?;
    Ok(())
}

mod opt_time {
    use chrono::{DateTime, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ts: &Option<DateTime<Utc>>, s: S) -> Result<S::Ok, S::Error> {
        match ts {
            Some(ts) => s.serialize_some(&crate::timefmt::format(ts)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<DateTime<Utc>>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|raw| {
                DateTime::parse_from_rfc3339(&raw)
                    .map(|t| t.with_timezone(&Utc))
                    .map_err(serde::de::Error::custom)
            })
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_log, LogFormat, ParseOptions};

    fn sample_thread() -> Vec<Message> {
        parse_log(
            include_str!("../../tests/data/sample_thread.jsonl").as_bytes(),
            LogFormat::Jsonl,
            ParseOptions::default(),
        )
        .unwrap()
        .0
    }

    fn label(g: &str, c: Category) -> GroupLabel {
        GroupLabel {
            group_id: g.into(),
            category: c,
        }
    }

    #[test]
    fn sample_thread_summary() {
        let s = validate_corpus(&sample_thread(), &[label("g1", Category::Political)]).unwrap();
        assert_eq!(s.n_groups, 1);
        assert_eq!(s.n_messages, 7);
        assert_eq!(s.dangling_replies, 0);
        assert_eq!(s.reply_edges, 3);
        assert_eq!(s.n_users, 5);
        assert_eq!(
            crate::timefmt::format(&s.first.unwrap()),
            "2018-10-07T15:30:00Z"
        );
    }

    #[test]
    fn empty_corpus() {
        let s = validate_corpus(&[], &[]).unwrap();
        assert_eq!((s.n_groups, s.n_messages, s.dangling_replies), (0, 0, 0));
        assert!(s.first.is_none());
    }

    #[test]
    fn duplicate_id_named() {
        let mut msgs = sample_thread();
        msgs[3].message_id = "M2".into();
        let err = validate_corpus(&msgs, &[label("g1", Category::Political)]).unwrap_err();
        assert!(err.to_string().contains("'M2'"), "{}", err);
    }

    #[test]
    fn missing_labels_listed() {
        let mut msgs = sample_thread();
        msgs[0].group_id = "g0".into();
        let err = validate_corpus(&msgs, &[]).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("g0") && text.contains("g1"), "{}", text);
    }

    #[test]
    fn labels_round_trip() {
        let labels = vec![
            label("a", Category::Political),
            label("b", Category::NonPolitical),
        ];
        let mut buf = Vec::new();
        write_labels(&mut buf, &labels).unwrap();
        assert_eq!(read_labels(&buf[..], "x").unwrap(), labels);
        assert!(read_labels(&b"group_id,category\na,other\n"[..], "x").is_err());
    }
}
