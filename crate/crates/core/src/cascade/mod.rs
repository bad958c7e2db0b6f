//! Reply-tree (cascade) extraction.
//!
//! Each group is a DAG whose nodes are messages and whose edges point from a
//! message to its replies. Every message has at most one parent and parents
//! precede children, so every connected component is a tree; components with
//! at least two messages are cascades. No time window is imposed.

mod allen;

use std::collections::{BTreeMap, HashMap, VecDeque};

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Message;

pub use allen::{count_disjoint_pairs, relate, AllenRelation};

/// A rooted reply tree within one group.
///
/// Nodes are stored in breadth-first order (root first, siblings in posting
/// order) with parent links and depths held as indices into that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cascade {
    pub cascade_id: String,
    pub group_id: String,
    nodes: Vec<String>,
    parents: Vec<Option<usize>>,
    depths: Vec<u32>,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl Cascade {
    pub fn make_id(group_id: &str, root: &str) -> String {
        format!("{}:{}", group_id, root)
    }

    pub fn root(&self) -> &str {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Message ids in breadth-first order.
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn parent_index(&self, idx: usize) -> Option<usize> {
        self.parents[idx]
    }

    pub fn parent_indices(&self) -> &[Option<usize>] {
        &self.parents
    }

    pub fn depths(&self) -> &[u32] {
        &self.depths
    }

    pub fn parent_of(&self, message_id: &str) -> Option<&str> {
        let idx = self.nodes.iter().position(|n| n == message_id)?;
        self.parents[idx].map(|p| self.nodes[p].as_str())
    }

    /// Reply edges as (child, parent) index pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parents
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (c, p)))
    }

    /// Maximum depth reached by any message.
    pub fn depth(&self) -> u32 {
        // breadth-first order: the last node is among the deepest
        *self.depths.last().expect("cascade has nodes")
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.nodes.len()];
        for (c, p) in self.edges() {
            children[p].push(c);
        }
        children
    }

    pub fn to_record(&self) -> CascadeRecord {
        CascadeRecord {
            cascade_id: self.cascade_id.clone(),
            group_id: self.group_id.clone(),
            root: self.root().to_string(),
            nodes: self.nodes.clone(),
            parent: self
                .edges()
                .map(|(c, p)| (self.nodes[c].clone(), self.nodes[p].clone()))
                .collect(),
            depth: self
                .nodes
                .iter()
                .cloned()
                .zip(self.depths.iter().copied())
                .collect(),
            start: self.start,
            end: self.end,
        }
    }

    /// Rebuilds a cascade from its interchange form, checking the tree invariants.
    pub fn from_record(record: CascadeRecord) -> Result<Self> {
        let bad = |msg: String| Error::Data(format!("cascade '{}': {}", record.cascade_id, msg));
        if record.nodes.len() < 2 {
            return Err(bad("fewer than two nodes".into()));
        }
        if record.nodes[0] != record.root {
            return Err(bad("first node is not the root".into()));
        }
        if record.parent.len() != record.nodes.len() - 1 {
            return Err(bad(format!(
                "{} parent links for {} nodes",
                record.parent.len(),
                record.nodes.len()
            )));
        }
        let index: HashMap<&str, usize> = record
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        if index.len() != record.nodes.len() {
            return Err(bad("duplicate node".into()));
        }
        let mut parents = vec![None; record.nodes.len()];
        for (child, parent) in &record.parent {
            let c = *index
                .get(child.as_str())
                .ok_or_else(|| bad(format!("unknown child '{}'", child)))?;
            let p = *index
                .get(parent.as_str())
                .ok_or_else(|| bad(format!("unknown parent '{}'", parent)))?;
            if c == 0 {
                return Err(bad("root has a parent".into()));
            }
            parents[c] = Some(p);
        }
        let mut depths = vec![0u32; record.nodes.len()];
        for i in 1..record.nodes.len() {
            let p =
                parents[i].ok_or_else(|| bad(format!("node '{}' unlinked", record.nodes[i])))?;
            // breadth-first order puts parents first, which also rules out cycles
            if p >= i {
                return Err(bad(format!(
                    "node '{}' listed before its parent",
                    record.nodes[i]
                )));
            }
            depths[i] = depths[p] + 1;
            if i > 0 && depths[i] < depths[i - 1] {
                return Err(bad("nodes not in breadth-first order".into()));
            }
        }
        for (i, node) in record.nodes.iter().enumerate() {
            if record.depth.get(node) != Some(&depths[i]) {
                return Err(bad(format!("stored depth of '{}' is inconsistent", node)));
            }
        }
        if record.end < record.start {
            return Err(bad("end precedes start".into()));
        }
        Ok(Cascade {
            cascade_id: record.cascade_id,
            group_id: record.group_id,
            nodes: record.nodes,
            parents,
            depths,
            start: record.start,
            end: record.end,
        })
    }
}

/// JSONL interchange form of a cascade.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeRecord {
    pub cascade_id: String,
    pub group_id: String,
    pub root: String,
    pub nodes: Vec<String>,
    /// child -> parent
    pub parent: BTreeMap<String, String>,
    pub depth: BTreeMap<String, u32>,
    #[serde(with = "crate::timefmt")]
    pub start: DateTime<Utc>,
    #[serde(with = "crate::timefmt")]
    pub end: DateTime<Utc>,
}

impl Serialize for Cascade {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Cascade {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let record = CascadeRecord::deserialize(deserializer)?;
        Cascade::from_record(record).map_err(serde::de::Error::custom)
    }
}

/// Extracts the cascades of a single group.
///
/// Output is ordered by root posting order and does not depend on the order
/// of `messages`.
pub fn build_cascades(messages: &[Message]) -> Result<Vec<Cascade>> {
    let Some(first) = messages.first() else {
        return Ok(Vec::new());
    };
    let group_id = first.group_id.as_str();
    let mut index: HashMap<&str, usize> = HashMap::with_capacity(messages.len());
    for (i, m) in messages.iter().enumerate() {
        if m.group_id != group_id {
            return Err(Error::Data(format!(
                "build_cascades got messages of groups '{}' and '{}'",
                group_id, m.group_id
            )));
        }
        if index.insert(&m.message_id, i).is_some() {
            return Err(Error::Validation(format!(
                "duplicate message_id '{}' in group '{}'",
                m.message_id, group_id
            )));
        }
    }

    let mut children: Vec<Vec<usize>> = vec![Vec::new(); messages.len()];
    let mut has_parent = vec![false; messages.len()];
    for (i, m) in messages.iter().enumerate() {
        let Some(target) = &m.reply_to else { continue };
        let p = *index.get(target.as_str()).ok_or_else(|| {
            Error::Invariant(format!(
                "message '{}' in group '{}' replies to unknown '{}'",
                m.message_id, group_id, target
            ))
        })?;
        if messages[p].order_key() >= m.order_key() {
            return Err(Error::Invariant(format!(
                "message '{}' in group '{}' replies to later message '{}'",
                m.message_id, group_id, target
            )));
        }
        children[p].push(i);
        has_parent[i] = true;
    }
    for list in &mut children {
        list.sort_by_key(|&c| messages[c].order_key());
    }

    let mut roots: Vec<usize> = (0..messages.len())
        .filter(|&i| !has_parent[i] && !children[i].is_empty())
        .collect();
    roots.sort_by_key(|&r| messages[r].order_key());

    let mut cascades = Vec::with_capacity(roots.len());
    let mut queue = VecDeque::new();
    for root in roots {
        let mut nodes = Vec::new();
        let mut parents = Vec::new();
        let mut depths = Vec::new();
        let mut end = messages[root].timestamp;
        queue.push_back((root, None, 0u32));
        while let Some((msg, parent, depth)) = queue.pop_front() {
            let local = nodes.len();
            nodes.push(messages[msg].message_id.clone());
            parents.push(parent);
            depths.push(depth);
            end = end.max(messages[msg].timestamp);
            for &c in &children[msg] {
                queue.push_back((c, Some(local), depth + 1));
            }
        }
        let root_msg = &messages[root];
        cascades.push(Cascade {
            cascade_id: Cascade::make_id(group_id, &root_msg.message_id),
            group_id: group_id.to_string(),
            nodes,
            parents,
            depths,
            start: root_msg.timestamp,
            end,
        });
    }
    Ok(cascades)
}

/// Extracts cascades from a multi-group corpus, groups in parallel.
///
/// Groups appear in lexicographic order of `group_id`.
pub fn build_all(messages: &[Message]) -> Result<Vec<Cascade>> {
    let mut by_group: BTreeMap<&str, Vec<Message>> = BTreeMap::new();
    for m in messages {
        by_group.entry(&m.group_id).or_default().push(m.clone());
    }
    let per_group: Vec<Result<Vec<Cascade>>> = by_group
        .into_par_iter()
        .map(|(_, msgs)| build_cascades(&msgs))
        .collect();
    let mut out = Vec::new();
    for r in per_group {
        out.extend(r?);
    }
    Ok(out)
}

/// Depth of the cascade (maximum depth over its messages).
pub fn depth(c: &Cascade) -> u32 {
    c.depth()
}

/// Allen relation between the lifetimes `[start, end]` of two cascades.
pub fn overlap_relation(a: &Cascade, b: &Cascade) -> AllenRelation {
    relate(a.start, a.end, b.start, b.end)
}

pub fn disjoint(a: &Cascade, b: &Cascade) -> bool {
    overlap_relation(a, b).is_disjoint()
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

    #[test]
    fn sample_thread_single_cascade() {
        let cascades = build_cascades(&sample_thread()).unwrap();
        assert_eq!(cascades.len(), 1);
        let c = &cascades[0];
        assert_eq!(c.cascade_id, "g1:M2");
        assert_eq!(c.root(), "M2");
        let mut nodes = c.nodes().to_vec();
        nodes.sort();
        assert_eq!(nodes, ["M2", "M3", "M5", "M7"]);
        assert_eq!(c.depth(), 2);
        assert_eq!(c.parent_of("M5"), Some("M3"));
        assert_eq!(c.parent_of("M7"), Some("M2"));
        assert_eq!(crate::timefmt::format(&c.start), "2018-10-07T15:35:00Z");
        assert_eq!(crate::timefmt::format(&c.end), "2018-10-07T15:50:00Z");
    }

    #[test]
    fn no_edges_no_cascades() {
        let mut msgs = sample_thread();
        for m in &mut msgs {
            m.reply_to = None;
        }
        assert!(build_cascades(&msgs).unwrap().is_empty());
        assert!(build_cascades(&[]).unwrap().is_empty());
    }

    #[test]
    fn two_node_cascade_depth() {
        let msgs = sample_thread();
        let pair: Vec<_> = msgs
            .iter()
            .filter(|m| m.message_id == "M2" || m.message_id == "M7")
            .cloned()
            .collect();
        let c = build_cascades(&pair).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(depth(&c[0]), 1);
    }

    #[test]
    fn permutation_invariant() {
        let msgs = sample_thread();
        let mut rev = msgs.clone();
        rev.reverse();
        assert_eq!(
            build_cascades(&msgs).unwrap(),
            build_cascades(&rev).unwrap()
        );
    }

    #[test]
    fn time_order_violation_is_invariant_error() {
        let mut msgs = sample_thread();
        msgs[1].reply_to = Some("M7".into());
        assert!(matches!(build_cascades(&msgs), Err(Error::Invariant(_))));
    }

    #[test]
    fn record_round_trip_and_validation() {
        let c = build_cascades(&sample_thread()).unwrap().remove(0);
        let json = serde_json::to_string(&c).unwrap();
        let back: Cascade = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);

        let mut rec = c.to_record();
        rec.depth.insert("M5".into(), 7);
        assert!(Cascade::from_record(rec).is_err());

        let mut rec = c.to_record();
        rec.parent.insert("M3".into(), "M5".into());
        assert!(Cascade::from_record(rec).is_err());
    }

    #[test]
    fn overlap_of_cascades() {
        let c = build_cascades(&sample_thread()).unwrap().remove(0);
        assert_eq!(overlap_relation(&c, &c), AllenRelation::Equals);
        assert!(!disjoint(&c, &c));
    }
}
