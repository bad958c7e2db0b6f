//! Structural and temporal attributes of individual cascades.

mod profile;
mod table;

use std::collections::{BTreeMap, HashSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::cascade::Cascade;
use crate::error::{Error, Result};
use crate::ingest::MessageIndex;

pub use profile::{normalized_profile, ProfileAccumulator, ProfileBin, ProfileX, ProfileY, N_BINS};
pub use table::{read_metrics_table, write_metrics_table, MetricsRow};

/// One message's arrival, relative to the cascade root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arrival {
    pub minutes: f64,
    pub depth: u32,
    /// First message of its author within the cascade.
    pub new_user: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeMetrics {
    pub cascade_id: String,
    pub group_id: String,
    #[serde(with = "crate::timefmt")]
    pub start: DateTime<Utc>,
    pub n_nodes: usize,
    pub depth: u32,
    pub max_breadth: usize,
    pub breadth_at: BTreeMap<u32, usize>,
    pub structural_virality: f64,
    pub duration_minutes: f64,
    pub n_unique_users: usize,
    /// Distinct users seen at depths `<= d`.
    pub users_by_depth: BTreeMap<u32, usize>,
    /// Distinct users among the messages at exactly depth `d`.
    pub users_at_depth: BTreeMap<u32, usize>,
    /// Minutes from the root to the first message reaching depth `d`.
    pub time_to_depth: BTreeMap<u32, f64>,
    /// Messages in posting order.
    pub arrivals: Vec<Arrival>,
}

/// Number of messages at each depth level.
pub fn breadth_profile(c: &Cascade) -> BTreeMap<u32, usize> {
    let mut out = BTreeMap::new();
    for &d in c.depths() {
        *out.entry(d).or_insert(0) += 1;
    }
    out
}

pub fn max_breadth(c: &Cascade) -> usize {
    breadth_profile(c).values().copied().max().unwrap_or(0)
}

/// Wiener index of the undirected reply tree: the sum of distances over all
/// unordered node pairs. Each edge contributes `size * (n - size)` where
/// `size` is the node count of the subtree below it.
pub fn wiener_index(c: &Cascade) -> u64 {
    let n = c.len() as u64;
    let mut size = vec![1u64; c.len()];
    let mut total = 0u64;
    // breadth-first order: children always follow their parent
    for idx in (1..c.len()).rev() {
        let s = size[idx];
        total += s * (n - s);
        let p = c.parent_index(idx).expect("non-root has a parent");
        size[p] += s;
    }
    total
}

/// Mean shortest-path distance over all unordered node pairs.
pub fn structural_virality(c: &Cascade) -> Result<f64> {
    let n = c.len() as u64;
    if n < 2 {
        return Err(Error::Domain(format!(
            "structural virality needs at least two nodes, cascade '{}' has {}",
            c.cascade_id, n
        )));
    }
    Ok((2 * wiener_index(c)) as f64 / (n * (n - 1)) as f64)
}

pub fn minutes_between(from: DateTime<Utc>, to: DateTime<Utc>) -> f64 {
    (to - from).num_milliseconds() as f64 / 60_000.0
}

/// Minutes between the root and the last message.
pub fn duration(c: &Cascade) -> f64 {
    minutes_between(c.start, c.end)
}

/// Computes every per-cascade attribute. Messages supply authors and timestamps.
pub fn compute_metrics(c: &Cascade, messages: &MessageIndex<'_>) -> Result<CascadeMetrics> {
    let msgs = c
        .nodes()
        .iter()
        .map(|id| messages.require(&c.group_id, id))
        .collect::<Result<Vec<_>>>()?;

    let breadth_at = breadth_profile(c);
    let depth = c.depth();

    let mut users_at: BTreeMap<u32, HashSet<&str>> = BTreeMap::new();
    for (m, &d) in msgs.iter().zip(c.depths()) {
        users_at.entry(d).or_default().insert(m.user_id.as_str());
    }
    let mut seen = HashSet::new();
    let mut users_by_depth = BTreeMap::new();
    let mut users_at_depth = BTreeMap::new();
    for (&d, users) in &users_at {
        users_at_depth.insert(d, users.len());
        seen.extend(users.iter().copied());
        users_by_depth.insert(d, seen.len());
    }

    let mut order: Vec<usize> = (0..msgs.len()).collect();
    order.sort_by_key(|&i| msgs[i].order_key());
    let mut time_to_depth: BTreeMap<u32, f64> = BTreeMap::new();
    let mut arrivals = Vec::with_capacity(msgs.len());
    let mut authors = HashSet::new();
    for &i in &order {
        let minutes = minutes_between(c.start, msgs[i].timestamp);
        let d = c.depths()[i];
        // ancestors are posted first, so first arrivals are non-decreasing in depth
        time_to_depth.entry(d).or_insert(minutes);
        arrivals.push(Arrival {
            minutes,
            depth: d,
            new_user: authors.insert(msgs[i].user_id.as_str()),
        });
    }

    Ok(CascadeMetrics {
        cascade_id: c.cascade_id.clone(),
        group_id: c.group_id.clone(),
        start: c.start,
        n_nodes: c.len(),
        depth,
        max_breadth: breadth_at.values().copied().max().unwrap_or(0),
        breadth_at,
        structural_virality: structural_virality(c)?,
        duration_minutes: duration(c),
        n_unique_users: seen.len(),
        users_by_depth,
        users_at_depth,
        time_to_depth,
        arrivals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::{build_cascades, CascadeRecord};
    use crate::ingest::{parse_log, LogFormat, Message, ParseOptions};
    use std::collections::VecDeque;

    fn sample_thread() -> (Vec<Message>, Cascade) {
        let msgs = parse_log(
            include_str!("../../tests/data/sample_thread.jsonl").as_bytes(),
            LogFormat::Jsonl,
            ParseOptions::default(),
        )
        .unwrap()
        .0;
        let c = build_cascades(&msgs).unwrap().remove(0);
        (msgs, c)
    }

    /// Builds a cascade from a parent array (parent[0] = None), ids "n{i}".
    fn tree(parents: &[Option<usize>]) -> Cascade {
        let mut depth = vec![0u32; parents.len()];
        for i in 1..parents.len() {
            depth[i] = depth[parents[i].unwrap()] + 1;
        }
        let mut order: Vec<usize> = (0..parents.len()).collect();
        order.sort_by_key(|&i| (depth[i], i));
        let ts = chrono::DateTime::parse_from_rfc3339("2020-01-01T00:00:00Z")
            .unwrap()
            .with_timezone(&Utc);
        let record = CascadeRecord {
            cascade_id: "t".into(),
            group_id: "g".into(),
            root: "n0".into(),
            nodes: order.iter().map(|i| format!("n{}", i)).collect(),
            parent: (1..parents.len())
                .map(|i| (format!("n{}", i), format!("n{}", parents[i].unwrap())))
                .collect(),
            depth: (0..parents.len())
                .map(|i| (format!("n{}", i), depth[i]))
                .collect(),
            start: ts,
            end: ts,
        };
        Cascade::from_record(record).unwrap()
    }

    fn all_pairs_mean(c: &Cascade) -> f64 {
        let n = c.len();
        let mut adj = vec![Vec::new(); n];
        for (a, b) in c.edges() {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut total = 0u64;
        for s in 0..n {
            let mut dist = vec![u64::MAX; n];
            dist[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &v in &adj[u] {
                    if dist[v] == u64::MAX {
                        dist[v] = dist[u] + 1;
                        q.push_back(v);
                    }
                }
            }
            total += dist.iter().sum::<u64>();
        }
        total as f64 / (n * (n - 1)) as f64
    }

    #[test]
    fn sample_thread_attributes() {
        let (msgs, c) = sample_thread();
        let m = compute_metrics(&c, &MessageIndex::new(&msgs)).unwrap();
        assert_eq!(m.n_nodes, 4);
        assert_eq!(m.depth, 2);
        assert_eq!(m.breadth_at, BTreeMap::from([(0, 1), (1, 2), (2, 1)]));
        assert_eq!(m.max_breadth, 2);
        assert_eq!(m.duration_minutes, 15.0);
        assert_eq!(m.n_unique_users, 3);
        assert_eq!(m.users_by_depth, BTreeMap::from([(0, 1), (1, 2), (2, 3)]));
        assert_eq!(m.users_at_depth, BTreeMap::from([(0, 1), (1, 2), (2, 1)]));
        assert_eq!(
            m.time_to_depth,
            BTreeMap::from([(0, 0.0), (1, 3.0), (2, 7.0)])
        );
        // pair distances 1,2,1,1,2,3 -> 10/6
        assert!((m.structural_virality - 10.0 / 6.0).abs() < 1e-12);
        assert_eq!(wiener_index(&c), 10);
    }

    #[test]
    fn two_node_cascade() {
        let c = tree(&[None, Some(0)]);
        assert_eq!(breadth_profile(&c), BTreeMap::from([(0, 1), (1, 1)]));
        assert_eq!(structural_virality(&c).unwrap(), 1.0);
    }

    #[test]
    fn path_virality_matches_all_pairs() {
        for k in 2..40usize {
            let parents: Vec<_> = (0..k).map(|i| i.checked_sub(1)).collect();
            let c = tree(&parents);
            let sv = structural_virality(&c).unwrap();
            assert!((sv - all_pairs_mean(&c)).abs() < 1e-12);
            assert!((sv - (k as f64 + 1.0) / 3.0).abs() < 1e-12);
        }
        let six: Vec<_> = (0..6usize).map(|i| i.checked_sub(1)).collect();
        assert_eq!(structural_virality(&tree(&six)).unwrap(), 35.0 / 15.0);
    }

    #[test]
    fn path_beats_star() {
        for n in 4..30 {
            let path: Vec<_> = (0..n).map(|i: usize| i.checked_sub(1)).collect();
            let star: Vec<_> = (0..n).map(|i| (i > 0).then_some(0)).collect();
            assert!(
                structural_virality(&tree(&path)).unwrap()
                    > structural_virality(&tree(&star)).unwrap()
            );
        }
    }

    #[test]
    fn zero_duration() {
        let c = tree(&[None, Some(0)]);
        assert_eq!(duration(&c), 0.0);
    }

    #[test]
    fn missing_author_is_data_error() {
        let (mut msgs, c) = sample_thread();
        msgs.retain(|m| m.message_id != "M5");
        let err = compute_metrics(&c, &MessageIndex::new(&msgs)).unwrap_err();
        assert!(matches!(err, Error::Data(ref s) if s.contains("M5")));
    }
}
