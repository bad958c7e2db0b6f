use std::collections::BTreeMap;

use serde::Serialize;

use crate::cascade::{count_disjoint_pairs, Cascade};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct OverlapCounts {
    pub n_cascades: u64,
    pub pairs: u64,
    /// Pairs where one cascade ends before the other starts.
    pub disjoint_pairs: u64,
}

impl OverlapCounts {
    pub fn fraction(&self) -> Option<f64> {
        (self.pairs > 0).then(|| self.disjoint_pairs as f64 / self.pairs as f64)
    }

    fn add(&mut self, other: &OverlapCounts) {
        self.n_cascades += other.n_cascades;
        self.pairs += other.pairs;
        self.disjoint_pairs += other.disjoint_pairs;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapStats {
    pub per_group: BTreeMap<String, OverlapCounts>,
    /// Sums over groups; cascades in different groups are never paired.
    pub corpus: OverlapCounts,
}

/// Counts temporally disjoint cascade pairs within each group.
pub fn overlap_stats(cascades: &[Cascade]) -> OverlapStats {
    let mut intervals: BTreeMap<&str, Vec<_>> = BTreeMap::new();
    for c in cascades {
        intervals
            .entry(c.group_id.as_str())
            .or_default()
            .push((c.start, c.end));
    }
    let mut corpus = OverlapCounts::default();
    let per_group = intervals
        .into_iter()
        .map(|(g, ivs)| {
            let n = ivs.len() as u64;
            let counts = OverlapCounts {
                n_cascades: n,
                pairs: n * n.saturating_sub(1) / 2,
                disjoint_pairs: count_disjoint_pairs(&ivs),
            };
            corpus.add(&counts);
            (g.to_string(), counts)
        })
        .collect();
    OverlapStats { per_group, corpus }
}
