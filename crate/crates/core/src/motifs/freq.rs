use std::collections::BTreeMap;

use serde::Serialize;

use super::detect::MotifReport;
use super::templates::Motif;

/// Motif tallies for one class of cascades.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MotifFrequencies {
    pub n_cascades: usize,
    /// Cascades in which each family is present (subgraph or exact).
    pub presence: [usize; 6],
    /// `presence` divided by its sum, so the six entries add up to 1.
    pub relative: [f64; 6],
}

impl MotifFrequencies {
    pub fn total_presence(&self) -> usize {
        self.presence.iter().sum()
    }

    pub fn relative_of(&self, motif: Motif) -> f64 {
        self.relative[motif.index()]
    }
}

/// Groups reports by `class_of` and tallies presences per class. Classes
/// whose cascades contain no motif at all are left out.
pub fn motif_frequencies<'a, K, F>(
    reports: impl IntoIterator<Item = &'a MotifReport>,
    mut class_of: F,
) -> BTreeMap<K, MotifFrequencies>
where
    K: Ord,
    F: FnMut(&MotifReport) -> Option<K>,
{
    let mut tallies: BTreeMap<K, (usize, [usize; 6])> = BTreeMap::new();
    for r in reports {
        let Some(key) = class_of(r) else { continue };
        let entry = tallies.entry(key).or_insert((0, [0; 6]));
        entry.0 += 1;
        for m in r.present() {
            entry.1[m.index()] += 1;
        }
    }
    tallies
        .into_iter()
        .filter_map(|(key, (n_cascades, presence))| {
            let total: usize = presence.iter().sum();
            if total == 0 {
                return None;
            }
            let relative = presence.map(|c| c as f64 / total as f64);
            Some((
                key,
                MotifFrequencies {
                    n_cascades,
                    presence,
                    relative,
                },
            ))
        })
        .collect()
}
