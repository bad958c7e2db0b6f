use serde::{Deserialize, Serialize};

/// The thirteen qualitative relations between two closed intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllenRelation {
    Before,
    Meets,
    Overlaps,
    Starts,
    During,
    Finishes,
    Equals,
    FinishedBy,
    Contains,
    StartedBy,
    OverlappedBy,
    MetBy,
    After,
}

impl AllenRelation {
    pub const ALL: [AllenRelation; 13] = [
        AllenRelation::Before,
        AllenRelation::Meets,
        AllenRelation::Overlaps,
        AllenRelation::Starts,
        AllenRelation::During,
        AllenRelation::Finishes,
        AllenRelation::Equals,
        AllenRelation::FinishedBy,
        AllenRelation::Contains,
        AllenRelation::StartedBy,
        AllenRelation::OverlappedBy,
        AllenRelation::MetBy,
        AllenRelation::After,
    ];

    pub fn inverse(self) -> Self {
        use AllenRelation::*;
        match self {
            Before => After,
            Meets => MetBy,
            Overlaps => OverlappedBy,
            Starts => StartedBy,
            During => Contains,
            Finishes => FinishedBy,
            Equals => Equals,
            FinishedBy => Finishes,
            Contains => During,
            StartedBy => Starts,
            OverlappedBy => Overlaps,
            MetBy => Meets,
            After => Before,
        }
    }

    /// True iff one interval ends strictly before the other starts.
    pub fn is_disjoint(self) -> bool {
        matches!(self, AllenRelation::Before | AllenRelation::After)
    }
}

/// Relation of `[a_start, a_end]` to `[b_start, b_end]`.
///
/// Degenerate (point) intervals are allowed; checks run in an order that
/// keeps `relate(b, a) == relate(a, b).inverse()` for every input.
pub fn relate<T: Ord>(a_start: T, a_end: T, b_start: T, b_end: T) -> AllenRelation {
    use AllenRelation::*;
    debug_assert!(a_start <= a_end && b_start <= b_end);
    if a_end < b_start {
        return Before;
    }
    if b_end < a_start {
        return After;
    }
    if a_start == b_start && a_end == b_end {
        return Equals;
    }
    if a_end == b_start {
        return Meets;
    }
    if b_end == a_start {
        return MetBy;
    }
    if a_start == b_start {
        return if a_end < b_end { Starts } else { StartedBy };
    }
    if a_end == b_end {
        return if a_start > b_start {
            Finishes
        } else {
            FinishedBy
        };
    }
    if b_start < a_start && a_end < b_end {
        return During;
    }
    if a_start < b_start && b_end < a_end {
        return Contains;
    }
    if a_start < b_start {
        Overlaps
    } else {
        OverlappedBy
    }
}

/// Counts pairs `i < j` whose intervals are disjoint, in O(n log n).
pub fn count_disjoint_pairs<T: Ord + Copy>(intervals: &[(T, T)]) -> u64 {
    let mut ends: Vec<T> = intervals.iter().map(|iv| iv.1).collect();
    ends.sort_unstable();
    // each disjoint pair has exactly one member ending before the other starts
    intervals
        .iter()
        .map(|&(start, _)| ends.partition_point(|e| *e < start) as u64)
        .sum()
}
