//! Attribute profiles normalized to each cascade's own range.
//!
//! The x axis is either depth or elapsed time expressed as a percentage of the
//! cascade's maximum, bucketed into 21 bins at 0 %, 5 %, ..., 100 %.

use serde::{Deserialize, Serialize};

use super::CascadeMetrics;

pub const N_BINS: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileX {
    DepthPct,
    TimePct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileY {
    Breadth,
    /// Distinct users up to the point on the x axis.
    UniqueUsers,
    /// Distinct users at exactly that depth level (depth profiles only).
    UsersAtDepth,
    Minutes,
    Depth,
}

impl ProfileX {
    pub const ALL: [ProfileX; 2] = [ProfileX::DepthPct, ProfileX::TimePct];

    pub fn as_str(self) -> &'static str {
        match self {
            ProfileX::DepthPct => "depth_pct",
            ProfileX::TimePct => "time_pct",
        }
    }
}

impl ProfileY {
    pub const ALL: [ProfileY; 5] = [
        ProfileY::Breadth,
        ProfileY::UniqueUsers,
        ProfileY::UsersAtDepth,
        ProfileY::Minutes,
        ProfileY::Depth,
    ];

    /// Whether `self` is meaningful against `x`; the other combinations are
    /// the x axis itself or undefined.
    pub fn applies_to(self, x: ProfileX) -> bool {
        !matches!(
            (x, self),
            (ProfileX::DepthPct, ProfileY::Depth)
                | (ProfileX::TimePct, ProfileY::Minutes | ProfileY::UsersAtDepth)
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProfileY::Breadth => "breadth",
            ProfileY::UniqueUsers => "unique_users",
            ProfileY::UsersAtDepth => "users_at_depth",
            ProfileY::Minutes => "minutes",
            ProfileY::Depth => "depth",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileBin {
    /// Bin centre in percent: 0, 5, ..., 100.
    pub bin_pct: u32,
    pub mean: f64,
    /// Sample standard deviation over sqrt(n); 0 when n = 1.
    pub stderr: f64,
    pub n: u64,
}

/// Per-bin running moments; merging two accumulators is associative.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileAccumulator {
    bins: [Moments; N_BINS],
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
    }
}

impl Default for ProfileAccumulator {
    fn default() -> Self {
        Self {
            bins: [Moments::default(); N_BINS],
        }
    }
}

impl ProfileAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one cascade. Returns false (and adds nothing) when the cascade's
    /// x range is zero, e.g. a time profile of a cascade whose replies all
    /// share the root's timestamp.
    pub fn add(&mut self, m: &CascadeMetrics, x: ProfileX, y: ProfileY) -> bool {
        match cascade_series(m, x, y) {
            Some(series) => {
                for (bin, value) in series {
                    self.bins[bin].push(value);
                }
                true
            }
            None => false,
        }
    }

    pub fn merge(&mut self, other: &ProfileAccumulator) {
        for (a, b) in self.bins.iter_mut().zip(other.bins.iter()) {
            a.merge(b);
        }
    }

    pub fn finish(&self) -> Vec<ProfileBin> {
        self.bins
            .iter()
            .enumerate()
            .filter(|(_, m)| m.n > 0)
            .map(|(i, m)| ProfileBin {
                bin_pct: (i * 5) as u32,
                mean: m.mean,
                stderr: if m.n > 1 {
                    (m.m2.max(0.0) / (m.n - 1) as f64).sqrt() / (m.n as f64).sqrt()
                } else {
                    0.0
                },
                n: m.n,
            })
            .collect()
    }
}

/// Mean and standard error of `y` per normalized-`x` bin across cascades.
/// Bins no cascade reaches are omitted.
pub fn normalized_profile(cs: &[CascadeMetrics], x: ProfileX, y: ProfileY) -> Vec<ProfileBin> {
    let mut acc = ProfileAccumulator::new();
    for m in cs {
        acc.add(m, x, y);
    }
    acc.finish()
}

/// One cascade's `(bin, value)` contributions, one per bin reached.
///
/// Depth profiles place level `d` of a depth-`D` cascade in bin
/// `round(20 d / D)`; levels sharing a bin are averaged. Time profiles
/// evaluate the cascade's state at each of the 21 evenly spaced instants.
pub(crate) fn cascade_series(
    m: &CascadeMetrics,
    x: ProfileX,
    y: ProfileY,
) -> Option<Vec<(usize, f64)>> {
    match x {
        ProfileX::DepthPct => {
            let max_depth = m.depth as u64;
            if max_depth == 0 {
                return None;
            }
            let mut sums = [(0.0f64, 0u32); N_BINS];
            for d in 0..=m.depth {
                let bin = ((40 * d as u64 + max_depth) / (2 * max_depth)) as usize;
                let value = match y {
                    ProfileY::Breadth => *m.breadth_at.get(&d)? as f64,
                    ProfileY::UniqueUsers => *m.users_by_depth.get(&d)? as f64,
                    ProfileY::UsersAtDepth => *m.users_at_depth.get(&d)? as f64,
                    ProfileY::Minutes => *m.time_to_depth.get(&d)?,
                    ProfileY::Depth => d as f64,
                };
                sums[bin].0 += value;
                sums[bin].1 += 1;
            }
            Some(
                sums.iter()
                    .enumerate()
                    .filter(|(_, (_, k))| *k > 0)
                    .map(|(bin, (s, k))| (bin, s / *k as f64))
                    .collect(),
            )
        }
        ProfileX::TimePct => {
            let total = m.duration_minutes;
            if total <= 0.0 || y == ProfileY::UsersAtDepth {
                return None;
            }
            let mut out = Vec::with_capacity(N_BINS);
            let mut level_counts: Vec<u64> = vec![0; m.depth as usize + 1];
            let mut max_breadth = 0u64;
            let mut max_depth = 0u32;
            let mut users = 0u64;
            let mut next = 0;
            for bin in 0..N_BINS {
                let limit = total * bin as f64;
                while next < m.arrivals.len() && m.arrivals[next].minutes * 20.0 <= limit {
                    let a = &m.arrivals[next];
                    let slot = level_counts.get_mut(a.depth as usize)?;
                    *slot += 1;
                    max_breadth = max_breadth.max(*slot);
                    max_depth = max_depth.max(a.depth);
                    users += a.new_user as u64;
                    next += 1;
                }
                let value = match y {
                    ProfileY::Breadth => max_breadth as f64,
                    ProfileY::UniqueUsers => users as f64,
                    ProfileY::UsersAtDepth => unreachable!("rejected above"),
                    ProfileY::Minutes => limit / 20.0,
                    ProfileY::Depth => max_depth as f64,
                };
                out.push((bin, value));
            }
            Some(out)
        }
    }
}
