use std::collections::BTreeMap;
use std::str::FromStr;

use chrono::{DateTime, Datelike, Days, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use super::class::{CascadeClass, Segment};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bucket {
    #[default]
    Day,
    /// Weeks starting on Monday.
    Week,
}

impl Bucket {
    pub fn as_str(self) -> &'static str {
        match self {
            Bucket::Day => "day",
            Bucket::Week => "week",
        }
    }

    pub fn start_of(self, ts: DateTime<Utc>) -> NaiveDate {
        let d = ts.date_naive();
        match self {
            Bucket::Day => d,
            Bucket::Week => d - Days::new(d.weekday().num_days_from_monday() as u64),
        }
    }

    fn step(self) -> Days {
        match self {
            Bucket::Day => Days::new(1),
            Bucket::Week => Days::new(7),
        }
    }
}

impl FromStr for Bucket {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "day" => Ok(Bucket::Day),
            "week" => Ok(Bucket::Week),
            other => Err(Error::Config(format!("unknown bucket '{}'", other))),
        }
    }
}

/// Cascade counts per UTC calendar bucket of the root timestamp.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountSeries {
    pub bucket: Bucket,
    /// First day of every bucket from the earliest to the latest root.
    pub starts: Vec<NaiveDate>,
    /// Zero-filled counts aligned with `starts`, per segment name.
    pub counts: BTreeMap<String, Vec<u64>>,
}

pub fn daily_counts(roots: &[(DateTime<Utc>, CascadeClass)], bucket: Bucket) -> CountSeries {
    let segments = Segment::all();
    let mut starts = Vec::new();
    if let (Some(lo), Some(hi)) = (
        roots.iter().map(|r| bucket.start_of(r.0)).min(),
        roots.iter().map(|r| bucket.start_of(r.0)).max(),
    ) {
        let mut d = lo;
        while d <= hi {
            starts.push(d);
            d = d + bucket.step();
        }
    }
    let mut counts: BTreeMap<String, Vec<u64>> = segments
        .iter()
        .map(|s| (s.name(), vec![0; starts.len()]))
        .collect();
    for (ts, class) in roots {
        let idx = starts
            .binary_search(&bucket.start_of(*ts))
            .expect("bucket within range");
        for s in &segments {
            if s.contains(*class) {
                counts.get_mut(&s.name()).expect("segment")[idx] += 1;
            }
        }
    }
    CountSeries {
        bucket,
        starts,
        counts,
    }
}
