use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::graph::DiGraph;
use crate::error::{Error, Result};

/// The six communication motifs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Motif {
    SelfLoop,
    Dyadic,
    Chain,
    Loop,
    OutgoingStar,
    IncomingStar,
}

impl Motif {
    pub const ALL: [Motif; 6] = [
        Motif::SelfLoop,
        Motif::Dyadic,
        Motif::Chain,
        Motif::Loop,
        Motif::OutgoingStar,
        Motif::IncomingStar,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Motif::SelfLoop => "self_loop",
            Motif::Dyadic => "dyadic",
            Motif::Chain => "chain",
            Motif::Loop => "loop",
            Motif::OutgoingStar => "outgoing_star",
            Motif::IncomingStar => "incoming_star",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Smallest template size.
    pub fn min_size(self) -> usize {
        match self {
            Motif::SelfLoop => 1,
            Motif::Dyadic | Motif::Chain => 2,
            Motif::Loop | Motif::OutgoingStar | Motif::IncomingStar => 3,
        }
    }

    /// Largest template size, if bounded.
    pub fn max_size(self) -> Option<usize> {
        match self {
            Motif::SelfLoop => Some(1),
            Motif::Dyadic => Some(2),
            _ => None,
        }
    }

    pub fn admits_size(self, n: usize) -> bool {
        n >= self.min_size() && self.max_size().is_none_or(|m| n <= m)
    }
}

impl fmt::Display for Motif {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Motif {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Motif::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown motif '{}'", s)))
    }
}

/// Template graph of `family` on `n` vertices.
///
/// Vertex 0 is the star centre; chains run `0 -> 1 -> ... -> n-1`; loops close
/// the chain with `n-1 -> 0`; the dyadic motif is the two-vertex ping-pong.
pub fn motif_template(family: Motif, n: usize) -> Result<DiGraph> {
    if !family.admits_size(n) {
        return Err(Error::Domain(format!(
            "{} template needs between {} and {} vertices, got {}",
            family,
            family.min_size(),
            family
                .max_size()
                .map_or_else(|| "any number of".to_string(), |m| m.to_string()),
            n
        )));
    }
    let g = match family {
        Motif::SelfLoop => DiGraph::from_edges(1, [(0, 0)]),
        Motif::Dyadic => DiGraph::from_edges(2, [(0, 1), (1, 0)]),
        Motif::Chain => DiGraph::from_edges(n, (1..n).map(|i| (i - 1, i))),
        Motif::Loop => DiGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))),
        Motif::OutgoingStar => DiGraph::from_edges(n, (1..n).map(|i| (0, i))),
        Motif::IncomingStar => DiGraph::from_edges(n, (1..n).map(|i| (i, 0))),
    };
    Ok(g)
}
