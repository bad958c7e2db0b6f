use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cascade::Cascade;
use crate::error::Result;
use crate::ingest::MessageIndex;

/// Small directed graph over vertices `0..n`; self-loops allowed, no multi-edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    n: usize,
    adj: Vec<bool>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    loops: usize,
}

impl DiGraph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            adj: vec![false; n * n],
            out: vec![Vec::new(); n],
            inc: vec![Vec::new(); n],
            loops: 0,
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "edge ({}, {}) out of range", u, v);
        if self.adj[u * self.n + v] {
            return;
        }
        self.adj[u * self.n + v] = true;
        if u == v {
            self.loops += 1;
        } else {
            self.out[u].push(v);
            self.inc[v].push(u);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    #[inline]
    pub fn has_loop(&self, v: usize) -> bool {
        self.adj[v * self.n + v]
    }

    /// Adjacent in either direction (ignoring self-loops when `u == v`).
    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.has_edge(u, v) || self.has_edge(v, u)
    }

    /// Out-neighbours other than the vertex itself.
    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    /// In-neighbours other than the vertex itself.
    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.inc[v].len()
    }

    pub fn loop_count(&self) -> usize {
        self.loops
    }

    /// Number of edges including self-loops.
    pub fn edge_count(&self) -> usize {
        self.loops + self.out.iter().map(Vec::len).sum::<usize>()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            (0..self.n).filter_map(move |v| self.has_edge(u, v).then_some((u, v)))
        })
    }

    pub fn reversed(&self) -> DiGraph {
        DiGraph::from_edges(self.n, self.edges().map(|(u, v)| (v, u)))
    }
}

/// Who-replied-to-whom graph of one cascade; edges point from replier to
/// the author being replied to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserGraph {
    pub cascade_id: String,
    /// Sorted user ids; edge endpoints index into this list.
    pub vertices: Vec<String>,
    /// Sorted, de-duplicated `(replier, repliee)` pairs.
    pub edges: Vec<(usize, usize)>,
}

impl UserGraph {
    pub fn to_digraph(&self) -> DiGraph {
        DiGraph::from_edges(self.vertices.len(), self.edges.iter().copied())
    }

    pub fn has_edge(&self, replier: &str, repliee: &str) -> bool {
        let (Ok(u), Ok(v)) = (
            self.vertices.binary_search_by(|x| x.as_str().cmp(replier)),
            self.vertices.binary_search_by(|x| x.as_str().cmp(repliee)),
        ) else {
            return false;
        };
        self.edges.binary_search(&(u, v)).is_ok()
    }
}

/// Projects the cascade's reply edges through the message authors.
pub fn user_graph(c: &Cascade, messages: &MessageIndex<'_>) -> Result<UserGraph> {
    let authors = c
        .nodes()
        .iter()
        .map(|id| {
            messages
                .require(&c.group_id, id)
                .map(|m| m.user_id.as_str())
        })
        .collect::<Result<Vec<_>>>()?;
    let vertices: Vec<String> = authors
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(str::to_string)
        .collect();
    let pos = |user: &str| {
        vertices
            .binary_search_by(|v| v.as_str().cmp(user))
            .expect("author is a vertex")
    };
    let edges: BTreeSet<(usize, usize)> = c
        .edges()
        .map(|(child, parent)| (pos(authors[child]), pos(authors[parent])))
        .collect();
    Ok(UserGraph {
        cascade_id: c.cascade_id.clone(),
        vertices,
        edges: edges.into_iter().collect(),
    })
}
