//! State-space matcher in the style of VF2.
//!
//! Pattern vertices are matched in a fixed connectivity-first order; each
//! candidate pair is checked for edge consistency against the partial mapping
//! and, for isomorphism and induced matching, for the terminal-set lookahead
//! (counts of unmatched neighbours adjacent / not adjacent to the mapped set).
//! Self-loops are part of the structure and must agree like any other edge.

use super::graph::DiGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatchMode {
    /// Bijection preserving edges and non-edges.
    Isomorphism,
    /// Pattern isomorphic to the subgraph induced by some vertex subset.
    InducedSubgraph,
    /// Injective map preserving pattern edges; extra target edges allowed.
    Monomorphism,
}

const NONE: usize = usize::MAX;

/// Returns `mapping[pattern_vertex] = target_vertex` for the first match found.
pub fn find_mapping(pattern: &DiGraph, target: &DiGraph, mode: MatchMode) -> Option<Vec<usize>> {
    if !precheck(pattern, target, mode) {
        return None;
    }
    let mut m = Matcher::new(pattern, target, mode);
    m.search(0).then_some(m.core_p)
}

pub fn is_match(pattern: &DiGraph, target: &DiGraph, mode: MatchMode) -> bool {
    find_mapping(pattern, target, mode).is_some()
}

fn degree_signature(g: &DiGraph) -> Vec<(usize, usize, bool)> {
    let mut sig: Vec<_> = (0..g.n())
        .map(|v| (g.out_degree(v), g.in_degree(v), g.has_loop(v)))
        .collect();
    sig.sort_unstable();
    sig
}

fn precheck(p: &DiGraph, t: &DiGraph, mode: MatchMode) -> bool {
    match mode {
        MatchMode::Isomorphism => {
            p.n() == t.n()
                && p.edge_count() == t.edge_count()
                && p.loop_count() == t.loop_count()
                && degree_signature(p) == degree_signature(t)
        }
        MatchMode::InducedSubgraph | MatchMode::Monomorphism => {
            p.n() <= t.n() && p.edge_count() <= t.edge_count() && p.loop_count() <= t.loop_count()
        }
    }
}

struct Matcher<'a> {
    p: &'a DiGraph,
    t: &'a DiGraph,
    mode: MatchMode,
    order: Vec<usize>,
    core_p: Vec<usize>,
    core_t: Vec<usize>,
    // number of mapped neighbours, per vertex
    term_p: Vec<u32>,
    term_t: Vec<u32>,
}

impl<'a> Matcher<'a> {
    fn new(p: &'a DiGraph, t: &'a DiGraph, mode: MatchMode) -> Self {
        Self {
            p,
            t,
            mode,
            order: match_order(p),
            core_p: vec![NONE; p.n()],
            core_t: vec![NONE; t.n()],
            term_p: vec![0; p.n()],
            term_t: vec![0; t.n()],
        }
    }

    fn search(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let n = self.order[depth];
        for m in self.candidates(n) {
            if self.core_t[m] != NONE || !self.feasible(n, m) {
                continue;
            }
            self.push(n, m);
            if self.search(depth + 1) {
                return true;
            }
            self.pop(n, m);
        }
        false
    }

    /// Target vertices that could receive `n`: neighbours of the image of an
    /// already-mapped neighbour of `n`, or every vertex if there is none.
    fn candidates(&self, n: usize) -> Vec<usize> {
        for &pv in self.p.in_neighbors(n) {
            let q = self.core_p[pv];
            if q != NONE {
                return self.t.out_neighbors(q).to_vec();
            }
        }
        for &pv in self.p.out_neighbors(n) {
            let q = self.core_p[pv];
            if q != NONE {
                return self.t.in_neighbors(q).to_vec();
            }
        }
        (0..self.t.n()).collect()
    }

    fn feasible(&self, n: usize, m: usize) -> bool {
        let (p, t) = (self.p, self.t);
        let strict = self.mode != MatchMode::Monomorphism;
        if strict {
            if p.has_loop(n) != t.has_loop(m) {
                return false;
            }
        } else if p.has_loop(n) && !t.has_loop(m) {
            return false;
        }
        if self.mode == MatchMode::Isomorphism {
            if p.out_degree(n) != t.out_degree(m) || p.in_degree(n) != t.in_degree(m) {
                return false;
            }
        } else if p.out_degree(n) > t.out_degree(m) || p.in_degree(n) > t.in_degree(m) {
            return false;
        }

        for &pv in p.out_neighbors(n) {
            let q = self.core_p[pv];
            if q != NONE && !t.has_edge(m, q) {
                return false;
            }
        }
        for &pv in p.in_neighbors(n) {
            let q = self.core_p[pv];
            if q != NONE && !t.has_edge(q, m) {
                return false;
            }
        }
        if !strict {
            return true;
        }
        for &tq in t.out_neighbors(m) {
            let pv = self.core_t[tq];
            if pv != NONE && !p.has_edge(n, pv) {
                return false;
            }
        }
        for &tq in t.in_neighbors(m) {
            let pv = self.core_t[tq];
            if pv != NONE && !p.has_edge(pv, n) {
                return false;
            }
        }

        let (p_term, p_new) = lookahead(p, n, &self.core_p, &self.term_p);
        let (t_term, t_new) = lookahead(t, m, &self.core_t, &self.term_t);
        match self.mode {
            MatchMode::Isomorphism => p_term == t_term && p_new == t_new,
            _ => p_term <= t_term && p_new <= t_new,
        }
    }

    fn push(&mut self, n: usize, m: usize) {
        self.core_p[n] = m;
        self.core_t[m] = n;
        for_each_neighbor(self.p, n, |v| self.term_p[v] += 1);
        for_each_neighbor(self.t, m, |v| self.term_t[v] += 1);
    }

    fn pop(&mut self, n: usize, m: usize) {
        self.core_p[n] = NONE;
        self.core_t[m] = NONE;
        for_each_neighbor(self.p, n, |v| self.term_p[v] -= 1);
        for_each_neighbor(self.t, m, |v| self.term_t[v] -= 1);
    }
}

/// Calls `f` once per distinct neighbour (either direction) of `v`.
fn for_each_neighbor(g: &DiGraph, v: usize, mut f: impl FnMut(usize)) {
    for &w in g.out_neighbors(v) {
        f(w);
    }
    for &w in g.in_neighbors(v) {
        if !g.has_edge(v, w) {
            f(w);
        }
    }
}

/// Unmatched neighbours of `v` split into (adjacent to mapped set, not adjacent).
fn lookahead(g: &DiGraph, v: usize, core: &[usize], term: &[u32]) -> (usize, usize) {
    let mut in_term = 0;
    let mut fresh = 0;
    for_each_neighbor(g, v, |w| {
        if core[w] == NONE {
            if term[w] > 0 {
                in_term += 1;
            } else {
                fresh += 1;
            }
        }
    });
    (in_term, fresh)
}

/// Connectivity-first ordering: start at the highest-degree vertex, then
/// repeatedly take the vertex with most already-ordered neighbours.
fn match_order(g: &DiGraph) -> Vec<usize> {
    let n = g.n();
    let degree = |v: usize| g.out_degree(v) + g.in_degree(v) + g.has_loop(v) as usize;
    let mut placed = vec![false; n];
    let mut links = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| (links[v], degree(v), std::cmp::Reverse(v)))
            .expect("unplaced vertex remains");
        placed[next] = true;
        order.push(next);
        for_each_neighbor(g, next, |w| links[w] += 1);
    }
    order
}
