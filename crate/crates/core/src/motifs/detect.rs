use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::graph::{DiGraph, UserGraph};
use super::templates::{motif_template, Motif};
use super::vf2::{is_match, MatchMode};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Presence {
    Absent,
    Subgraph,
    Exact,
}

impl Presence {
    pub fn as_str(self) -> &'static str {
        match self {
            Presence::Absent => "absent",
            Presence::Subgraph => "subgraph",
            Presence::Exact => "exact",
        }
    }

    pub fn is_present(self) -> bool {
        self != Presence::Absent
    }
}

impl fmt::Display for Presence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Presence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "absent" => Ok(Presence::Absent),
            "subgraph" => Ok(Presence::Subgraph),
            "exact" => Ok(Presence::Exact),
            other => Err(Error::Config(format!("unknown motif presence '{}'", other))),
        }
    }
}

/// How loop and star templates may sit inside a larger user graph.
///
/// Chain and dyadic matches always allow extra edges; self-loops are
/// single-vertex and unaffected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubgraphSemantics {
    /// The chosen vertex subset must induce exactly the template.
    #[default]
    Induced,
    /// Extra edges among the chosen vertices are tolerated.
    NonInduced,
}

impl FromStr for SubgraphSemantics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "induced" => Ok(SubgraphSemantics::Induced),
            "non_induced" | "non-induced" => Ok(SubgraphSemantics::NonInduced),
            other => Err(Error::Config(format!(
                "unknown subgraph semantics '{}'",
                other
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DetectOptions {
    /// Largest template size tried; defaults to the graph's vertex count.
    pub max_n: Option<usize>,
    pub semantics: SubgraphSemantics,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotifReport {
    pub cascade_id: String,
    presence: [Presence; 6],
}

impl MotifReport {
    pub fn new(cascade_id: impl Into<String>, presence: [Presence; 6]) -> Self {
        Self {
            cascade_id: cascade_id.into(),
            presence,
        }
    }

    pub fn get(&self, motif: Motif) -> Presence {
        self.presence[motif.index()]
    }

    pub fn presence(&self) -> &[Presence; 6] {
        &self.presence
    }

    pub fn present(&self) -> impl Iterator<Item = Motif> + '_ {
        Motif::ALL.into_iter().filter(|m| self.get(*m).is_present())
    }
}

/// Mode used when testing whether a template of `family` occurs in a graph.
pub fn subgraph_mode(family: Motif, semantics: SubgraphSemantics) -> MatchMode {
    match family {
        Motif::Dyadic | Motif::Chain => MatchMode::Monomorphism,
        Motif::SelfLoop => MatchMode::InducedSubgraph,
        Motif::Loop | Motif::OutgoingStar | Motif::IncomingStar => match semantics {
            SubgraphSemantics::Induced => MatchMode::InducedSubgraph,
            SubgraphSemantics::NonInduced => MatchMode::Monomorphism,
        },
    }
}

/// Detects the six motifs using direct structural tests.
pub fn detect_motifs(g: &UserGraph, options: DetectOptions) -> MotifReport {
    let graph = g.to_digraph();
    MotifReport::new(g.cascade_id.clone(), detect_in(&graph, options))
}

/// Same contract as [`detect_motifs`], answered by matching every template of
/// each family with the generic matcher. Cost grows quickly with graph size.
pub fn detect_motifs_generic(g: &UserGraph, options: DetectOptions) -> MotifReport {
    let graph = g.to_digraph();
    MotifReport::new(g.cascade_id.clone(), detect_generic_in(&graph, options))
}

pub fn detect_in(g: &DiGraph, options: DetectOptions) -> [Presence; 6] {
    let max_n = options.max_n.unwrap_or(g.n());
    let mut out = [Presence::Absent; 6];
    for family in Motif::ALL {
        let exact = g.n() <= max_n && family.admits_size(g.n()) && is_exact(g, family);
        out[family.index()] = if exact {
            Presence::Exact
        } else if has_subgraph(g, family, max_n, options.semantics) {
            Presence::Subgraph
        } else {
            Presence::Absent
        };
    }
    out
}

pub fn detect_generic_in(g: &DiGraph, options: DetectOptions) -> [Presence; 6] {
    let max_n = options.max_n.unwrap_or(g.n());
    let mut out = [Presence::Absent; 6];
    for family in Motif::ALL {
        let upper = family
            .max_size()
            .unwrap_or(usize::MAX)
            .min(max_n)
            .min(g.n());
        let sizes = family.min_size()..=upper;
        let exact = g.n() <= max_n
            && family.admits_size(g.n())
            && is_match(
                &motif_template(family, g.n()).expect("size admitted"),
                g,
                MatchMode::Isomorphism,
            );
        let mode = subgraph_mode(family, options.semantics);
        out[family.index()] = if exact {
            Presence::Exact
        } else if sizes
            .into_iter()
            .any(|k| is_match(&motif_template(family, k).expect("size admitted"), g, mode))
        {
            Presence::Subgraph
        } else {
            Presence::Absent
        };
    }
    out
}

fn is_exact(g: &DiGraph, family: Motif) -> bool {
    let n = g.n();
    let loops = g.loop_count();
    let edges = g.edge_count();
    match family {
        Motif::SelfLoop => n == 1 && loops == 1,
        Motif::Dyadic => n == 2 && loops == 0 && g.has_edge(0, 1) && g.has_edge(1, 0),
        Motif::Chain => {
            if loops != 0 || edges != n - 1 {
                return false;
            }
            let starts: Vec<usize> = (0..n).filter(|&v| g.in_degree(v) == 0).collect();
            if starts.len() != 1 || (0..n).any(|v| g.out_degree(v) > 1 || g.in_degree(v) > 1) {
                return false;
            }
            walk_length(g, starts[0]) == n
        }
        Motif::Loop => {
            loops == 0
                && edges == n
                && (0..n).all(|v| g.out_degree(v) == 1 && g.in_degree(v) == 1)
                && walk_length(g, 0) == n
        }
        Motif::OutgoingStar => is_star(g, |g, v| g.out_degree(v), |g, v| g.in_degree(v)),
        Motif::IncomingStar => is_star(g, |g, v| g.in_degree(v), |g, v| g.out_degree(v)),
    }
}

/// Vertices visited following single out-edges from `start` until a repeat or dead end.
fn walk_length(g: &DiGraph, start: usize) -> usize {
    let mut seen = vec![false; g.n()];
    let mut v = start;
    let mut count = 0;
    while !seen[v] {
        seen[v] = true;
        count += 1;
        match g.out_neighbors(v).first() {
            Some(&w) => v = w,
            None => break,
        }
    }
    count
}

fn is_star(
    g: &DiGraph,
    spokes: impl Fn(&DiGraph, usize) -> usize,
    back: impl Fn(&DiGraph, usize) -> usize,
) -> bool {
    let n = g.n();
    if g.loop_count() != 0 || g.edge_count() != n - 1 {
        return false;
    }
    let Some(centre) = (0..n).find(|&v| spokes(g, v) == n - 1) else {
        return false;
    };
    back(g, centre) == 0
}

fn has_subgraph(g: &DiGraph, family: Motif, max_n: usize, semantics: SubgraphSemantics) -> bool {
    if max_n < family.min_size() {
        return false;
    }
    let n = g.n();
    match family {
        Motif::SelfLoop => g.loop_count() > 0,
        Motif::Dyadic => (0..n).any(|u| g.out_neighbors(u).iter().any(|&v| g.has_edge(v, u))),
        Motif::Chain => g.edge_count() > g.loop_count(),
        Motif::Loop => has_cycle(g, max_n, semantics),
        Motif::OutgoingStar => has_star(g, semantics),
        Motif::IncomingStar => has_star(&g.reversed(), semantics),
    }
}

/// An outgoing star with k leaves contains one with two leaves (on the same
/// centre), so a 3-vertex check decides presence for every size.
fn has_star(g: &DiGraph, semantics: SubgraphSemantics) -> bool {
    (0..g.n()).any(|c| match semantics {
        SubgraphSemantics::NonInduced => g.out_degree(c) >= 2,
        SubgraphSemantics::Induced => {
            if g.has_loop(c) {
                return false;
            }
            let leaves: Vec<usize> = g
                .out_neighbors(c)
                .iter()
                .copied()
                .filter(|&v| !g.has_edge(v, c) && !g.has_loop(v))
                .collect();
            leaves
                .iter()
                .enumerate()
                .any(|(i, &a)| leaves[i + 1..].iter().any(|&b| !g.adjacent(a, b)))
        }
    })
}

/// Searches for a directed cycle on 3..=max_len distinct vertices; chordless
/// and free of self-loops under induced semantics.
fn has_cycle(g: &DiGraph, max_len: usize, semantics: SubgraphSemantics) -> bool {
    let induced = semantics == SubgraphSemantics::Induced;
    let comp = strong_components(g);
    let mut on_path = vec![false; g.n()];
    let mut path = Vec::new();
    for s in 0..g.n() {
        if induced && g.has_loop(s) {
            continue;
        }
        path.push(s);
        on_path[s] = true;
        let found = if induced {
            extend_induced(g, &comp, max_len, &mut path, &mut on_path)
        } else {
            extend_simple(g, &comp, max_len, &mut path, &mut on_path)
        };
        path.pop();
        on_path[s] = false;
        if found {
            return true;
        }
    }
    false
}

// Cycles are found from their smallest vertex; every vertex stays inside the
// start's strongly connected component.
fn extend_simple(
    g: &DiGraph,
    comp: &[usize],
    max_len: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
) -> bool {
    let s = path[0];
    let v = *path.last().expect("non-empty path");
    for &w in g.out_neighbors(v) {
        if w == s && path.len() >= 3 {
            return true;
        }
        if w <= s || on_path[w] || comp[w] != comp[s] || path.len() >= max_len {
            continue;
        }
        path.push(w);
        on_path[w] = true;
        let found = extend_simple(g, comp, max_len, path, on_path);
        path.pop();
        on_path[w] = false;
        if found {
            return true;
        }
    }
    false
}

fn extend_induced(
    g: &DiGraph,
    comp: &[usize],
    max_len: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
) -> bool {
    let s = path[0];
    let k = path.len() - 1;
    let v = path[k];
    'next: for &w in g.out_neighbors(v) {
        if w <= s || on_path[w] || comp[w] != comp[s] || g.has_loop(w) || g.has_edge(w, v) {
            continue;
        }
        // w may touch the path only through v -> w and, when closing, w -> s
        for &p in &path[..k] {
            if g.has_edge(p, w) || (p != s && g.has_edge(w, p)) {
                continue 'next;
            }
        }
        let closes = g.has_edge(w, s);
        if closes {
            if k >= 1 && path.len() < max_len {
                return true;
            }
            continue;
        }
        if path.len() + 1 >= max_len {
            continue;
        }
        path.push(w);
        on_path[w] = true;
        let found = extend_induced(g, comp, max_len, path, on_path);
        path.pop();
        on_path[w] = false;
        if found {
            return true;
        }
    }
    false
}

/// Strongly connected component id per vertex (iterative Tarjan).
fn strong_components(g: &DiGraph) -> Vec<usize> {
    let n = g.n();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut child)) = frames.last_mut() {
            if let Some(&w) = g.out_neighbors(v).get(*child) {
                *child += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("scc stack");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}
