//! Ground truth for generated corpora, computed by deliberately naive code:
//! union-find for membership, BFS for depth and all-pairs distances, and
//! backtracking over injective vertex maps for motifs. None of it shares
//! code with the production cascade, metrics or motif paths.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::generate::{PlantedMatch, SynthCorpus, SynthMessage};
use crate::falsehood::FalsehoodLabel;
use crate::motifs::{Motif, Presence, SubgraphSemantics};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthCascade {
    pub cascade_id: String,
    pub group_id: String,
    pub root: String,
    /// Member message -> depth.
    pub members: BTreeMap<String, u32>,
    pub depth: u32,
    pub breadth: BTreeMap<u32, usize>,
    pub structural_virality: f64,
    /// Distinct `(replier, repliee)` author pairs.
    pub user_edges: BTreeSet<(String, String)>,
    pub motifs: BTreeMap<Motif, Presence>,
    pub falsehood: FalsehoodLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthTruth {
    pub seed: u64,
    pub n_messages: usize,
    pub capped_trees: u32,
    pub semantics: SubgraphSemantics,
    /// Sorted by cascade id.
    pub cascades: Vec<TruthCascade>,
    pub planted: Vec<PlantedMatch>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = x;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Reply-connected components with at least two messages, as index lists.
pub fn components(messages: &[SynthMessage]) -> Vec<Vec<usize>> {
    let index: HashMap<(&str, &str), usize> = messages
        .iter()
        .enumerate()
        .map(|(i, m)| ((m.group_id.as_str(), m.message_id.as_str()), i))
        .collect();
    let mut uf = UnionFind::new(messages.len());
    for (i, m) in messages.iter().enumerate() {
        if let Some(p) = &m.reply_to {
            if let Some(&j) = index.get(&(m.group_id.as_str(), p.as_str())) {
                uf.union(i, j);
            }
        }
    }
    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..messages.len() {
        let r = uf.find(i);
        comps.entry(r).or_default().push(i);
    }
    comps.into_values().filter(|c| c.len() >= 2).collect()
}

/// Full ground truth for a generated corpus.
pub fn ground_truth(corpus: &SynthCorpus, seed: u64, semantics: SubgraphSemantics) -> SynthTruth {
    let msgs = &corpus.messages;
    let index: HashMap<(&str, &str), usize> = msgs
        .iter()
        .enumerate()
        .map(|(i, m)| ((m.group_id.as_str(), m.message_id.as_str()), i))
        .collect();
    let planted: HashSet<(&str, &str)> = corpus
        .planted
        .iter()
        .map(|p| (p.group_id.as_str(), p.message_id.as_str()))
        .collect();

    let mut cascades = Vec::new();
    for comp in components(msgs) {
        let root = *comp
            .iter()
            .find(|&&i| msgs[i].reply_to.is_none())
            .expect("generated trees have a root");
        let members: HashSet<usize> = comp.iter().copied().collect();
        // undirected adjacency inside the component
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for &i in &comp {
            if let Some(p) = &msgs[i].reply_to {
                let j = index[&(msgs[i].group_id.as_str(), p.as_str())];
                adj.entry(i).or_default().push(j);
                adj.entry(j).or_default().push(i);
            }
        }
        let dist_from = |s: usize| {
            let mut dist: HashMap<usize, u32> = HashMap::from([(s, 0)]);
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &w in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                    if !dist.contains_key(&w) {
                        dist.insert(w, dist[&v] + 1);
                        q.push_back(w);
                    }
                }
            }
            dist
        };
        let depth_of = dist_from(root);
        assert_eq!(depth_of.len(), members.len());
        let mut total = 0u64;
        for &i in &comp {
            total += dist_from(i).values().map(|&d| d as u64).sum::<u64>();
        }
        let n = comp.len() as f64;
        let virality = total as f64 / (n * (n - 1.0));

        let mut breadth = BTreeMap::new();
        for d in depth_of.values() {
            *breadth.entry(*d).or_insert(0) += 1;
        }
        let user_edges: BTreeSet<(String, String)> = comp
            .iter()
            .filter_map(|&i| {
                let p = msgs[i].reply_to.as_ref()?;
                let j = index[&(msgs[i].group_id.as_str(), p.as_str())];
                Some((msgs[i].user_id.clone(), msgs[j].user_id.clone()))
            })
            .collect();
        let authors: BTreeSet<&str> = comp.iter().map(|&i| msgs[i].user_id.as_str()).collect();
        let motifs = motif_presence(&authors, &user_edges, semantics);
        let group = &msgs[root].group_id;
        let falsehood = if comp
            .iter()
            .any(|&i| planted.contains(&(group.as_str(), msgs[i].message_id.as_str())))
        {
            FalsehoodLabel::Falsehood
        } else {
            FalsehoodLabel::Unclassified
        };
        cascades.push(TruthCascade {
            cascade_id: format!("{}:{}", group, msgs[root].message_id),
            group_id: group.clone(),
            root: msgs[root].message_id.clone(),
            members: comp
                .iter()
                .map(|&i| (msgs[i].message_id.clone(), depth_of[&i]))
                .collect(),
            depth: *depth_of.values().max().expect("non-empty"),
            breadth,
            structural_virality: virality,
            user_edges,
            motifs,
            falsehood,
        });
    }
    cascades.sort_by(|a, b| a.cascade_id.cmp(&b.cascade_id));
    SynthTruth {
        seed,
        n_messages: msgs.len(),
        capped_trees: corpus.capped_trees,
        semantics,
        cascades,
        planted: corpus.planted.clone(),
    }
}

/// Template edge list, built independently of the production templates.
fn template(family: Motif, k: usize) -> Vec<(usize, usize)> {
    match family {
        Motif::SelfLoop => vec![(0, 0)],
        Motif::Dyadic => vec![(0, 1), (1, 0)],
        Motif::Chain => (0..k - 1).map(|i| (i, i + 1)).collect(),
        Motif::Loop => (0..k).map(|i| (i, (i + 1) % k)).collect(),
        Motif::OutgoingStar => (1..k).map(|i| (0, i)).collect(),
        Motif::IncomingStar => (1..k).map(|i| (i, 0)).collect(),
    }
}

fn sizes(family: Motif, n: usize) -> std::ops::RangeInclusive<usize> {
    match family {
        Motif::SelfLoop => 1..=1,
        Motif::Dyadic => 2..=2,
        Motif::Chain => 2..=n,
        _ => 3..=n,
    }
}

/// Tries every injective assignment of template vertices to graph vertices.
/// `induced` also requires graph edges among the image to be template edges.
pub fn embeds(
    t_edges: &[(usize, usize)],
    k: usize,
    g_edges: &HashSet<(usize, usize)>,
    n: usize,
    induced: bool,
) -> bool {
    if k > n {
        return false;
    }
    let t: HashSet<(usize, usize)> = t_edges.iter().copied().collect();
    let mut map = vec![usize::MAX; k];
    let mut used = vec![false; n];
    fn go(
        i: usize,
        k: usize,
        n: usize,
        t: &HashSet<(usize, usize)>,
        g: &HashSet<(usize, usize)>,
        induced: bool,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if i == k {
            return true;
        }
        for v in 0..n {
            if used[v] {
                continue;
            }
            map[i] = v;
            let consistent = (0..=i).all(|j| {
                [(i, j), (j, i)].iter().all(|&(a, b)| {
                    let te = t.contains(&(a, b));
                    let ge = g.contains(&(map[a], map[b]));
                    if induced {
                        te == ge
                    } else {
                        !te || ge
                    }
                })
            });
            if consistent {
                used[v] = true;
                if go(i + 1, k, n, t, g, induced, map, used) {
                    return true;
                }
                used[v] = false;
            }
        }
        map[i] = usize::MAX;
        false
    }
    go(0, k, n, &t, g_edges, induced, &mut map, &mut used)
}

/// Presence of each family by exhaustive search over vertex maps.
pub fn motif_presence(
    vertices: &BTreeSet<&str>,
    edges: &BTreeSet<(String, String)>,
    semantics: SubgraphSemantics,
) -> BTreeMap<Motif, Presence> {
    let pos: HashMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let g: HashSet<(usize, usize)> = edges
        .iter()
        .map(|(a, b)| (pos[a.as_str()], pos[b.as_str()]))
        .collect();
    let n = vertices.len();
    Motif::ALL
        .into_iter()
        .map(|family| {
            let induced_sub = match family {
                Motif::Chain | Motif::Dyadic => false,
                Motif::SelfLoop => true,
                _ => semantics == SubgraphSemantics::Induced,
            };
            let range = sizes(family, n);
            let exact =
                range.contains(&n) && n >= 1 && embeds(&template(family, n), n, &g, n, true);
            let presence = if exact {
                Presence::Exact
            } else if range
                .into_iter()
                .any(|k| embeds(&template(family, k), k, &g, n, induced_sub))
            {
                Presence::Subgraph
            } else {
                Presence::Absent
            };
            (family, presence)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(edges: &[(&str, &str)]) -> BTreeSet<(String, String)> {
        edges
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    #[test]
    fn sample_thread_user_graph() {
        let v: BTreeSet<&str> = ["U1", "U2", "U3"].into();
        let p = motif_presence(
            &v,
            &set(&[("U2", "U1"), ("U3", "U2"), ("U1", "U1")]),
            SubgraphSemantics::Induced,
        );
        assert_eq!(p[&Motif::SelfLoop], Presence::Subgraph);
        assert_eq!(p[&Motif::Chain], Presence::Subgraph);
        for m in [
            Motif::Dyadic,
            Motif::Loop,
            Motif::OutgoingStar,
            Motif::IncomingStar,
        ] {
            assert_eq!(p[&m], Presence::Absent, "{}", m);
        }
    }

    #[test]
    fn union_find_components() {
        let m = |id: &str, reply: Option<&str>| SynthMessage {
            group_id: "g".into(),
            message_id: id.into(),
            user_id: "u".into(),
            timestamp: chrono::Utc::now(),
            kind: "text".into(),
            text: "x".into(),
            reply_to: reply.map(str::to_string),
        };
        let msgs = [
            m("a", None),
            m("b", Some("a")),
            m("c", None),
            m("d", Some("b")),
            m("e", None),
            m("f", Some("e")),
        ];
        assert_eq!(components(&msgs), [vec![0, 1, 3], vec![4, 5]]);
    }
}
