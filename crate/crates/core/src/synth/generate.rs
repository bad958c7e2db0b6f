use std::collections::VecDeque;

use chrono::{DateTime, Duration, Utc};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::SynthConfig;
use crate::error::Result;
use crate::falsehood::Factcheck;
use crate::ingest::{Category, GroupLabel};

const CHATTER_VOCAB: u32 = 2000;
const FACTCHECK_TOKENS: u32 = 10;
/// Fact-check tokens kept in a planted near-copy.
const PLANTED_KEEP: u32 = 8;

/// One generated message, in the log format accepted by ingest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthMessage {
    pub group_id: String,
    pub message_id: String,
    pub user_id: String,
    #[serde(with = "crate::timefmt")]
    pub timestamp: DateTime<Utc>,
    pub kind: String,
    pub text: String,
    pub reply_to: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlantedMatch {
    pub group_id: String,
    pub message_id: String,
    pub factcheck_id: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    /// Sorted by timestamp, then group and message id.
    pub messages: Vec<SynthMessage>,
    pub factchecks: Vec<Factcheck>,
    pub labels: Vec<GroupLabel>,
    pub planted: Vec<PlantedMatch>,
    /// Trees cut short by `max_nodes`.
    pub capped_trees: u32,
}

struct Node {
    id: usize,
    depth: u32,
    time: DateTime<Utc>,
    user: u32,
}

/// Generates a corpus of Galton-Watson reply trees. The same config always
/// yields the same corpus.
pub fn generate(config: &SynthConfig) -> Result<SynthCorpus> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let factchecks: Vec<Factcheck> = (0..config.n_factchecks)
        .map(|j| Factcheck {
            factcheck_id: format!("fc{}", j),
            source: "synthetic".into(),
            text: factcheck_tokens(j).join(" "),
        })
        .collect();

    let mut messages = Vec::new();
    let mut labels = Vec::new();
    let mut planted = Vec::new();
    let mut capped_trees = 0;
    let span_secs = config.span_days as i64 * 86_400;

    for g in 0..config.n_groups {
        let group_id = format!("g{:03}", g);
        let category = if rng.gen_bool(config.political_fraction) {
            Category::Political
        } else {
            Category::NonPolitical
        };
        labels.push(GroupLabel {
            group_id: group_id.clone(),
            category,
        });
        let user = |u: u32| format!("u{}_{}", g, u);
        let mut group_msgs: Vec<SynthMessage> = Vec::new();
        let push = |group_msgs: &mut Vec<SynthMessage>,
                    rng: &mut ChaCha8Rng,
                    n: &Node,
                    parent: Option<usize>| {
            let n_words = config.words_per_message.sample(rng);
            group_msgs.push(SynthMessage {
                group_id: group_id.clone(),
                message_id: format!("m{}", n.id),
                user_id: user(n.user),
                timestamp: n.time,
                kind: "text".into(),
                text: chatter(rng, n_words),
                reply_to: parent.map(|p| format!("m{}", p)),
            });
        };

        let n_trees = config.cascades_per_group.sample(&mut rng);
        for _ in 0..n_trees {
            let first = group_msgs.len();
            let root = Node {
                id: first,
                depth: 0,
                time: config.start + Duration::seconds(rng.gen_range(0..span_secs.max(1))),
                user: rng.gen_range(0..config.n_users),
            };
            push(&mut group_msgs, &mut rng, &root, None);
            let mut queue = VecDeque::from([root]);
            let mut size = 1u32;
            let mut capped = false;
            while let Some(parent) = queue.pop_front() {
                if config.max_depth.is_some_and(|d| parent.depth >= d) {
                    continue;
                }
                let k = config.offspring.sample(&mut rng);
                for _ in 0..k {
                    if size >= config.max_nodes {
                        capped = true;
                        break;
                    }
                    let author = if config.n_users == 1 || rng.gen_bool(config.self_reply_prob) {
                        parent.user
                    } else {
                        // uniform over the other users
                        let u = rng.gen_range(0..config.n_users - 1);
                        if u >= parent.user {
                            u + 1
                        } else {
                            u
                        }
                    };
                    let child = Node {
                        id: group_msgs.len(),
                        depth: parent.depth + 1,
                        time: parent.time
                            + Duration::seconds(config.delay.sample_seconds(&mut rng)),
                        user: author,
                    };
                    push(&mut group_msgs, &mut rng, &child, Some(parent.id));
                    queue.push_back(child);
                    size += 1;
                }
            }
            if capped {
                capped_trees += 1;
                log::warn!(
                    "{}: reply tree rooted at m{} capped at {} messages",
                    group_id,
                    first,
                    config.max_nodes
                );
            }
            let tree_size = group_msgs.len() - first;
            if tree_size >= 2
                && config.n_factchecks > 0
                && rng.gen_bool(config.planted_falsehood_rate)
            {
                let target = first + rng.gen_range(0..tree_size);
                let fc = rng.gen_range(0..config.n_factchecks);
                group_msgs[target].text = near_copy(&mut rng, fc);
                planted.push(PlantedMatch {
                    group_id: group_id.clone(),
                    message_id: group_msgs[target].message_id.clone(),
                    factcheck_id: format!("fc{}", fc),
                });
            }
        }

        for _ in 0..config.singletons_per_group.sample(&mut rng) {
            let n = Node {
                id: group_msgs.len(),
                depth: 0,
                time: config.start + Duration::seconds(rng.gen_range(0..span_secs.max(1))),
                user: rng.gen_range(0..config.n_users),
            };
            push(&mut group_msgs, &mut rng, &n, None);
        }
        messages.extend(group_msgs);
    }

    messages.sort_by(|a, b| {
        (a.timestamp, &a.group_id, &a.message_id).cmp(&(b.timestamp, &b.group_id, &b.message_id))
    });
    planted.sort();
    Ok(SynthCorpus {
        messages,
        factchecks,
        labels,
        planted,
        capped_trees,
    })
}

fn factcheck_tokens(j: u32) -> Vec<String> {
    (0..FACTCHECK_TOKENS)
        .map(|t| format!("f{}x{}", j, t))
        .collect()
}

fn chatter(rng: &mut impl Rng, n_words: u32) -> String {
    (0..n_words.max(1))
        .map(|_| format!("w{}", rng.gen_range(0..CHATTER_VOCAB)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Keeps most of a story's tokens, swaps the rest for chatter, shuffles.
fn near_copy(rng: &mut impl Rng, fc: u32) -> String {
    let mut tokens = factcheck_tokens(fc);
    tokens.shuffle(rng);
    tokens.truncate(PLANTED_KEEP as usize);
    for t in 0..FACTCHECK_TOKENS - PLANTED_KEEP {
        // chatter tokens outside the sampled range so they never repeat
        tokens.push(format!("w{}", CHATTER_VOCAB + t));
    }
    tokens.shuffle(rng);
    tokens.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::config::CountDist;

    #[test]
    fn same_seed_same_corpus() {
        let cfg = SynthConfig::default();
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
        let other = SynthConfig {
            seed: 43,
            ..cfg.clone()
        };
        assert_ne!(
            generate(&cfg).unwrap().messages,
            generate(&other).unwrap().messages
        );
    }

    #[test]
    fn no_offspring_no_replies() {
        let cfg = SynthConfig {
            offspring: CountDist::Constant { value: 0 },
            ..SynthConfig::default()
        };
        let c = generate(&cfg).unwrap();
        assert!(!c.messages.is_empty());
        assert!(c.messages.iter().all(|m| m.reply_to.is_none()));
        assert!(c.planted.is_empty());
    }

    #[test]
    fn replies_strictly_follow_parents() {
        let c = generate(&SynthConfig::default()).unwrap();
        let times: std::collections::HashMap<_, _> = c
            .messages
            .iter()
            .map(|m| ((m.group_id.as_str(), m.message_id.as_str()), m.timestamp))
            .collect();
        for m in &c.messages {
            if let Some(p) = &m.reply_to {
                assert!(times[&(m.group_id.as_str(), p.as_str())] < m.timestamp);
            }
        }
    }

    #[test]
    fn runaway_trees_are_capped() {
        let cfg = SynthConfig {
            n_groups: 1,
            cascades_per_group: CountDist::Constant { value: 2 },
            offspring: CountDist::Constant { value: 3 },
            singletons_per_group: CountDist::Constant { value: 0 },
            max_nodes: 50,
            ..SynthConfig::default()
        };
        let c = generate(&cfg).unwrap();
        assert_eq!(c.capped_trees, 2);
        assert_eq!(c.messages.len(), 100);
    }

    #[test]
    fn near_copy_keeps_most_tokens() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let text = near_copy(&mut rng, 3);
        let tokens: Vec<&str> = text.split(' ').collect();
        assert_eq!(tokens.len(), FACTCHECK_TOKENS as usize);
        assert_eq!(
            tokens.iter().filter(|t| t.starts_with("f3x")).count(),
            PLANTED_KEEP as usize
        );
    }
}
