use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::text::Preprocessor;
use super::vector::{cosine_from_parts, cosine_similarity, TextVector};
use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// A fact-checked false story.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factcheck {
    pub factcheck_id: String,
    pub source: String,
    pub text: String,
}

/// One text attributed to a message: its own body or an article it links to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchDoc {
    pub group_id: String,
    pub message_id: String,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchStatus {
    Candidate,
    Confirmed,
    Rejected,
}

impl MatchStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchStatus::Candidate => "candidate",
            MatchStatus::Confirmed => "confirmed",
            MatchStatus::Rejected => "rejected",
        }
    }
}

impl fmt::Display for MatchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MatchStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "candidate" => Ok(MatchStatus::Candidate),
            "confirmed" => Ok(MatchStatus::Confirmed),
            "rejected" => Ok(MatchStatus::Rejected),
            other => Err(Error::Config(format!("unknown match status '{}'", other))),
        }
    }
}

/// A message/fact-check pair above the similarity threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsehoodMatch {
    pub message_id: String,
    pub factcheck_id: String,
    pub score: f64,
    pub status: MatchStatus,
    /// Message ids are only unique within a group.
    pub group_id: String,
}

impl FalsehoodMatch {
    fn key(&self) -> (&str, &str, &str) {
        (&self.group_id, &self.message_id, &self.factcheck_id)
    }
}

struct Vectorized {
    group_id: String,
    message_id: String,
    vector: TextVector,
}

fn vectorize_docs(docs: &[MatchDoc], pre: &Preprocessor) -> Vec<Vectorized> {
    docs.par_iter()
        .map(|d| Vectorized {
            group_id: d.group_id.clone(),
            message_id: d.message_id.clone(),
            vector: TextVector::from_lemmas(d.message_id.clone(), &pre.preprocess(&d.text)),
        })
        .filter(|v| !v.vector.is_empty())
        .collect()
}

fn vectorize_factchecks(factchecks: &[Factcheck], pre: &Preprocessor) -> Result<Vec<TextVector>> {
    if factchecks.is_empty() {
        return Err(Error::Config("fact-check corpus is empty".into()));
    }
    Ok(factchecks
        .iter()
        .map(|f| TextVector::from_lemmas(f.factcheck_id.clone(), &pre.preprocess(&f.text)))
        .collect())
}

/// Keeps the best score per (group, message, fact-check) and orders the
/// review queue by score descending, then by ids.
fn finalize(mut found: Vec<FalsehoodMatch>) -> Vec<FalsehoodMatch> {
    let mut best: BTreeMap<(String, String, String), FalsehoodMatch> = BTreeMap::new();
    for m in found.drain(..) {
        let key = (
            m.group_id.clone(),
            m.message_id.clone(),
            m.factcheck_id.clone(),
        );
        match best.get(&key) {
            Some(prev) if prev.score >= m.score => {}
            _ => {
                best.insert(key, m);
            }
        }
    }
    let mut out: Vec<FalsehoodMatch> = best.into_values().collect();
    out.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.key().cmp(&b.key()))
    });
    out
}

/// All message/fact-check pairs scoring strictly above `threshold`, as
/// review candidates. Texts that preprocess to nothing are skipped.
pub fn match_corpus(
    docs: &[MatchDoc],
    factchecks: &[Factcheck],
    pre: &Preprocessor,
    threshold: f64,
) -> Result<Vec<FalsehoodMatch>> {
    let fvecs = vectorize_factchecks(factchecks, pre)?;
    let mut index: HashMap<&str, Vec<(usize, f64)>> = HashMap::new();
    for (i, f) in fvecs.iter().enumerate() {
        for (term, w) in f.weights() {
            index.entry(term.as_str()).or_default().push((i, *w));
        }
    }
    let docs = vectorize_docs(docs, pre);
    let found: Vec<FalsehoodMatch> = docs
        .par_iter()
        .flat_map_iter(|d| {
            let mut dots: HashMap<usize, f64> = HashMap::new();
            for (term, w) in d.vector.weights() {
                if let Some(postings) = index.get(term.as_str()) {
                    for &(i, fw) in postings {
                        *dots.entry(i).or_insert(0.0) += w * fw;
                    }
                }
            }
            dots.into_iter()
                .filter_map(|(i, dot)| {
                    let score = cosine_from_parts(dot, d.vector.norm_sq(), fvecs[i].norm_sq());
                    (score > threshold).then(|| FalsehoodMatch {
                        message_id: d.message_id.clone(),
                        factcheck_id: factchecks[i].factcheck_id.clone(),
                        score,
                        status: MatchStatus::Candidate,
                        group_id: d.group_id.clone(),
                    })
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(finalize(found))
}

/// Reference implementation scoring every pair directly.
pub fn match_corpus_brute_force(
    docs: &[MatchDoc],
    factchecks: &[Factcheck],
    pre: &Preprocessor,
    threshold: f64,
) -> Result<Vec<FalsehoodMatch>> {
    let fvecs = vectorize_factchecks(factchecks, pre)?;
    let mut found = Vec::new();
    for d in vectorize_docs(docs, pre) {
        for (f, fv) in factchecks.iter().zip(&fvecs) {
            if fv.is_empty() {
                continue;
            }
            let score = cosine_similarity(&d.vector, fv)?;
            if score > threshold {
                found.push(FalsehoodMatch {
                    message_id: d.message_id.clone(),
                    factcheck_id: f.factcheck_id.clone(),
                    score,
                    status: MatchStatus::Candidate,
                    group_id: d.group_id.clone(),
                });
            }
        }
    }
    Ok(finalize(found))
}

/// Reconciles a reviewed queue with the candidates it was made from. Every
/// reviewed record must name an existing candidate pair; statuses may only
/// move away from `candidate`. Returns the reviewed list in candidate order.
pub fn apply_review(
    candidates: &[FalsehoodMatch],
    reviewed: &[FalsehoodMatch],
) -> Result<Vec<FalsehoodMatch>> {
    let mut decisions: HashMap<(&str, &str, &str), MatchStatus> = HashMap::new();
    for r in reviewed {
        if decisions.insert(r.key(), r.status).is_some() {
            return Err(Error::Validation(format!(
                "pair ({}, {}, {}) reviewed twice",
                r.group_id, r.message_id, r.factcheck_id
            )));
        }
    }
    let mut out = Vec::with_capacity(candidates.len());
    for c in candidates {
        if c.status != MatchStatus::Candidate {
            return Err(Error::Validation(format!(
                "queue entry ({}, {}, {}) is already {}",
                c.group_id, c.message_id, c.factcheck_id, c.status
            )));
        }
        let status = decisions.remove(&c.key()).unwrap_or(MatchStatus::Candidate);
        out.push(FalsehoodMatch {
            status,
            ..c.clone()
        });
    }
    if let Some((g, m, f)) = decisions.into_keys().min() {
        return Err(Error::Data(format!(
            "reviewed pair ({}, {}, {}) is not in the candidate queue",
            g, m, f
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, text: &str) -> MatchDoc {
        MatchDoc {
            group_id: "g".into(),
            message_id: id.into(),
            text: text.into(),
        }
    }

    fn fc(id: &str, text: &str) -> Factcheck {
        Factcheck {
            factcheck_id: id.into(),
            source: "site".into(),
            text: text.into(),
        }
    }

    #[test]
    fn identical_text_scores_one() {
        let pre = Preprocessor::default();
        let found = match_corpus(
            &[doc("m1", "urna eletrônica fraudada"), doc("m2", "bom dia")],
            &[fc("f1", "Urna eletrônica fraudada!")],
            &pre,
            DEFAULT_THRESHOLD,
        )
        .unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].message_id, "m1");
        assert!((found[0].score - 1.0).abs() < 1e-12);
        assert_eq!(found[0].status, MatchStatus::Candidate);
    }

    #[test]
    fn threshold_is_strict() {
        let pre = Preprocessor::default();
        // cosine exactly 0.5
        let found = match_corpus(&[doc("m", "a b")], &[fc("f", "a c")], &pre, 0.5).unwrap();
        assert!(found.is_empty());
        let found = match_corpus(&[doc("m", "a b")], &[fc("f", "a c")], &pre, 0.49).unwrap();
        assert_eq!(found.len(), 1);
    }

    #[test]
    fn no_overlap_and_empty_factchecks() {
        let pre = Preprocessor::default();
        assert!(
            match_corpus(&[doc("m", "x y")], &[fc("f", "p q")], &pre, 0.5)
                .unwrap()
                .is_empty()
        );
        assert!(matches!(
            match_corpus(&[doc("m", "x")], &[], &pre, 0.5),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn best_text_per_message_kept() {
        let pre = Preprocessor::default();
        let docs = [doc("m", "a b c d"), doc("m", "a b c")];
        let found = match_corpus(&docs, &[fc("f", "a b c")], &pre, 0.5).unwrap();
        assert_eq!(found.len(), 1);
        assert!((found[0].score - 1.0).abs() < 1e-12);
    }

    #[test]
    fn index_agrees_with_brute_force() {
        let pre = Preprocessor::default();
        let words = ["a", "b", "c", "d", "e", "f"];
        let docs: Vec<_> = (0..40)
            .map(|i| {
                let text: Vec<&str> = (0..4).map(|k| words[(i * 7 + k * k * 3) % 6]).collect();
                doc(&format!("m{}", i), &text.join(" "))
            })
            .collect();
        let fcs: Vec<_> = (0..6)
            .map(|i| {
                fc(
                    &format!("f{}", i),
                    &format!("{} {} {}", words[i], words[(i + 1) % 6], words[i]),
                )
            })
            .collect();
        let a = match_corpus(&docs, &fcs, &pre, 0.5).unwrap();
        let b = match_corpus_brute_force(&docs, &fcs, &pre, 0.5).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.key(), y.key());
            assert!((x.score - y.score).abs() < 1e-12);
        }
    }

    #[test]
    fn review_transitions() {
        let cand = |m: &str| FalsehoodMatch {
            message_id: m.into(),
            factcheck_id: "f".into(),
            score: 0.9,
            status: MatchStatus::Candidate,
            group_id: "g".into(),
        };
        let queue = vec![cand("m1"), cand("m2")];
        let mut reviewed = queue.clone();
        reviewed[0].status = MatchStatus::Confirmed;
        reviewed[1].status = MatchStatus::Rejected;
        let out = apply_review(&queue, &reviewed).unwrap();
        assert_eq!(out[0].status, MatchStatus::Confirmed);
        assert_eq!(out[1].status, MatchStatus::Rejected);

        let partial = apply_review(&queue, &reviewed[..1]).unwrap();
        assert_eq!(partial[1].status, MatchStatus::Candidate);

        let mut stranger = cand("m9");
        stranger.status = MatchStatus::Confirmed;
        assert!(
            matches!(apply_review(&queue, &[stranger]), Err(Error::Data(ref s)) if s.contains("m9"))
        );
        assert!(apply_review(&out, &[]).is_err());
    }
}
