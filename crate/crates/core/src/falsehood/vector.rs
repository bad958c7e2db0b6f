use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse term-frequency vector of one text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextVector {
    pub owner_id: String,
    weights: BTreeMap<String, f64>,
    norm_sq: f64,
}

impl TextVector {
    /// Counts each lemma occurrence.
    pub fn from_lemmas<S: AsRef<str>>(owner_id: impl Into<String>, lemmas: &[S]) -> Self {
        let mut weights = BTreeMap::new();
        for l in lemmas {
            *weights.entry(l.as_ref().to_string()).or_insert(0.0) += 1.0;
        }
        Self::from_weights(owner_id, weights)
    }

    /// Builds a vector from explicit weights; zero entries are dropped.
    ///
    /// # Panics
    /// On negative or non-finite weights.
    pub fn from_weights(owner_id: impl Into<String>, weights: BTreeMap<String, f64>) -> Self {
        assert!(
            weights.values().all(|w| w.is_finite() && *w >= 0.0),
            "term weights must be finite and non-negative"
        );
        let weights: BTreeMap<String, f64> =
            weights.into_iter().filter(|(_, w)| *w > 0.0).collect();
        let norm_sq = weights.values().map(|w| w * w).sum();
        Self {
            owner_id: owner_id.into(),
            weights,
            norm_sq,
        }
    }

    pub fn weights(&self) -> &BTreeMap<String, f64> {
        &self.weights
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq.sqrt()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Multiplies every weight by `k > 0`.
    pub fn scaled(&self, k: f64) -> Self {
        assert!(k > 0.0 && k.is_finite());
        Self::from_weights(
            self.owner_id.clone(),
            self.weights
                .iter()
                .map(|(t, w)| (t.clone(), w * k))
                .collect(),
        )
    }

    /// Dot product, walking the smaller vector; terms are visited in sorted
    /// order either way so the sum is independent of argument order.
    pub fn dot(&self, other: &TextVector) -> f64 {
        let (small, large) = if self.weights.len() <= other.weights.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .weights
            .iter()
            .filter_map(|(t, a)| large.weights.get(t).map(|b| a * b))
            .sum()
    }
}

/// Cosine of the angle between two term-frequency vectors, in `[0, 1]`.
pub fn cosine_similarity(m: &TextVector, f: &TextVector) -> Result<f64> {
    for v in [m, f] {
        if v.norm_sq == 0.0 {
            return Err(Error::Domain(format!(
                "similarity undefined: '{}' has no terms after preprocessing",
                v.owner_id
            )));
        }
    }
    Ok(cosine_from_parts(m.dot(f), m.norm_sq, f.norm_sq))
}

pub(crate) fn cosine_from_parts(dot: f64, a_sq: f64, b_sq: f64) -> f64 {
    (dot / (a_sq * b_sq).sqrt()).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(id: &str, terms: &[(&str, f64)]) -> TextVector {
        TextVector::from_weights(id, terms.iter().map(|(t, w)| (t.to_string(), *w)).collect())
    }

    #[test]
    fn hand_case_is_one_half() {
        let m = v("m", &[("a", 1.0), ("b", 1.0)]);
        let f = v("f", &[("a", 1.0), ("c", 1.0)]);
        assert_eq!(cosine_similarity(&m, &f).unwrap(), 0.5);
    }

    #[test]
    fn identical_and_disjoint() {
        let m = TextVector::from_lemmas("m", &["x", "y", "y", "z"]);
        assert!((cosine_similarity(&m, &m).unwrap() - 1.0).abs() < 1e-12);
        let f = TextVector::from_lemmas("f", &["p", "q"]);
        assert_eq!(cosine_similarity(&m, &f).unwrap(), 0.0);
    }

    #[test]
    fn term_frequencies_counted() {
        let m = TextVector::from_lemmas("m", &["a", "b", "a"]);
        assert_eq!(m.weights()["a"], 2.0);
        assert_eq!(m.norm_sq(), 5.0);
    }

    #[test]
    fn zero_norm_is_domain_error() {
        let m = TextVector::from_lemmas::<&str>("m", &[]);
        let f = TextVector::from_lemmas("f", &["a"]);
        assert!(
            matches!(cosine_similarity(&m, &f), Err(Error::Domain(ref s)) if s.contains("'m'"))
        );
        assert!(cosine_similarity(&f, &m).is_err());
    }
}
