use std::collections::{HashMap, HashSet};
use std::io::BufRead;
use std::path::Path;

use unicode_segmentation::UnicodeSegmentation;

use crate::error::{Error, Result};

const PT_STOPWORDS: &str = include_str!("../../data/pt_stopwords.txt");
const PT_LEMMAS: &str = include_str!("../../data/pt_lemmas.tsv");

/// Tokenizer with a stopword list and a surface-form -> lemma table.
///
/// Tokens are Unicode words, lowercased, with accents kept and any leading or
/// trailing non-alphanumeric characters removed.
#[derive(Debug, Clone, Default)]
pub struct Preprocessor {
    stopwords: HashSet<String>,
    lemmas: HashMap<String, String>,
}

impl Preprocessor {
    pub fn new(
        stopwords: impl IntoIterator<Item = String>,
        lemmas: impl IntoIterator<Item = (String, String)>,
    ) -> Self {
        Self {
            stopwords: stopwords.into_iter().map(|w| w.to_lowercase()).collect(),
            lemmas: lemmas
                .into_iter()
                .map(|(s, l)| (s.to_lowercase(), l))
                .collect(),
        }
    }

    /// The bundled Portuguese resources.
    pub fn portuguese() -> Self {
        Self::new(
            parse_stopwords(PT_STOPWORDS.as_bytes(), "bundled stopwords").expect("bundled data"),
            parse_lemmas(PT_LEMMAS.as_bytes(), "bundled lemmas").expect("bundled data"),
        )
    }

    pub fn from_files(stopwords: &Path, lemmas: &Path) -> Result<Self> {
        let read = |path: &Path| {
            std::fs::read(path).map_err(|e| {
                Error::Config(format!("cannot read resource {}: {}", path.display(), e))
            })
        };
        let sw = parse_stopwords(&read(stopwords)?[..], &stopwords.display().to_string())?;
        let lm = parse_lemmas(&read(lemmas)?[..], &lemmas.display().to_string())?;
        Ok(Self::new(sw, lm))
    }

    pub fn preprocess(&self, text: &str) -> Vec<String> {
        let lower = text.to_lowercase();
        lower
            .unicode_words()
            .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()))
            .filter(|w| !w.is_empty() && !self.stopwords.contains(*w))
            .map(|w| self.lemmas.get(w).cloned().unwrap_or_else(|| w.to_string()))
            .collect()
    }
}

/// One word per line; blank lines and `#` comments ignored.
pub fn parse_stopwords(reader: impl BufRead, source: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::parse(format!("{}:{}", source, i + 1), e))?;
        let word = line.trim();
        if !word.is_empty() && !word.starts_with('#') {
            out.push(word.to_string());
        }
    }
    Ok(out)
}

/// Tab-separated `surface<TAB>lemma` lines; blank lines and `#` comments ignored.
pub fn parse_lemmas(reader: impl BufRead, source: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let locator = || format!("{}:{}", source, i + 1);
        let line = line.map_err(|e| Error::parse(locator(), e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('\t') {
            Some((s, l)) if !s.trim().is_empty() && !l.trim().is_empty() => {
                out.push((s.trim().to_string(), l.trim().to_string()))
            }
            _ => return Err(Error::parse(locator(), "expected 'surface<TAB>lemma'")),
        }
    }
    Ok(out)
}
