//! Falsehood labeling: term-frequency cosine matching of message texts
//! against fact-checked stories, human review, and cascade labels.

mod article;
mod label;
mod matcher;
mod text;
mod vector;

use std::collections::HashMap;

use crate::ingest::{Message, MessageKind};

pub use article::{
    extract_main_text, fetch_all, fetch_article_text, FetchFailure, FetchedPage, Fetcher,
    FixtureEntry, FixtureFetcher, HttpFetcher, UrlCacheEntry,
};
pub use label::{
    label_cascades, read_falsehood_labels, write_falsehood_labels, FalsehoodLabel, LabelOutcome,
};
pub use matcher::{
    apply_review, match_corpus, match_corpus_brute_force, Factcheck, FalsehoodMatch, MatchDoc,
    MatchStatus, DEFAULT_THRESHOLD,
};
pub use text::{parse_lemmas, parse_stopwords, Preprocessor};
pub use vector::{cosine_similarity, TextVector};

/// Texts to score for each text message: its body plus the cached text of
/// every linked article that was fetched successfully.
pub fn collect_docs(messages: &[Message], cache: &[UrlCacheEntry]) -> Vec<MatchDoc> {
    let articles: HashMap<&str, &str> = cache
        .iter()
        .filter_map(|e| e.text.as_deref().map(|t| (e.url.as_str(), t)))
        .collect();
    let mut docs = Vec::new();
    for m in messages.iter().filter(|m| m.kind == MessageKind::Text) {
        let doc = |text: &str| MatchDoc {
            group_id: m.group_id.clone(),
            message_id: m.message_id.clone(),
            text: text.to_string(),
        };
        if !m.text.trim().is_empty() {
            docs.push(doc(&m.text));
        }
        for url in &m.urls {
            if let Some(text) = articles.get(url.as_str()) {
                docs.push(doc(text));
            }
        }
    }
    docs
}
