use std::collections::HashMap;
use std::fmt;
use std::time::Duration;

use scraper::{ElementRef, Html, Node, Selector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw HTTP response as seen by the extractor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchedPage {
    pub status: u16,
    pub content_type: String,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "detail")]
pub enum FetchFailure {
    Timeout,
    Status(u16),
    NonHtml(String),
    ExtractionEmpty,
    Network(String),
}

impl fmt::Display for FetchFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FetchFailure::Timeout => f.write_str("timeout"),
            FetchFailure::Status(code) => write!(f, "http status {}", code),
            FetchFailure::NonHtml(ct) => write!(f, "non-html content ({})", ct),
            FetchFailure::ExtractionEmpty => f.write_str("no article text extracted"),
            FetchFailure::Network(e) => write!(f, "network error: {}", e),
        }
    }
}

pub trait Fetcher: Sync {
    fn get(&self, url: &str) -> std::result::Result<FetchedPage, FetchFailure>;
}

/// Blocking HTTP client with a per-request timeout.
pub struct HttpFetcher {
    client: reqwest::blocking::Client,
}

impl HttpFetcher {
    pub fn new(timeout: Duration) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .user_agent(concat!("cascades/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| Error::Config(format!("cannot build http client: {}", e)))?;
        Ok(Self { client })
    }
}

impl Fetcher for HttpFetcher {
    fn get(&self, url: &str) -> std::result::Result<FetchedPage, FetchFailure> {
        let resp = self.client.get(url).send().map_err(|e| {
            if e.is_timeout() {
                FetchFailure::Timeout
            } else {
                FetchFailure::Network(e.to_string())
            }
        })?;
        let status = resp.status().as_u16();
        let content_type = resp
            .headers()
            .get(reqwest::header::CONTENT_TYPE)
            .and_then(|v| v.to_str().ok())
            .unwrap_or("")
            .to_string();
        let body = resp.text().map_err(|e| {
            if e.is_timeout() {
                FetchFailure::Timeout
            } else {
                FetchFailure::Network(e.to_string())
            }
        })?;
        Ok(FetchedPage {
            status,
            content_type,
            body,
        })
    }
}

/// Offline responses keyed by URL; unknown URLs behave like a 404.
#[derive(Debug, Clone, Default)]
pub struct FixtureFetcher {
    pages: HashMap<String, std::result::Result<FetchedPage, FetchFailure>>,
}

/// One line of a fixture file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub url: String,
    #[serde(default)]
    pub status: Option<u16>,
    #[serde(default)]
    pub content_type: Option<String>,
    #[serde(default)]
    pub body: Option<String>,
    /// Simulates a request that never completes.
    #[serde(default)]
    pub timeout: bool,
}

impl FixtureFetcher {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, url: impl Into<String>, page: FetchedPage) {
        self.pages.insert(url.into(), Ok(page));
    }

    pub fn insert_failure(&mut self, url: impl Into<String>, failure: FetchFailure) {
        self.pages.insert(url.into(), Err(failure));
    }

    pub fn from_entries(entries: impl IntoIterator<Item = FixtureEntry>) -> Self {
        let mut f = Self::new();
        for e in entries {
            if e.timeout {
                f.insert_failure(e.url, FetchFailure::Timeout);
            } else {
                f.insert(
                    e.url,
                    FetchedPage {
                        status: e.status.unwrap_or(200),
                        content_type: e.content_type.unwrap_or_else(|| "text/html".into()),
                        body: e.body.unwrap_or_default(),
                    },
                );
            }
        }
        f
    }
}

impl Fetcher for FixtureFetcher {
    fn get(&self, url: &str) -> std::result::Result<FetchedPage, FetchFailure> {
        self.pages
            .get(url)
            .cloned()
            .unwrap_or(Err(FetchFailure::Status(404)))
    }
}

/// Fetches `url` and extracts its main text.
pub fn fetch_article_text(
    fetcher: &dyn Fetcher,
    url: &str,
) -> std::result::Result<String, FetchFailure> {
    let page = fetcher.get(url)?;
    if !(200..300).contains(&page.status) {
        return Err(FetchFailure::Status(page.status));
    }
    let ct = page.content_type.to_ascii_lowercase();
    if !(ct.is_empty() || ct.contains("html")) {
        return Err(FetchFailure::NonHtml(page.content_type));
    }
    extract_main_text(&page.body).ok_or(FetchFailure::ExtractionEmpty)
}

const BOILERPLATE: [&str; 10] = [
    "script", "style", "noscript", "nav", "header", "footer", "aside", "form", "iframe", "template",
];

fn collect_text(el: ElementRef<'_>, out: &mut String) {
    for child in el.children() {
        match child.value() {
            Node::Text(t) => {
                out.push_str(t);
                out.push(' ');
            }
            Node::Element(e) if BOILERPLATE.contains(&e.name()) => {}
            Node::Element(_) => {
                if let Some(c) = ElementRef::wrap(child) {
                    collect_text(c, out);
                }
            }
            _ => {}
        }
    }
}

fn clean_text(el: ElementRef<'_>) -> String {
    let mut raw = String::new();
    collect_text(el, &mut raw);
    raw.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Main text of an HTML page: the `<article>` element when there is one,
/// otherwise the container whose paragraphs hold the most text. Navigation,
/// scripts and similar boilerplate are dropped. `None` when nothing remains.
pub fn extract_main_text(html: &str) -> Option<String> {
    let doc = Html::parse_document(html);
    let article = Selector::parse("article").expect("static selector");
    let articles: Vec<String> = doc
        .select(&article)
        .map(clean_text)
        .filter(|t| !t.is_empty())
        .collect();
    if !articles.is_empty() {
        return Some(articles.join("\n"));
    }

    // text density: score each paragraph container by the text its <p> children carry
    let para = Selector::parse("p").expect("static selector");
    let mut containers: Vec<(ElementRef<'_>, usize)> = Vec::new();
    for p in doc.select(&para) {
        if p.ancestors().any(|a| {
            a.value()
                .as_element()
                .is_some_and(|e| BOILERPLATE.contains(&e.name()))
        }) {
            continue;
        }
        let Some(parent) = p.parent().and_then(ElementRef::wrap) else {
            continue;
        };
        let len = clean_text(p).chars().count();
        match containers.iter_mut().find(|(el, _)| el.id() == parent.id()) {
            Some(entry) => entry.1 += len,
            None => containers.push((parent, len)),
        }
    }
    // first container in document order wins ties
    let best = containers.into_iter().filter(|(_, score)| *score > 0).fold(
        None,
        |best: Option<(ElementRef<'_>, usize)>, cur| match best {
            Some(b) if b.1 >= cur.1 => Some(b),
            _ => Some(cur),
        },
    );
    let text = match best {
        Some((el, _)) => doc
            .select(&para)
            .filter(|p| p.parent().map(|x| x.id()) == Some(el.id()))
            .map(clean_text)
            .filter(|t| !t.is_empty())
            .collect::<Vec<_>>()
            .join("\n"),
        None => {
            let body = Selector::parse("body").expect("static selector");
            doc.select(&body).next().map(clean_text).unwrap_or_default()
        }
    };
    (!text.is_empty()).then_some(text)
}

/// One line of the URL-text cache.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrlCacheEntry {
    pub url: String,
    pub text: Option<String>,
    pub error: Option<String>,
}

impl UrlCacheEntry {
    pub fn from_outcome(url: &str, outcome: std::result::Result<String, FetchFailure>) -> Self {
        match outcome {
            Ok(text) => Self {
                url: url.to_string(),
                text: Some(text),
                error: None,
            },
            Err(e) => Self {
                url: url.to_string(),
                text: None,
                error: Some(e.to_string()),
            },
        }
    }
}

/// Fetches each distinct URL once, in sorted order; failures are recorded.
pub fn fetch_all(
    fetcher: &dyn Fetcher,
    urls: impl IntoIterator<Item = String>,
) -> Vec<UrlCacheEntry> {
    use rayon::prelude::*;
    let mut urls: Vec<String> = urls.into_iter().collect();
    urls.sort();
    urls.dedup();
    urls.par_iter()
        .map(|u| UrlCacheEntry::from_outcome(u, fetch_article_text(fetcher, u)))
        .collect()
}
