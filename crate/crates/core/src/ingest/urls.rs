use std::sync::LazyLock;

use regex::Regex;

// Scheme followed by the RFC 3986 unreserved, reserved and pct-encoded characters.
static URL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\bhttps?://[A-Za-z0-9\-._~:/?#\[\]@!$&'()*+,;=%]+").expect("valid regex")
});

/// Extracts http(s) URLs from free text, in order of appearance.
///
/// Trailing sentence punctuation and unbalanced closing brackets are trimmed,
/// since chat text routinely ends a link with `.`, `)` or `!`.
pub fn extract_urls(text: &str) -> Vec<String> {
    URL.find_iter(text)
        .filter_map(|m| {
            let url = trim_trailing(m.as_str());
            // scheme alone is not a URL
            let rest = url.split_once("://").map(|(_, r)| r).unwrap_or("");
            (!rest.is_empty()).then(|| url.to_string())
        })
        .collect()
}

fn trim_trailing(mut url: &str) -> &str {
    loop {
        let Some(last) = url.chars().last() else {
            return url;
        };
        let strip = match last {
            '.' | ',' | ';' | ':' | '!' | '?' | '\'' | '*' => true,
            ')' => url.matches('(').count() < url.matches(')').count(),
            ']' => url.matches('[').count() < url.matches(']').count(),
            _ => false,
        };
        if !strip {
            return url;
        }
        url = &url[..url.len() - last.len_utf8()];
    }
}
