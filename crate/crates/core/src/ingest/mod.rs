//! Chat-log ingestion.
//!
//! Exported logs arrive as JSONL or CSV with one message per record. Parsing
//! never aborts on a bad record: the record is skipped and an [`IngestWarning`]
//! carrying its source line is emitted instead. Reply targets are resolved once
//! the whole input has been read, since exports do not always list a target
//! before its replies.

mod anonymize;
mod urls;
mod validate;

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Read};
use std::str::FromStr;

use chrono::{DateTime, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use anonymize::anonymize;
pub use urls::extract_urls;
pub use validate::{read_labels, validate_corpus, write_labels, CorpusSummary, GroupSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageKind {
    Text,
    Media,
}

/// One chat event after ingestion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub group_id: String,
    pub message_id: String,
    pub user_id: String,
    #[serde(with = "crate::timefmt")]
    pub timestamp: DateTime<Utc>,
    /// Export order within the group; breaks timestamp ties.
    pub seq: u64,
    pub kind: MessageKind,
    pub text: String,
    #[serde(default)]
    pub urls: Vec<String>,
    pub reply_to: Option<String>,
    /// Original reply target that was cleared because it did not resolve to an
    /// earlier message of the same group.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dangling_reply: Option<String>,
}

impl Message {
    /// Ordering key used for every "posted before" comparison.
    pub fn order_key(&self) -> (DateTime<Utc>, u64) {
        (self.timestamp, self.seq)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Political,
    NonPolitical,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Political => "political",
            Category::NonPolitical => "non_political",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "political" => Ok(Category::Political),
            "non_political" => Ok(Category::NonPolitical),
            other => Err(Error::Config(format!(
                "unknown group category '{}' (expected political or non_political)",
                other
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupLabel {
    pub group_id: String,
    pub category: Category,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogFormat {
    Jsonl,
    Csv,
}

impl FromStr for LogFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(LogFormat::Jsonl),
            "csv" => Ok(LogFormat::Csv),
            other => Err(Error::Config(format!(
                "unknown log format '{}' (expected jsonl or csv)",
                other
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningKind {
    Malformed,
    DanglingReply,
    MediaText,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestWarning {
    /// Name of the input the record came from.
    pub source: String,
    /// 1-based line number in that input.
    pub line: u64,
    pub kind: WarningKind,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Treat timestamps without an offset as UTC instead of rejecting them.
    pub assume_utc: bool,
    /// Secret used to anonymize `user_key` fields.
    pub salt: Option<String>,
}

/// Raw record as it appears in either export format.
#[derive(Debug, Deserialize)]
struct RawRecord {
    group_id: String,
    message_id: String,
    #[serde(default)]
    user_key: Option<String>,
    #[serde(default)]
    user_id: Option<String>,
    timestamp: String,
    kind: String,
    #[serde(default)]
    text: Option<String>,
    #[serde(default)]
    reply_to: Option<String>,
    #[serde(default)]
    dangling_reply: Option<String>,
}

/// Incremental parser; feed one or more inputs, then call [`LogParser::finish`].
pub struct LogParser {
    options: ParseOptions,
    messages: Vec<Message>,
    origins: Vec<(usize, u64)>,
    sources: Vec<String>,
    warnings: Vec<IngestWarning>,
    next_seq: HashMap<String, u64>,
}

impl LogParser {
    pub fn new(options: ParseOptions) -> Result<Self> {
        if matches!(options.salt.as_deref(), Some("")) {
            return Err(Error::Config("anonymization salt must not be empty".into()));
        }
        Ok(Self {
            options,
            messages: Vec::new(),
            origins: Vec::new(),
            sources: Vec::new(),
            warnings: Vec::new(),
            next_seq: HashMap::new(),
        })
    }

    pub fn feed(&mut self, reader: impl Read, format: LogFormat, source: &str) -> Result<()> {
        let source_idx = self.sources.len();
        self.sources.push(source.to_string());
        match format {
            LogFormat::Jsonl => self.feed_jsonl(std::io::BufReader::new(reader), source_idx),
            LogFormat::Csv => self.feed_csv(reader, source_idx),
        }
    }

    fn feed_jsonl(&mut self, reader: impl BufRead, source_idx: usize) -> Result<()> {
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line_no = idx as u64 + 1;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<RawRecord>(&line) {
                Ok(raw) => self.accept(raw, source_idx, line_no)?,
                Err(e) => self.warn(source_idx, line_no, WarningKind::Malformed, e.to_string()),
            }
        }
        Ok(())
    }

    fn feed_csv(&mut self, reader: impl Read, source_idx: usize) -> Result<()> {
        let mut rdr = csv::ReaderBuilder::new()
            .flexible(false)
            .from_reader(reader);
        let headers = match rdr.headers() {
            Ok(h) => h.clone(),
            Err(e) if is_io(&e) => return Err(into_io(e)),
            Err(e) => {
                self.warn(source_idx, 1, WarningKind::Malformed, e.to_string());
                return Ok(());
            }
        };
        if headers.is_empty() {
            return Ok(());
        }
        for record in rdr.records() {
            let record = match record {
                Ok(r) => r,
                Err(e) if is_io(&e) => return Err(into_io(e)),
                Err(e) => {
                    let line = e.position().map(|p| p.line()).unwrap_or(0);
                    self.warn(source_idx, line, WarningKind::Malformed, e.to_string());
                    continue;
                }
            };
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            match record.deserialize::<RawRecord>(Some(&headers)) {
                Ok(raw) => self.accept(raw, source_idx, line)?,
                Err(e) => self.warn(source_idx, line, WarningKind::Malformed, e.to_string()),
            }
        }
        Ok(())
    }

    fn warn(&mut self, source_idx: usize, line: u64, kind: WarningKind, detail: String) {
        self.warnings.push(IngestWarning {
            source: self.sources[source_idx].clone(),
            line,
            kind,
            detail,
        });
    }

    fn accept(&mut self, raw: RawRecord, source_idx: usize, line: u64) -> Result<()> {
        let RawRecord {
            group_id,
            message_id,
            user_key,
            user_id,
            timestamp,
            kind,
            text,
            reply_to,
            dangling_reply,
        } = raw;

        if group_id.is_empty() || message_id.is_empty() {
            self.warn(
                source_idx,
                line,
                WarningKind::Malformed,
                "group_id and message_id must be non-empty".into(),
            );
            return Ok(());
        }
        let user_id = match (non_empty(user_id), non_empty(user_key)) {
            (Some(id), None) => id,
            (None, Some(key)) => match &self.options.salt {
                Some(salt) => anonymize(&key, salt)?,
                None => {
                    return Err(Error::Config(format!(
                        "{}:{}: record carries user_key but no salt was configured",
                        self.sources[source_idx], line
                    )))
                }
            },
            (Some(_), Some(_)) => {
                self.warn(
                    source_idx,
                    line,
                    WarningKind::Malformed,
                    "record has both user_id and user_key".into(),
                );
                return Ok(());
            }
            (None, None) => {
                self.warn(
                    source_idx,
                    line,
                    WarningKind::Malformed,
                    "record has neither user_id nor user_key".into(),
                );
                return Ok(());
            }
        };
        let timestamp = match parse_timestamp(&timestamp, self.options.assume_utc) {
            Ok(ts) => ts,
            Err(detail) => {
                self.warn(source_idx, line, WarningKind::Malformed, detail);
                return Ok(());
            }
        };
        let kind = match kind.as_str() {
            "text" => MessageKind::Text,
            "media" => MessageKind::Media,
            other => {
                self.warn(
                    source_idx,
                    line,
                    WarningKind::Malformed,
                    format!("unknown message kind '{}'", other),
                );
                return Ok(());
            }
        };
        let mut text = text.unwrap_or_default();
        if kind == MessageKind::Media && !text.is_empty() {
            self.warn(
                source_idx,
                line,
                WarningKind::MediaText,
                format!("text of media message '{}' dropped", message_id),
            );
            text.clear();
        }
        let urls = extract_urls(&text);

        let seq = self.next_seq.entry(group_id.clone()).or_insert(0);
        let this_seq = *seq;
        *seq += 1;

        self.messages.push(Message {
            group_id,
            message_id,
            user_id,
            timestamp,
            seq: this_seq,
            kind,
            text,
            urls,
            reply_to: non_empty(reply_to),
            dangling_reply: non_empty(dangling_reply),
        });
        self.origins.push((source_idx, line));
        Ok(())
    }

    /// Resolves reply targets and returns messages in input order.
    pub fn finish(mut self) -> (Vec<Message>, Vec<IngestWarning>) {
        let mut index: HashMap<(&str, &str), (DateTime<Utc>, u64)> = HashMap::new();
        for m in &self.messages {
            index
                .entry((m.group_id.as_str(), m.message_id.as_str()))
                .or_insert(m.order_key());
        }
        let mut dangling = Vec::new();
        for (pos, m) in self.messages.iter().enumerate() {
            if let Some(target) = &m.reply_to {
                let ok = index
                    .get(&(m.group_id.as_str(), target.as_str()))
                    .is_some_and(|key| *key < m.order_key());
                if !ok {
                    dangling.push(pos);
                }
            }
        }
        drop(index);
        for pos in dangling {
            let m = &mut self.messages[pos];
            let target = m.reply_to.take().expect("reply_to present");
            let detail = format!(
                "message '{}' in group '{}' replies to '{}', which is absent or not earlier; edge dropped",
                m.message_id, m.group_id, target
            );
            m.dangling_reply = Some(target);
            let (source_idx, line) = self.origins[pos];
            self.warnings.push(IngestWarning {
                source: self.sources[source_idx].clone(),
                line,
                kind: WarningKind::DanglingReply,
                detail,
            });
        }
        (self.messages, self.warnings)
    }
}

/// Lookup of messages by `(group_id, message_id)`.
pub struct MessageIndex<'a> {
    map: HashMap<(&'a str, &'a str), &'a Message>,
}

impl<'a> MessageIndex<'a> {
    pub fn new(messages: &'a [Message]) -> Self {
        let mut map = HashMap::with_capacity(messages.len());
        for m in messages {
            map.entry((m.group_id.as_str(), m.message_id.as_str()))
                .or_insert(m);
        }
        Self { map }
    }

    pub fn get(&self, group_id: &str, message_id: &str) -> Option<&'a Message> {
        self.map.get(&(group_id, message_id)).copied()
    }

    /// Like [`MessageIndex::get`] but a missing message is a data error.
    pub fn require(&self, group_id: &str, message_id: &str) -> Result<&'a Message> {
        self.get(group_id, message_id).ok_or_else(|| {
            Error::Data(format!(
                "message '{}' of group '{}' not found in corpus",
                message_id, group_id
            ))
        })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// One-shot parse of a single input.
pub fn parse_log(
    input: impl Read,
    format: LogFormat,
    options: ParseOptions,
) -> Result<(Vec<Message>, Vec<IngestWarning>)> {
    let mut parser = LogParser::new(options)?;
    parser.feed(input, format, "<input>")?;
    Ok(parser.finish())
}

fn non_empty(value: Option<String>) -> Option<String> {
    value.filter(|v| !v.is_empty())
}

fn is_io(e: &csv::Error) -> bool {
    matches!(e.kind(), csv::ErrorKind::Io(_))
}

fn into_io(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Stream(io),
        _ => unreachable!("checked by is_io"),
    }
}

fn parse_timestamp(raw: &str, assume_utc: bool) -> std::result::Result<DateTime<Utc>, String> {
    let raw = raw.trim();
    if let Ok(ts) = DateTime::parse_from_rfc3339(raw) {
        return Ok(ts.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(raw, fmt) {
            return if assume_utc {
                Ok(naive.and_utc())
            } else {
                Err(format!(
                    "timestamp '{}' has no timezone; pass --assume-utc to read it as UTC",
                    raw
                ))
            };
        }
    }
    Err(format!("unparseable timestamp '{}'", raw))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SAMPLE_THREAD: &str = include_str!("../../tests/data/sample_thread.jsonl");

    fn parse(input: &str) -> (Vec<Message>, Vec<IngestWarning>) {
        parse_log(input.as_bytes(), LogFormat::Jsonl, ParseOptions::default()).unwrap()
    }

    #[test]
    fn sample_thread_fixture_parses_cleanly() {
        let (messages, warnings) = parse(SAMPLE_THREAD);
        assert_eq!(messages.len(), 7);
        assert!(warnings.is_empty(), "{:?}", warnings);
        let replies: Vec<_> = messages
            .iter()
            .filter(|m| m.reply_to.is_some())
            .map(|m| m.message_id.as_str())
            .collect();
        assert_eq!(replies, ["M3", "M5", "M7"]);
        assert_eq!(
            messages.iter().map(|m| m.seq).collect::<Vec<_>>(),
            (0..7).collect::<Vec<_>>()
        );
    }

    #[test]
    fn empty_stream() {
        let (messages, warnings) = parse("");
        assert!(messages.is_empty());
        assert!(warnings.is_empty());
        let (messages, warnings) =
            parse_log(&b""[..], LogFormat::Csv, ParseOptions::default()).unwrap();
        assert!(messages.is_empty() && warnings.is_empty());
    }

    #[test]
    fn reply_to_later_message_is_dangling() {
        let input = r#"{"group_id":"g","message_id":"a","user_id":"u1","timestamp":"2018-10-07T10:00:00Z","kind":"text","text":"hi","reply_to":"b"}
{"group_id":"g","message_id":"b","user_id":"u2","timestamp":"2018-10-07T10:05:00Z","kind":"text","text":"yo","reply_to":null}
"#;
        let (messages, warnings) = parse(input);
        assert_eq!(messages.len(), 2);
        assert_eq!(messages[0].reply_to, None);
        assert_eq!(messages[0].dangling_reply.as_deref(), Some("b"));
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].kind, WarningKind::DanglingReply);
        assert_eq!(warnings[0].line, 1);
    }

    #[test]
    fn reply_to_missing_and_self_are_dangling() {
        let input = r#"{"group_id":"g","message_id":"a","user_id":"u1","timestamp":"2018-10-07T10:00:00Z","kind":"text","text":"","reply_to":"a"}
{"group_id":"g","message_id":"b","user_id":"u1","timestamp":"2018-10-07T10:00:00Z","kind":"text","text":"","reply_to":"zzz"}
{"group_id":"h","message_id":"c","user_id":"u1","timestamp":"2018-10-07T11:00:00Z","kind":"text","text":"","reply_to":"a"}
"#;
        let (messages, warnings) = parse(input);
        assert!(messages.iter().all(|m| m.reply_to.is_none()));
        assert_eq!(warnings.len(), 3);
        assert_eq!(
            warnings.iter().map(|w| w.line).collect::<Vec<_>>(),
            [1, 2, 3]
        );
    }

    #[test]
    fn equal_timestamps_resolve_by_file_order() {
        let input = r#"{"group_id":"g","message_id":"a","user_id":"u1","timestamp":"2018-10-07T10:00:00Z","kind":"text","text":""}
{"group_id":"g","message_id":"b","user_id":"u2","timestamp":"2018-10-07T10:00:00Z","kind":"text","text":"","reply_to":"a"}
"#;
        let (messages, warnings) = parse(input);
        assert!(warnings.is_empty());
        assert_eq!(messages[1].reply_to.as_deref(), Some("a"));
    }

    #[test]
    fn target_listed_after_reply_but_earlier_in_time_resolves() {
        let input = r#"{"group_id":"g","message_id":"b","user_id":"u2","timestamp":"2018-10-07T10:05:00Z","kind":"text","text":"","reply_to":"a"}
{"group_id":"g","message_id":"a","user_id":"u1","timestamp":"2018-10-07T10:00:00Z","kind":"text","text":""}
"#;
        let (messages, warnings) = parse(input);
        assert!(warnings.is_empty());
        assert_eq!(messages[0].reply_to.as_deref(), Some("a"));
    }

    #[test]
    fn malformed_lines_warn_with_line_numbers() {
        let input = r#"{"group_id":"g","message_id":"a","user_id":"u1","timestamp":"2018-10-07T10:00:00Z","kind":"text","text":""}
not json
{"group_id":"g","message_id":"b","user_id":"u1","timestamp":"yesterday","kind":"text","text":""}
{"group_id":"g","message_id":"c","user_id":"u1","timestamp":"2018-10-07T10:00:00Z","kind":"sticker","text":""}

{"group_id":"g","message_id":"d","timestamp":"2018-10-07T10:00:00Z","kind":"text","text":""}
"#;
        let (messages, warnings) = parse(input);
        assert_eq!(messages.len(), 1);
        assert_eq!(
            warnings.iter().map(|w| w.line).collect::<Vec<_>>(),
            [2, 3, 4, 6]
        );
        assert!(warnings.iter().all(|w| w.kind == WarningKind::Malformed));
    }

    #[test]
    fn naive_timestamps_need_assume_utc() {
        let input = r#"{"group_id":"g","message_id":"a","user_id":"u1","timestamp":"2018-10-07 10:00:00","kind":"text","text":""}"#;
        let (messages, warnings) = parse(input);
        assert!(messages.is_empty());
        assert_eq!(warnings.len(), 1);
        let opts = ParseOptions {
            assume_utc: true,
            salt: None,
        };
        let (messages, _) = parse_log(input.as_bytes(), LogFormat::Jsonl, opts).unwrap();
        assert_eq!(
            messages[0].timestamp.to_rfc3339(),
            "2018-10-07T10:00:00+00:00"
        );
    }

    #[test]
    fn offsets_are_normalized_to_utc() {
        let input = r#"{"group_id":"g","message_id":"a","user_id":"u1","timestamp":"2018-10-07T10:00:00-03:00","kind":"text","text":""}"#;
        let (messages, _) = parse(input);
        assert_eq!(
            messages[0].timestamp.to_rfc3339(),
            "2018-10-07T13:00:00+00:00"
        );
    }

    #[test]
    fn user_keys_are_anonymized() {
        let input = r#"{"group_id":"g","message_id":"a","user_key":"+55 31 99999-0000","timestamp":"2018-10-07T10:00:00Z","kind":"text","text":""}"#;
        let opts = ParseOptions {
            assume_utc: false,
            salt: Some("pepper".into()),
        };
        let (messages, _) = parse_log(input.as_bytes(), LogFormat::Jsonl, opts).unwrap();
        assert_eq!(
            messages[0].user_id,
            anonymize("+55 31 99999-0000", "pepper").unwrap()
        );
        assert!(!messages[0].user_id.contains("99999"));

        let err = parse_log(input.as_bytes(), LogFormat::Jsonl, ParseOptions::default());
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn media_text_is_cleared() {
        let input = r#"{"group_id":"g","message_id":"a","user_id":"u1","timestamp":"2018-10-07T10:00:00Z","kind":"media","text":"caption http://x.org"}"#;
        let (messages, warnings) = parse(input);
        assert_eq!(messages[0].text, "");
        assert!(messages[0].urls.is_empty());
        assert_eq!(warnings[0].kind, WarningKind::MediaText);
    }

    #[test]
    fn csv_mirror_matches_jsonl() {
        let csv_input = "group_id,message_id,user_id,timestamp,kind,text,reply_to\n\
g,a,u1,2018-10-07T10:00:00Z,text,\"hello, see https://example.org/a?b=1.\",\n\
g,b,u2,2018-10-07T10:01:00Z,text,ok,a\n\
g,c,u2,broken,text,ok,a\n";
        let (messages, warnings) = parse_log(
            csv_input.as_bytes(),
            LogFormat::Csv,
            ParseOptions::default(),
        )
        .unwrap();
        assert_eq!(messages.len(), 2);
        assert_eq!(messages[0].urls, ["https://example.org/a?b=1"]);
        assert_eq!(messages[0].reply_to, None);
        assert_eq!(messages[1].reply_to.as_deref(), Some("a"));
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].line, 4);
    }

    #[test]
    fn unknown_format_is_config_error() {
        assert!(matches!("xml".parse::<LogFormat>(), Err(Error::Config(_))));
        assert_eq!("JSONL".parse::<LogFormat>().unwrap(), LogFormat::Jsonl);
    }

    #[test]
    fn invalid_utf8_is_fatal() {
        let bytes: &[u8] = b"{\"group_id\":\"\xff\"}\n";
        let err = parse_log(bytes, LogFormat::Jsonl, ParseOptions::default());
        assert!(matches!(err, Err(Error::Stream(_))));
    }

    #[test]
    fn empty_salt_rejected() {
        let opts = ParseOptions {
            assume_utc: false,
            salt: Some(String::new()),
        };
        assert!(matches!(LogParser::new(opts), Err(Error::Config(_))));
    }
}
