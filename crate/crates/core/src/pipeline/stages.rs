use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::manifest::PipelineManifest;
use crate::cascade::{build_all, Cascade};
use crate::error::{Error, Result};
use crate::falsehood::{
    apply_review, collect_docs, fetch_all, label_cascades, match_corpus, read_falsehood_labels,
    write_falsehood_labels, Factcheck, FalsehoodLabel, FalsehoodMatch, Fetcher, FixtureEntry,
    FixtureFetcher, HttpFetcher, MatchStatus, Preprocessor, UrlCacheEntry,
};
use crate::ingest::{
    read_labels, validate_corpus, Category, GroupLabel, LogFormat, LogParser, Message,
    MessageIndex, ParseOptions,
};
use crate::io::{create, open, read_jsonl, write_json, write_jsonl};
use crate::metrics::{
    compute_metrics, read_metrics_table, write_metrics_table, CascadeMetrics, MetricsRow,
};
use crate::motifs::{
    detect_motifs, read_motif_reports, user_graph, write_motif_reports, DetectOptions,
    SubgraphSemantics,
};
use crate::report::{emit_report, Bucket, ReportInput, ReportOptions};

pub const MESSAGES: &str = "messages.jsonl";
pub const INGEST_WARNINGS: &str = "ingest_warnings.jsonl";
pub const CORPUS_SUMMARY: &str = "corpus_summary.json";
pub const CASCADES: &str = "cascades.jsonl";
pub const CANDIDATES: &str = "candidates.jsonl";
pub const URL_CACHE: &str = "url_cache.jsonl";
pub const FALSEHOOD_LABELS: &str = "labels_f.csv";
pub const FALSEHOOD_SUMMARY: &str = "falsehood_summary.json";
pub const MOTIFS: &str = "motifs.csv";
pub const METRICS: &str = "metrics.csv";
pub const METRICS_DETAIL: &str = "metrics_detail.jsonl";
pub const REPORT_DIR: &str = "report";

/// What a stage produced.
#[derive(Debug, Clone, Serialize)]
pub struct StageOutcome {
    pub stage: String,
    pub outputs: Vec<PathBuf>,
    pub summary: serde_json::Value,
    /// Non-fatal problems, including stale-manifest notices.
    pub warnings: Vec<String>,
}

/// Runs `body` for `stage` with manifest bookkeeping in `out`.
fn with_manifest(
    stage: &str,
    out: &Path,
    inputs: &[PathBuf],
    parameters: serde_json::Value,
    body: impl FnOnce() -> Result<(Vec<PathBuf>, serde_json::Value, Vec<String>)>,
) -> Result<StageOutcome> {
    with_manifest_in(stage, out, out, inputs, parameters, body)
}

fn with_manifest_in(
    stage: &str,
    manifest_dir: &Path,
    out: &Path,
    inputs: &[PathBuf],
    parameters: serde_json::Value,
    body: impl FnOnce() -> Result<(Vec<PathBuf>, serde_json::Value, Vec<String>)>,
) -> Result<StageOutcome> {
    for input in inputs {
        if !input.exists() {
            return Err(Error::io(
                input,
                std::io::Error::new(std::io::ErrorKind::NotFound, "input file not found"),
            ));
        }
    }
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut manifest = PipelineManifest::load(manifest_dir)?;
    let mut warnings = manifest.stale_inputs(stage, inputs);
    let (outputs, summary, mut stage_warnings) = body()?;
    warnings.append(&mut stage_warnings);
    let files: Vec<PathBuf> = outputs.iter().filter(|p| p.is_file()).cloned().collect();
    warnings.extend(manifest.record(stage, inputs, parameters, &files)?);
    manifest.save(manifest_dir)?;
    for w in &warnings {
        log::warn!("{}", w);
    }
    Ok(StageOutcome {
        stage: stage.to_string(),
        outputs,
        summary,
        warnings,
    })
}

fn read_label_file(path: &Path) -> Result<Vec<GroupLabel>> {
    read_labels(open(path)?, &path.display().to_string())
}

fn format_for(path: &Path, explicit: Option<LogFormat>) -> LogFormat {
    explicit.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => LogFormat::Csv,
        _ => LogFormat::Jsonl,
    })
}

pub fn read_salt(path: &Path) -> Result<String> {
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let salt = raw.trim_end_matches(['\r', '\n']).to_string();
    if salt.is_empty() {
        return Err(Error::Config(format!(
            "salt file {} is empty",
            path.display()
        )));
    }
    Ok(salt)
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct IngestArgs {
    pub inputs: Vec<PathBuf>,
    /// Inferred from each file's extension when absent.
    pub format: Option<LogFormat>,
    pub labels: Option<PathBuf>,
    pub assume_utc: bool,
    pub salt_file: Option<PathBuf>,
}

/// Parses logs into `messages.jsonl`, with warnings and, given labels, a
/// validated corpus summary.
pub fn ingest(args: &IngestArgs, out: &Path) -> Result<StageOutcome> {
    let mut inputs = args.inputs.clone();
    inputs.extend(args.labels.clone());
    let params = json!({
        "format": args.format.map(|f| format!("{:?}", f).to_lowercase()),
        "assume_utc": args.assume_utc,
        "salted": args.salt_file.is_some(),
    });
    with_manifest("ingest", out, &inputs, params, || {
        let salt = args.salt_file.as_deref().map(read_salt).transpose()?;
        let mut parser = LogParser::new(ParseOptions {
            assume_utc: args.assume_utc,
            salt,
        })?;
        for input in &args.inputs {
            parser.feed(
                open(input)?,
                format_for(input, args.format),
                &input.display().to_string(),
            )?;
        }
        let (messages, warnings) = parser.finish();
        let msg_path = out.join(MESSAGES);
        let warn_path = out.join(INGEST_WARNINGS);
        write_jsonl(&msg_path, &messages)?;
        write_jsonl(&warn_path, &warnings)?;
        let mut outputs = vec![msg_path, warn_path];
        let summary = match &args.labels {
            Some(labels) => {
                let labels = read_label_file(labels)?;
                let summary = validate_corpus(&messages, &labels)?;
                let path = out.join(CORPUS_SUMMARY);
                write_json(&path, &summary)?;
                outputs.push(path);
                json!({
                    "n_groups": summary.n_groups,
                    "n_messages": summary.n_messages,
                    "n_users": summary.n_users,
                    "reply_edges": summary.reply_edges,
                    "dangling_replies": summary.dangling_replies,
                    "warnings": warnings.len(),
                })
            }
            None => json!({ "n_messages": messages.len(), "warnings": warnings.len() }),
        };
        let notes = warnings
            .iter()
            .take(20)
            .map(|w| format!("{}:{}: {:?}: {}", w.source, w.line, w.kind, w.detail))
            .collect();
        Ok((outputs, summary, notes))
    })
}

fn read_messages(path: &Path) -> Result<Vec<Message>> {
    read_jsonl(path)
}

fn read_cascades(path: &Path) -> Result<Vec<Cascade>> {
    read_jsonl(path)
}

/// Rebuilds reply trees into `cascades.jsonl`, sorted by cascade id.
pub fn cascades(messages: &Path, out: &Path) -> Result<StageOutcome> {
    with_manifest(
        "cascades",
        out,
        &[messages.to_path_buf()],
        json!({}),
        || {
            let msgs = read_messages(messages)?;
            let mut cs = build_all(&msgs)?;
            cs.sort_by(|a, b| a.cascade_id.cmp(&b.cascade_id));
            let path = out.join(CASCADES);
            write_jsonl(&path, &cs)?;
            let in_cascades: usize = cs.iter().map(Cascade::len).sum();
            Ok((
                vec![path],
                json!({ "n_cascades": cs.len(), "n_messages_in_cascades": in_cascades }),
                Vec::new(),
            ))
        },
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchArgs {
    pub messages: PathBuf,
    pub factchecks: PathBuf,
    pub url_cache: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub lemmas: Option<PathBuf>,
    pub threshold: f64,
}

fn preprocessor(stopwords: Option<&Path>, lemmas: Option<&Path>) -> Result<Preprocessor> {
    match (stopwords, lemmas) {
        (None, None) => Ok(Preprocessor::portuguese()),
        (Some(s), Some(l)) => Preprocessor::from_files(s, l),
        _ => Err(Error::Config(
            "stopword and lemma files must be given together".into(),
        )),
    }
}

/// Scores messages (and cached article texts) against fact-checks, writing
/// the review queue `candidates.jsonl`.
pub fn falsehood_match(args: &MatchArgs, out: &Path) -> Result<StageOutcome> {
    let mut inputs = vec![args.messages.clone(), args.factchecks.clone()];
    inputs.extend(args.url_cache.clone());
    inputs.extend(args.stopwords.clone());
    inputs.extend(args.lemmas.clone());
    if !(0.0..1.0).contains(&args.threshold) {
        return Err(Error::Config(format!(
            "threshold must lie in [0, 1), got {}",
            args.threshold
        )));
    }
    with_manifest(
        "falsehood_match",
        out,
        &inputs,
        json!({ "threshold": args.threshold }),
        || {
            let pre = preprocessor(args.stopwords.as_deref(), args.lemmas.as_deref())?;
            let msgs = read_messages(&args.messages)?;
            let factchecks: Vec<Factcheck> = read_jsonl(&args.factchecks)?;
            let cache: Vec<UrlCacheEntry> = match &args.url_cache {
                Some(p) => read_jsonl(p)?,
                None => Vec::new(),
            };
            let docs = collect_docs(&msgs, &cache);
            let found = match_corpus(&docs, &factchecks, &pre, args.threshold)?;
            let path = out.join(CANDIDATES);
            write_jsonl(&path, &found)?;
            Ok((
                vec![path],
                json!({
                    "n_documents": docs.len(),
                    "n_factchecks": factchecks.len(),
                    "n_candidates": found.len(),
                }),
                Vec::new(),
            ))
        },
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct FetchArgs {
    pub messages: PathBuf,
    /// Offline responses; without it URLs are fetched over HTTP.
    pub fixtures: Option<PathBuf>,
    pub timeout_secs: u64,
}

/// Fetches every linked URL once into `url_cache.jsonl`.
pub fn falsehood_fetch(args: &FetchArgs, out: &Path) -> Result<StageOutcome> {
    let mut inputs = vec![args.messages.clone()];
    inputs.extend(args.fixtures.clone());
    let params = json!({ "timeout_secs": args.timeout_secs, "offline": args.fixtures.is_some() });
    with_manifest("falsehood_fetch", out, &inputs, params, || {
        let msgs = read_messages(&args.messages)?;
        let fetcher: Box<dyn Fetcher> = match &args.fixtures {
            Some(p) => Box::new(FixtureFetcher::from_entries(read_jsonl::<FixtureEntry>(p)?)),
            None => Box::new(HttpFetcher::new(Duration::from_secs(args.timeout_secs))?),
        };
        let urls = msgs.iter().flat_map(|m| m.urls.iter().cloned());
        let cache = fetch_all(fetcher.as_ref(), urls);
        let failed = cache.iter().filter(|e| e.text.is_none()).count();
        let path = out.join(URL_CACHE);
        write_jsonl(&path, &cache)?;
        Ok((
            vec![path],
            json!({ "n_urls": cache.len(), "n_failed": failed }),
            Vec::new(),
        ))
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LabelArgs {
    pub cascades: PathBuf,
    pub messages: PathBuf,
    /// Reviewed queue; `None` leaves every cascade unclassified.
    pub review: Option<PathBuf>,
    /// Original queue the review was made from, checked against it.
    pub candidates: Option<PathBuf>,
    /// Treat every still-pending candidate as confirmed.
    pub confirm_all: bool,
}

/// Labels cascades from confirmed matches into `labels_f.csv`.
pub fn falsehood_label(args: &LabelArgs, out: &Path) -> Result<StageOutcome> {
    let mut inputs = vec![args.cascades.clone(), args.messages.clone()];
    inputs.extend(args.review.clone());
    inputs.extend(args.candidates.clone());
    with_manifest(
        "falsehood_label",
        out,
        &inputs,
        json!({ "confirm_all": args.confirm_all }),
        || {
            let cs = read_cascades(&args.cascades)?;
            let msgs = read_messages(&args.messages)?;
            let mut notes = Vec::new();
            let mut matches: Vec<FalsehoodMatch> = match &args.review {
                Some(p) => read_jsonl(p)?,
                None => {
                    notes.push("no review file given: all cascades left unclassified".to_string());
                    Vec::new()
                }
            };
            if let Some(c) = &args.candidates {
                let queue: Vec<FalsehoodMatch> = read_jsonl(c)?;
                matches = apply_review(&queue, &matches)?;
            }
            if args.confirm_all {
                let mut n = 0;
                for m in matches
                    .iter_mut()
                    .filter(|m| m.status == MatchStatus::Candidate)
                {
                    m.status = MatchStatus::Confirmed;
                    n += 1;
                }
                if n > 0 {
                    notes.push(format!("{} candidates confirmed without human review", n));
                }
            }
            let outcome = label_cascades(&cs, &matches, &MessageIndex::new(&msgs))?;
            let labels_path = out.join(FALSEHOOD_LABELS);
            let mut w = create(&labels_path)?;
            write_falsehood_labels(&mut w, &outcome.labels)?;
            w.flush().map_err(|e| Error::io(&labels_path, e))?;
            let summary = json!({
                "n_cascades": cs.len(),
                "n_confirmed_matches": matches.iter().filter(|m| m.status == MatchStatus::Confirmed).count(),
                "n_falsehood_cascades": outcome.n_falsehood,
                "n_root_matched": outcome.n_root_matched,
                "root_matched_fraction": outcome.root_matched_fraction(),
            });
            let summary_path = out.join(FALSEHOOD_SUMMARY);
            write_json(&summary_path, &summary)?;
            Ok((vec![labels_path, summary_path], summary, notes))
        },
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct MotifArgs {
    pub cascades: PathBuf,
    pub messages: PathBuf,
    pub max_n: Option<usize>,
    pub semantics: SubgraphSemantics,
}

/// Detects motifs per cascade into `motifs.csv`.
pub fn motifs(args: &MotifArgs, out: &Path) -> Result<StageOutcome> {
    let inputs = [args.cascades.clone(), args.messages.clone()];
    let params = json!({ "max_n": args.max_n, "semantics": args.semantics });
    with_manifest("motifs", out, &inputs, params, || {
        let cs = read_cascades(&args.cascades)?;
        let msgs = read_messages(&args.messages)?;
        let index = MessageIndex::new(&msgs);
        let options = DetectOptions {
            max_n: args.max_n,
            semantics: args.semantics,
        };
        let mut reports = cs
            .par_iter()
            .map(|c| Ok(detect_motifs(&user_graph(c, &index)?, options)))
            .collect::<Result<Vec<_>>>()?;
        reports.sort_by(|a, b| a.cascade_id.cmp(&b.cascade_id));
        let path = out.join(MOTIFS);
        let mut w = create(&path)?;
        write_motif_reports(&mut w, &reports)?;
        w.flush().map_err(|e| Error::io(&path, e))?;
        let mut presence = BTreeMap::new();
        for r in &reports {
            for m in r.present() {
                *presence.entry(m.as_str()).or_insert(0usize) += 1;
            }
        }
        Ok((
            vec![path],
            json!({ "n_cascades": reports.len(), "presence": presence }),
            Vec::new(),
        ))
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsArgs {
    pub cascades: PathBuf,
    pub messages: PathBuf,
    pub labels: PathBuf,
    /// Cascades absent from it (or all, when `None`) are unclassified.
    pub falsehood: Option<PathBuf>,
}

fn category_map(labels: &[GroupLabel]) -> HashMap<&str, Category> {
    labels
        .iter()
        .map(|l| (l.group_id.as_str(), l.category))
        .collect()
}

/// Computes `metrics.csv` and the per-cascade detail file.
pub fn metrics(args: &MetricsArgs, out: &Path) -> Result<StageOutcome> {
    let mut inputs = vec![
        args.cascades.clone(),
        args.messages.clone(),
        args.labels.clone(),
    ];
    inputs.extend(args.falsehood.clone());
    with_manifest("metrics", out, &inputs, json!({}), || {
        let cs = read_cascades(&args.cascades)?;
        let msgs = read_messages(&args.messages)?;
        let labels = read_label_file(&args.labels)?;
        let categories = category_map(&labels);
        let falsehood = match &args.falsehood {
            Some(p) => read_falsehood_labels(open(p)?, &p.display().to_string())?,
            None => BTreeMap::new(),
        };
        let mut unlabeled: Vec<&str> = cs
            .iter()
            .map(|c| c.group_id.as_str())
            .filter(|g| !categories.contains_key(g))
            .collect();
        unlabeled.sort_unstable();
        unlabeled.dedup();
        if !unlabeled.is_empty() {
            return Err(Error::Validation(format!(
                "groups without a label in {}: {}",
                args.labels.display(),
                unlabeled.join(", ")
            )));
        }
        let index = MessageIndex::new(&msgs);
        let mut detail = cs
            .par_iter()
            .map(|c| compute_metrics(c, &index))
            .collect::<Result<Vec<CascadeMetrics>>>()?;
        detail.sort_by(|a, b| a.cascade_id.cmp(&b.cascade_id));
        let rows: Vec<MetricsRow> = detail
            .iter()
            .map(|m| {
                let label = falsehood
                    .get(&m.cascade_id)
                    .copied()
                    .unwrap_or(FalsehoodLabel::Unclassified);
                MetricsRow::new(m, categories[m.group_id.as_str()], label)
            })
            .collect();
        let table = out.join(METRICS);
        let mut w = create(&table)?;
        write_metrics_table(&mut w, &rows)?;
        w.flush().map_err(|e| Error::io(&table, e))?;
        let detail_path = out.join(METRICS_DETAIL);
        write_jsonl(&detail_path, &detail)?;
        Ok((
            vec![table, detail_path],
            json!({ "n_cascades": rows.len() }),
            Vec::new(),
        ))
    })
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ReportArgs {
    pub metrics: PathBuf,
    /// Group labels overriding the table's category column.
    pub labels: Option<PathBuf>,
    /// Cascade labels overriding the table's falsehood column.
    pub falsehood: Option<PathBuf>,
    pub detail: Option<PathBuf>,
    pub cascades: Option<PathBuf>,
    pub motifs: Option<PathBuf>,
    pub bucket: Bucket,
}

/// Emits the report tree into `out`.
pub fn report(args: &ReportArgs, out: &Path) -> Result<StageOutcome> {
    report_in(args, out, out)
}

fn report_in(args: &ReportArgs, out: &Path, manifest_dir: &Path) -> Result<StageOutcome> {
    let mut inputs = vec![args.metrics.clone()];
    for p in [
        &args.labels,
        &args.falsehood,
        &args.detail,
        &args.cascades,
        &args.motifs,
    ]
    .into_iter()
    .flatten()
    {
        inputs.push(p.clone());
    }
    with_manifest_in(
        "report",
        manifest_dir,
        out,
        &inputs,
        json!({ "bucket": args.bucket }),
        || {
            let mut rows =
                read_metrics_table(open(&args.metrics)?, &args.metrics.display().to_string())?;
            if let Some(p) = &args.labels {
                let labels = read_label_file(p)?;
                let categories = category_map(&labels);
                for r in &mut rows {
                    r.category = *categories.get(r.group_id.as_str()).ok_or_else(|| {
                        Error::Validation(format!(
                            "group {} has no label in {}",
                            r.group_id,
                            p.display()
                        ))
                    })?;
                }
            }
            if let Some(p) = &args.falsehood {
                let labels = read_falsehood_labels(open(p)?, &p.display().to_string())?;
                for r in &mut rows {
                    r.falsehood = *labels.get(&r.cascade_id).ok_or_else(|| {
                        Error::Data(format!(
                            "cascade {} has no falsehood label in {}",
                            r.cascade_id,
                            p.display()
                        ))
                    })?;
                }
            }
            let input = ReportInput {
                rows,
                detail: args.detail.as_deref().map(read_jsonl).transpose()?,
                cascades: args.cascades.as_deref().map(read_cascades).transpose()?,
                motifs: args
                    .motifs
                    .as_deref()
                    .map(|p| read_motif_reports(open(p)?, &p.display().to_string()))
                    .transpose()?,
            };
            let summary = emit_report(
                &input,
                &ReportOptions {
                    bucket: args.bucket,
                },
                out,
            )?;
            let outputs = summary.outputs.iter().map(|rel| out.join(rel)).collect();
            Ok((
                outputs,
                serde_json::to_value(&summary)?,
                summary.notices.clone(),
            ))
        },
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineArgs {
    pub ingest: IngestArgs,
    /// Required by the metrics stage.
    pub labels: PathBuf,
    pub factchecks: Option<PathBuf>,
    pub url_cache: Option<PathBuf>,
    pub review: Option<PathBuf>,
    pub confirm_all: bool,
    pub threshold: f64,
    pub stopwords: Option<PathBuf>,
    pub lemmas: Option<PathBuf>,
    pub max_n: Option<usize>,
    pub semantics: SubgraphSemantics,
    pub bucket: Bucket,
}

/// Runs every stage in order into `out`, the report under `out/report`.
pub fn pipeline(args: &PipelineArgs, out: &Path) -> Result<Vec<StageOutcome>> {
    let mut done = Vec::new();
    let mut ingest_args = args.ingest.clone();
    ingest_args.labels = Some(args.labels.clone());
    done.push(ingest(&ingest_args, out)?);
    let messages = out.join(MESSAGES);
    done.push(cascades(&messages, out)?);
    let cascades_path = out.join(CASCADES);

    let (review, candidates) = match &args.factchecks {
        Some(factchecks) => {
            done.push(falsehood_match(
                &MatchArgs {
                    messages: messages.clone(),
                    factchecks: factchecks.clone(),
                    url_cache: args.url_cache.clone(),
                    stopwords: args.stopwords.clone(),
                    lemmas: args.lemmas.clone(),
                    threshold: args.threshold,
                },
                out,
            )?);
            let queue = out.join(CANDIDATES);
            match &args.review {
                Some(r) => (Some(r.clone()), Some(queue)),
                None if args.confirm_all => (Some(queue), None),
                None => (None, None),
            }
        }
        None => (args.review.clone(), None),
    };
    done.push(falsehood_label(
        &LabelArgs {
            cascades: cascades_path.clone(),
            messages: messages.clone(),
            review,
            candidates,
            confirm_all: args.confirm_all,
        },
        out,
    )?);
    done.push(motifs(
        &MotifArgs {
            cascades: cascades_path.clone(),
            messages: messages.clone(),
            max_n: args.max_n,
            semantics: args.semantics,
        },
        out,
    )?);
    done.push(metrics(
        &MetricsArgs {
            cascades: cascades_path.clone(),
            messages,
            labels: args.labels.clone(),
            falsehood: Some(out.join(FALSEHOOD_LABELS)),
        },
        out,
    )?);
    done.push(report_in(
        &ReportArgs {
            metrics: out.join(METRICS),
            labels: None,
            falsehood: None,
            detail: Some(out.join(METRICS_DETAIL)),
            cascades: Some(cascades_path),
            motifs: Some(out.join(MOTIFS)),
            bucket: args.bucket,
        },
        &out.join(REPORT_DIR),
        out,
    )?);
    Ok(done)
}

pub const SYNTH_FACTCHECKS: &str = "factchecks.jsonl";
pub const SYNTH_LABELS: &str = "labels.csv";
pub const SYNTH_PLANTED: &str = "planted.jsonl";

#[derive(Debug, Clone, Serialize)]
pub struct SynthArgs {
    /// JSON config; defaults apply when absent.
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    /// Corpus JSONL; fact-checks, labels and planted matches go next to it.
    pub corpus: PathBuf,
    pub truth: Option<PathBuf>,
    pub semantics: SubgraphSemantics,
}

/// Generates a synthetic corpus with its ground truth.
pub fn synth(args: &SynthArgs) -> Result<StageOutcome> {
    let dir = match args.corpus.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let inputs: Vec<PathBuf> = args.config.iter().cloned().collect();
    let params = json!({ "seed": args.seed, "semantics": args.semantics });
    with_manifest("synth", &dir, &inputs, params, || {
        let mut cfg: crate::synth::SynthConfig = match &args.config {
            Some(p) => crate::io::read_json(p)?,
            None => Default::default(),
        };
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        }
        let corpus = crate::synth::generate(&cfg)?;
        write_jsonl(&args.corpus, &corpus.messages)?;
        let fc_path = dir.join(SYNTH_FACTCHECKS);
        write_jsonl(&fc_path, &corpus.factchecks)?;
        let planted_path = dir.join(SYNTH_PLANTED);
        write_jsonl(&planted_path, &corpus.planted)?;
        let labels_path = dir.join(SYNTH_LABELS);
        let mut w = create(&labels_path)?;
        crate::ingest::write_labels(&mut w, &corpus.labels)?;
        w.flush().map_err(|e| Error::io(&labels_path, e))?;
        let mut outputs = vec![args.corpus.clone(), fc_path, planted_path, labels_path];
        let mut notes = Vec::new();
        if corpus.capped_trees > 0 {
            notes.push(format!(
                "{} trees reached max_nodes={} and were cut short",
                corpus.capped_trees, cfg.max_nodes
            ));
        }
        let mut summary = json!({
            "seed": cfg.seed,
            "n_messages": corpus.messages.len(),
            "n_groups": corpus.labels.len(),
            "n_planted": corpus.planted.len(),
            "capped_trees": corpus.capped_trees,
        });
        if let Some(truth_path) = &args.truth {
            let truth = crate::synth::ground_truth(&corpus, cfg.seed, args.semantics);
            summary["n_cascades"] = json!(truth.cascades.len());
            write_json(truth_path, &truth)?;
            outputs.push(truth_path.clone());
        }
        Ok((outputs, summary, notes))
    })
}
