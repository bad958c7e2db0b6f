//! `cascades`: command-line front-end for the cascade analysis stages.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cascade_core::ingest::LogFormat;
use cascade_core::motifs::SubgraphSemantics;
use cascade_core::pipeline::{self, StageOutcome};
use cascade_core::report::Bucket;

#[derive(Parser, Debug)]
#[command(
    name = "cascades",
    version,
    about = "Reply-cascade analysis for group-chat logs"
)]
struct Cli {
    /// Worker threads for stage-internal parallelism (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output directory for stage artifacts and the manifest.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    #[arg(long, global = true, default_value = "info")]
    log_level: log::LevelFilter,

    /// How stage summaries are printed on stdout.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse chat exports into normalized messages.
    Ingest(IngestCmd),
    /// Rebuild reply trees from normalized messages.
    Cascades {
        #[arg(long)]
        messages: PathBuf,
    },
    /// Per-cascade metrics table.
    Metrics(MetricsCmd),
    /// Motif presence per cascade.
    Motifs(MotifsCmd),
    /// Fact-check matching, article fetching and cascade labeling.
    #[command(subcommand)]
    Falsehood(FalsehoodCmd),
    /// CCDFs, profiles, time series, figures and summary.
    Report(ReportCmd),
    /// Generate a synthetic corpus with ground truth.
    Synth(SynthCmd),
    /// Run every analysis stage in order.
    Pipeline(PipelineCmd),
}

#[derive(Args, Debug)]
struct IngestArgsCli {
    /// Chat export files (JSONL or CSV).
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Input format; inferred from the extension when omitted.
    #[arg(long = "input-format")]
    input_format: Option<LogFormat>,
    /// Treat timestamps without an offset as UTC.
    #[arg(long)]
    assume_utc: bool,
    /// File holding the secret used to pseudonymize raw user keys.
    #[arg(long)]
    salt_file: Option<PathBuf>,
}

impl IngestArgsCli {
    fn to_args(&self, labels: Option<PathBuf>) -> pipeline::IngestArgs {
        pipeline::IngestArgs {
            inputs: self.inputs.clone(),
            format: self.input_format,
            labels,
            assume_utc: self.assume_utc,
            salt_file: self.salt_file.clone(),
        }
    }
}

#[derive(Args, Debug)]
struct IngestCmd {
    #[command(flatten)]
    common: IngestArgsCli,
    /// Group labels CSV; validates the corpus against it when given.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MetricsCmd {
    #[arg(long)]
    cascades: PathBuf,
    #[arg(long)]
    messages: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    /// Cascade falsehood labels; unclassified when omitted.
    #[arg(long)]
    falsehood: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MotifsCmd {
    #[arg(long)]
    cascades: PathBuf,
    #[arg(long)]
    messages: PathBuf,
    /// Skip motif search on user graphs with more vertices.
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long, default_value = "induced")]
    semantics: SubgraphSemantics,
}

#[derive(Subcommand, Debug)]
enum FalsehoodCmd {
    /// Score messages against fact-checks into a review queue.
    Match {
        #[arg(long)]
        messages: PathBuf,
        #[arg(long)]
        factchecks: PathBuf,
        #[arg(long)]
        url_cache: Option<PathBuf>,
        #[arg(long, default_value_t = cascade_core::falsehood::DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long, requires = "lemmas")]
        stopwords: Option<PathBuf>,
        #[arg(long, requires = "stopwords")]
        lemmas: Option<PathBuf>,
    },
    /// Fetch linked articles into a URL cache.
    Fetch {
        #[arg(long)]
        messages: PathBuf,
        /// Offline fixture responses (JSONL) instead of HTTP.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        timeout_secs: u64,
    },
    /// Label cascades from reviewed matches.
    Label {
        #[arg(long)]
        cascades: PathBuf,
        #[arg(long)]
        messages: PathBuf,
        /// Reviewed matches (JSONL).
        #[arg(long)]
        review: Option<PathBuf>,
        /// Queue the review was made from; checked for consistency.
        #[arg(long)]
        candidates: Option<PathBuf>,
        /// Confirm all still-pending candidates.
        #[arg(long)]
        confirm_all: bool,
    },
}

#[derive(Args, Debug)]
struct ReportCmd {
    #[arg(long)]
    metrics: PathBuf,
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    falsehood: Option<PathBuf>,
    /// Per-cascade detail (JSONL) for profiles.
    #[arg(long)]
    detail: Option<PathBuf>,
    /// Cascade dump for the overlap statistics.
    #[arg(long)]
    cascades: Option<PathBuf>,
    /// Motif CSV for frequency tables.
    #[arg(long)]
    motifs: Option<PathBuf>,
    #[arg(long, default_value = "day")]
    bucket: Bucket,
}

#[derive(Args, Debug)]
struct SynthCmd {
    /// JSON generator config; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the ground truth to `truth.json`.
    #[arg(long)]
    truth: bool,
    #[arg(long, default_value = "induced")]
    semantics: SubgraphSemantics,
}

#[derive(Args, Debug)]
struct PipelineCmd {
    #[command(flatten)]
    common: IngestArgsCli,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    factchecks: Option<PathBuf>,
    #[arg(long)]
    url_cache: Option<PathBuf>,
    #[arg(long)]
    review: Option<PathBuf>,
    #[arg(long)]
    confirm_all: bool,
    #[arg(long, default_value_t = cascade_core::falsehood::DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long, requires = "lemmas")]
    stopwords: Option<PathBuf>,
    #[arg(long, requires = "stopwords")]
    lemmas: Option<PathBuf>,
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long, default_value = "induced")]
    semantics: SubgraphSemantics,
    #[arg(long, default_value = "day")]
    bucket: Bucket,
}

fn run(cli: &Cli) -> Result<Vec<StageOutcome>> {
    let out = &cli.out;
    let one = |r: cascade_core::Result<StageOutcome>| r.map(|o| vec![o]);
    let outcomes = match &cli.command {
        Command::Ingest(c) => one(pipeline::ingest(&c.common.to_args(c.labels.clone()), out)),
        Command::Cascades { messages } => one(pipeline::cascades(messages, out)),
        Command::Metrics(c) => one(pipeline::metrics(
            &pipeline::MetricsArgs {
                cascades: c.cascades.clone(),
                messages: c.messages.clone(),
                labels: c.labels.clone(),
                falsehood: c.falsehood.clone(),
            },
            out,
        )),
        Command::Motifs(c) => one(pipeline::motifs(
            &pipeline::MotifArgs {
                cascades: c.cascades.clone(),
                messages: c.messages.clone(),
                max_n: c.max_n,
                semantics: c.semantics,
            },
            out,
        )),
        Command::Falsehood(FalsehoodCmd::Match {
            messages,
            factchecks,
            url_cache,
            threshold,
            stopwords,
            lemmas,
        }) => one(pipeline::falsehood_match(
            &pipeline::MatchArgs {
                messages: messages.clone(),
                factchecks: factchecks.clone(),
                url_cache: url_cache.clone(),
                stopwords: stopwords.clone(),
                lemmas: lemmas.clone(),
                threshold: *threshold,
            },
            out,
        )),
        Command::Falsehood(FalsehoodCmd::Fetch {
            messages,
            fixtures,
            timeout_secs,
        }) => one(pipeline::falsehood_fetch(
            &pipeline::FetchArgs {
                messages: messages.clone(),
                fixtures: fixtures.clone(),
                timeout_secs: *timeout_secs,
            },
            out,
        )),
        Command::Falsehood(FalsehoodCmd::Label {
            cascades,
            messages,
            review,
            candidates,
            confirm_all,
        }) => one(pipeline::falsehood_label(
            &pipeline::LabelArgs {
                cascades: cascades.clone(),
                messages: messages.clone(),
                review: review.clone(),
                candidates: candidates.clone(),
                confirm_all: *confirm_all,
            },
            out,
        )),
        Command::Report(c) => one(pipeline::report(
            &pipeline::ReportArgs {
                metrics: c.metrics.clone(),
                labels: c.labels.clone(),
                falsehood: c.falsehood.clone(),
                detail: c.detail.clone(),
                cascades: c.cascades.clone(),
                motifs: c.motifs.clone(),
                bucket: c.bucket,
            },
            out,
        )),
        Command::Synth(c) => {
            std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
            one(pipeline::synth(&pipeline::SynthArgs {
                config: c.config.clone(),
                seed: c.seed,
                corpus: out.join("corpus.jsonl"),
                truth: c.truth.then(|| out.join("truth.json")),
                semantics: c.semantics,
            }))
        }
        Command::Pipeline(c) => pipeline::pipeline(
            &pipeline::PipelineArgs {
                ingest: c.common.to_args(None),
                labels: c.labels.clone(),
                factchecks: c.factchecks.clone(),
                url_cache: c.url_cache.clone(),
                review: c.review.clone(),
                confirm_all: c.confirm_all,
                threshold: c.threshold,
                stopwords: c.stopwords.clone(),
                lemmas: c.lemmas.clone(),
                max_n: c.max_n,
                semantics: c.semantics,
                bucket: c.bucket,
            },
            out,
        ),
    };
    Ok(outcomes?)
}

fn print(outcomes: &[StageOutcome], format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Json => {
            let v = if outcomes.len() == 1 {
                serde_json::to_string_pretty(&outcomes[0])?
            } else {
                serde_json::to_string_pretty(outcomes)?
            };
            println!("{}", v);
        }
        OutputFormat::Text => {
            for o in outcomes {
                println!("{}: {}", o.stage, o.summary);
                for p in &o.outputs {
                    println!("  wrote {}", p.display());
                }
            }
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(cli.log_level)
        .format_timestamp(None)
        .init();
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let outcomes = run(&cli)?;
    print(&outcomes, cli.format)
}
