use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::ccdf::ccdf;
use super::class::{CascadeClass, Segment};
use super::overlap::{overlap_stats, OverlapCounts};
use super::series::{daily_counts, Bucket};
use super::svg::{BarChart, LinePlot, PlotSeries};
use crate::cascade::Cascade;
use crate::error::{Error, Result};
use crate::io::{create, fmt_f64, write_json};
use crate::metrics::{CascadeMetrics, MetricsRow, ProfileAccumulator, ProfileX, ProfileY};
use crate::motifs::{motif_frequencies, Motif, MotifReport};

/// Upstream artifacts the report is built from. Everything except the
/// metrics table is optional; missing inputs skip their outputs.
#[derive(Debug, Clone, Default)]
pub struct ReportInput {
    pub rows: Vec<MetricsRow>,
    /// Per-cascade detail: root time, profiles.
    pub detail: Option<Vec<CascadeMetrics>>,
    pub cascades: Option<Vec<Cascade>>,
    pub motifs: Option<Vec<MotifReport>>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ReportOptions {
    pub bucket: Bucket,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportSummary {
    pub n_groups: usize,
    pub n_cascades: usize,
    pub n_messages_in_cascades: usize,
    /// Cascade count per segment.
    pub cascades_by_segment: BTreeMap<String, usize>,
    pub falsehood_groups: usize,
    pub overlap: Option<OverlapSummary>,
    pub bucket: Bucket,
    /// Outputs that were skipped and why.
    pub notices: Vec<String>,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapSummary {
    pub pairs: u64,
    pub disjoint_pairs: u64,
    pub disjoint_fraction: Option<f64>,
}

const CCDF_ATTRIBUTES: [(&str, fn(&MetricsRow) -> f64); 6] = [
    ("depth", |r| r.depth as f64),
    ("max_breadth", |r| r.max_breadth as f64),
    ("structural_virality", |r| r.structural_virality),
    ("n_nodes", |r| r.n_nodes as f64),
    ("duration_minutes", |r| r.duration_minutes),
    ("n_unique_users", |r| r.n_unique_users as f64),
];

struct Emitter<'a> {
    dir: &'a Path,
    outputs: Vec<String>,
    notices: Vec<String>,
}

impl Emitter<'_> {
    fn csv(&mut self, rel: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let path = self.dir.join(rel);
        let mut wtr = csv::Writer::from_writer(create(&path)?);
        wtr.write_record(header)?;
        for r in rows {
            wtr.write_record(r)?;
        }
        wtr.flush().map_err(|e| Error::io(&path, e))?;
        self.outputs.push(rel.to_string());
        Ok(())
    }

    fn svg(&mut self, rel: &str, content: &str) -> Result<()> {
        let path = self.dir.join(rel);
        let mut f = create(&path)?;
        f.write_all(content.as_bytes())
            .and_then(|_| f.flush())
            .map_err(|e| Error::io(&path, e))?;
        self.outputs.push(rel.to_string());
        Ok(())
    }

    fn notice(&mut self, msg: String) {
        log::info!("{}", msg);
        self.notices.push(msg);
    }
}

fn class_of(row: &MetricsRow) -> CascadeClass {
    CascadeClass::new(row.category, row.falsehood)
}

/// Writes the CSV tables, SVG figures and `summary.json` under `out_dir`.
pub fn emit_report(
    input: &ReportInput,
    options: &ReportOptions,
    out_dir: &Path,
) -> Result<ReportSummary> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut rows = input.rows.clone();
    rows.sort_by(|a, b| a.cascade_id.cmp(&b.cascade_id));
    if let Some(w) = rows.windows(2).find(|w| w[0].cascade_id == w[1].cascade_id) {
        return Err(Error::Validation(format!(
            "cascade {} appears twice in the metrics table",
            w[0].cascade_id
        )));
    }
    let classes: HashMap<&str, CascadeClass> = rows
        .iter()
        .map(|r| (r.cascade_id.as_str(), class_of(r)))
        .collect();
    let lookup = |id: &str, what: &str| {
        classes.get(id).copied().ok_or_else(|| {
            Error::Data(format!(
                "{} refers to cascade {} missing from the metrics table",
                what, id
            ))
        })
    };
    let segments = Segment::all();
    let figure_classes: Vec<Segment> = CascadeClass::ALL.map(Segment::Class).to_vec();
    let mut em = Emitter {
        dir: out_dir,
        outputs: Vec::new(),
        notices: Vec::new(),
    };

    // CCDFs
    for (attr, value) in CCDF_ATTRIBUTES {
        let mut series = Vec::new();
        for seg in &segments {
            let values: Vec<f64> = rows
                .iter()
                .filter(|r| seg.contains(class_of(r)))
                .map(value)
                .collect();
            if values.is_empty() {
                em.notice(format!(
                    "ccdf/{}_{}: no cascades in segment, omitted",
                    attr, seg
                ));
                continue;
            }
            let points = ccdf(&values)?;
            let n = values.len().to_string();
            let table: Vec<Vec<String>> = points
                .iter()
                .map(|p| vec![fmt_f64(p.x), fmt_f64(p.p), n.clone()])
                .collect();
            em.csv(
                &format!("ccdf/{}_{}.csv", attr, seg),
                &["x", "ccdf", "n"],
                &table,
            )?;
            if figure_classes.contains(seg) {
                series.push(PlotSeries {
                    name: seg.name(),
                    points: points.iter().map(|p| (p.x, p.p)).collect(),
                });
            }
        }
        if series.is_empty() {
            em.notice(format!("figures/ccdf_{}.svg: no data, omitted", attr));
        } else {
            let plot = LinePlot {
                title: format!("CCDF of {}", attr),
                x_label: attr.to_string(),
                y_label: "P(X >= x)".into(),
                log_x: true,
                log_y: true,
                step: true,
                series,
            };
            em.svg(&format!("figures/ccdf_{}.svg", attr), &plot.render())?;
        }
    }

    // profiles and time series need per-cascade detail
    match &input.detail {
        None => em.notice("profiles and time series skipped: no cascade detail given".into()),
        Some(detail) => {
            let mut detail: Vec<&CascadeMetrics> = detail.iter().collect();
            detail.sort_by(|a, b| a.cascade_id.cmp(&b.cascade_id));
            let mut seen = HashSet::new();
            let mut detail_classes = Vec::with_capacity(detail.len());
            for d in &detail {
                if !seen.insert(d.cascade_id.as_str()) {
                    return Err(Error::Validation(format!(
                        "cascade {} appears twice in the detail file",
                        d.cascade_id
                    )));
                }
                detail_classes.push(lookup(&d.cascade_id, "cascade detail")?);
            }
            if let Some(r) = rows.iter().find(|r| !seen.contains(r.cascade_id.as_str())) {
                return Err(Error::Data(format!(
                    "cascade {} has no detail record",
                    r.cascade_id
                )));
            }
            emit_profiles(
                &mut em,
                &detail,
                &detail_classes,
                &segments,
                &figure_classes,
            )?;
            emit_timeseries(
                &mut em,
                &detail,
                &detail_classes,
                options.bucket,
                &segments,
                &figure_classes,
            )?;
        }
    }

    // temporal overlap
    let overlap = match &input.cascades {
        None => {
            em.notice("overlap statistics skipped: no cascades given".into());
            None
        }
        Some(cs) => {
            for c in cs {
                lookup(&c.cascade_id, "cascade file")?;
            }
            let stats = overlap_stats(cs);
            let mut table: Vec<Vec<String>> = stats
                .per_group
                .iter()
                .map(|(g, c)| overlap_row(g, c))
                .collect();
            table.push(overlap_row("*", &stats.corpus));
            em.csv(
                "overlap.csv",
                &[
                    "group_id",
                    "n_cascades",
                    "pairs",
                    "disjoint_pairs",
                    "disjoint_fraction",
                ],
                &table,
            )?;
            Some(OverlapSummary {
                pairs: stats.corpus.pairs,
                disjoint_pairs: stats.corpus.disjoint_pairs,
                disjoint_fraction: stats.corpus.fraction(),
            })
        }
    };

    // motif frequencies
    match &input.motifs {
        None => em.notice("motif frequencies skipped: no motif report given".into()),
        Some(reports) => {
            let mut report_classes = HashMap::new();
            for r in reports {
                report_classes.insert(
                    r.cascade_id.as_str(),
                    lookup(&r.cascade_id, "motif report")?,
                );
            }
            let mut table = Vec::new();
            let mut bars = Vec::new();
            for seg in &segments {
                let freq = motif_frequencies(reports, |r| {
                    seg.contains(report_classes[r.cascade_id.as_str()])
                        .then_some(())
                });
                let Some(f) = freq.get(&()) else {
                    em.notice(format!(
                        "motifs: segment {} has no motif occurrences, omitted",
                        seg
                    ));
                    continue;
                };
                for m in Motif::ALL {
                    table.push(vec![
                        seg.name(),
                        m.as_str().to_string(),
                        f.presence[m.index()].to_string(),
                        f.total_presence().to_string(),
                        f.n_cascades.to_string(),
                        fmt_f64(f.relative_of(m)),
                    ]);
                }
                if figure_classes.contains(seg) {
                    bars.push(PlotSeries {
                        name: seg.name(),
                        points: Motif::ALL
                            .iter()
                            .enumerate()
                            .map(|(i, m)| (i as f64, f.relative_of(*m)))
                            .collect(),
                    });
                }
            }
            em.csv(
                "motifs/frequencies.csv",
                &[
                    "segment",
                    "motif",
                    "presence",
                    "total_presence",
                    "n_cascades",
                    "relative",
                ],
                &table,
            )?;
            if bars.is_empty() {
                em.notice("figures/motifs.svg: no data, omitted".into());
            } else {
                let chart = BarChart {
                    title: "Relative motif frequency".into(),
                    y_label: "share of motif presences".into(),
                    categories: Motif::ALL.iter().map(|m| m.as_str().to_string()).collect(),
                    series: bars,
                };
                em.svg("figures/motifs.svg", &chart.render())?;
            }
        }
    }

    let cascades_by_segment = segments
        .iter()
        .map(|s| {
            (
                s.name(),
                rows.iter().filter(|r| s.contains(class_of(r))).count(),
            )
        })
        .collect();
    let groups: HashSet<&str> = rows.iter().map(|r| r.group_id.as_str()).collect();
    let falsehood_groups: HashSet<&str> = rows
        .iter()
        .filter(|r| r.falsehood == crate::falsehood::FalsehoodLabel::Falsehood)
        .map(|r| r.group_id.as_str())
        .collect();
    em.outputs.push("summary.json".into());
    em.outputs.sort();
    let summary = ReportSummary {
        n_groups: groups.len(),
        n_cascades: rows.len(),
        n_messages_in_cascades: rows.iter().map(|r| r.n_nodes).sum(),
        cascades_by_segment,
        falsehood_groups: falsehood_groups.len(),
        overlap,
        bucket: options.bucket,
        notices: em.notices,
        outputs: em.outputs,
    };
    write_json(&out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

fn overlap_row(group: &str, c: &OverlapCounts) -> Vec<String> {
    vec![
        group.to_string(),
        c.n_cascades.to_string(),
        c.pairs.to_string(),
        c.disjoint_pairs.to_string(),
        c.fraction().map(fmt_f64).unwrap_or_default(),
    ]
}

fn emit_profiles(
    em: &mut Emitter<'_>,
    detail: &[&CascadeMetrics],
    classes: &[CascadeClass],
    segments: &[Segment],
    figure_classes: &[Segment],
) -> Result<()> {
    for x in ProfileX::ALL {
        for y in ProfileY::ALL.into_iter().filter(|y| y.applies_to(x)) {
            let name = format!("{}_{}", x.as_str(), y.as_str());
            let mut series = Vec::new();
            for seg in segments {
                let mut acc = ProfileAccumulator::new();
                for (d, c) in detail.iter().zip(classes) {
                    if seg.contains(*c) {
                        acc.add(d, x, y);
                    }
                }
                let bins = acc.finish();
                if bins.is_empty() {
                    em.notice(format!(
                        "profiles/{}_{}: no cascades with a non-zero range, omitted",
                        name, seg
                    ));
                    continue;
                }
                let table: Vec<Vec<String>> = bins
                    .iter()
                    .map(|b| {
                        vec![
                            b.bin_pct.to_string(),
                            fmt_f64(b.mean),
                            fmt_f64(b.stderr),
                            b.n.to_string(),
                        ]
                    })
                    .collect();
                em.csv(
                    &format!("profiles/{}_{}.csv", name, seg),
                    &["bin_pct", "mean", "stderr", "n"],
                    &table,
                )?;
                if figure_classes.contains(seg) {
                    series.push(PlotSeries {
                        name: seg.name(),
                        points: bins.iter().map(|b| (b.bin_pct as f64, b.mean)).collect(),
                    });
                }
            }
            if series.is_empty() {
                em.notice(format!("figures/profile_{}.svg: no data, omitted", name));
                continue;
            }
            let plot = LinePlot {
                title: format!("{} vs {}", y.as_str(), x.as_str()),
                x_label: format!("{} (%)", x.as_str()),
                y_label: format!("mean {}", y.as_str()),
                log_x: false,
                log_y: false,
                step: false,
                series,
            };
            em.svg(&format!("figures/profile_{}.svg", name), &plot.render())?;
        }
    }
    Ok(())
}

fn emit_timeseries(
    em: &mut Emitter<'_>,
    detail: &[&CascadeMetrics],
    classes: &[CascadeClass],
    bucket: Bucket,
    segments: &[Segment],
    figure_classes: &[Segment],
) -> Result<()> {
    let roots: Vec<_> = detail
        .iter()
        .zip(classes)
        .map(|(d, c)| (d.start, *c))
        .collect();
    let counts = daily_counts(&roots, bucket);
    let names: Vec<String> = segments.iter().map(|s| s.name()).collect();
    let mut header = vec!["date"];
    header.extend(names.iter().map(String::as_str));
    let table: Vec<Vec<String>> = counts
        .starts
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let mut row = vec![d.format("%Y-%m-%d").to_string()];
            row.extend(names.iter().map(|n| counts.counts[n][i].to_string()));
            row
        })
        .collect();
    let rel = format!("timeseries/cascades_per_{}.csv", bucket.as_str());
    em.csv(&rel, &header, &table)?;
    if counts.starts.is_empty() {
        em.notice("figures/timeseries.svg: no cascades, omitted".into());
        return Ok(());
    }
    let series = figure_classes
        .iter()
        .map(|s| PlotSeries {
            name: s.name(),
            points: counts.counts[&s.name()]
                .iter()
                .enumerate()
                .map(|(i, c)| (i as f64, *c as f64))
                .collect(),
        })
        .collect();
    let plot = LinePlot {
        title: format!(
            "Cascades per {} from {}",
            bucket.as_str(),
            counts.starts[0].format("%Y-%m-%d")
        ),
        x_label: format!("{}s since start", bucket.as_str()),
        y_label: "cascades".into(),
        log_x: false,
        log_y: false,
        step: false,
        series,
    };
    em.svg("figures/timeseries.svg", &plot.render())
}
