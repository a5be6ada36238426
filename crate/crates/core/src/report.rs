//! Aggregation of per-sentence metrics into treebank tables and
//! error-versus-length curves, plus the TSV files that carry them.
//!
//! Every TSV starts with a `#` comment block naming the tool version, the
//! ingest config fingerprint and the seed (`none` when nothing was sampled).
//! Floats are written with six decimals.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::analysis::{SentenceMetrics, TreebankAnalysis};
use crate::preprocess::ExclusionTally;
use crate::stats::{mean, std_dev, StdDevKind, Summary};

pub const TOOL: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("treebank '{0}': no filtered sentences")]
    Empty(String),
    #[error("no length group has at least {0} sentences")]
    NoGroups(usize),
    #[error("curves need at least two treebanks, got {0}")]
    TooFewTreebanks(usize),
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },
}

/// Formats a float with six decimals; negative zero prints as zero.
pub fn fmt_f64(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_owned()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub config_fingerprint: String,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn header(&self, extra: &[(&str, String)]) -> String {
        let mut out = format!("# {TOOL}\n# config: {}\n", self.config_fingerprint);
        match self.seed {
            Some(s) => writeln!(out, "# seed: {s}").unwrap(),
            None => out.push_str("# seed: none\n"),
        }
        for (k, v) in extra {
            writeln!(out, "# {k}: {v}").unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreebankSummaryRow {
    pub treebank: String,
    pub sentences_raw: usize,
    pub sentences_filtered: usize,
    pub tally: ExclusionTally,
    pub avg_c_true: f64,
    pub avg_delta0: f64,
    pub delta2: Summary,
}

/// Pooled statistics over the included sentences of one treebank.
pub fn summarize_treebank(analysis: &TreebankAnalysis, kind: StdDevKind) -> Result<TreebankSummaryRow, ReportError> {
    let metrics = &analysis.metrics;
    let empty = || ReportError::Empty(analysis.id.clone());
    let c: Vec<f64> = metrics.iter().map(|m| m.c_true as f64).collect();
    let d0: Vec<f64> = metrics.iter().map(|m| m.delta0).collect();
    let d2: Vec<f64> = metrics.iter().map(|m| m.delta2).collect();
    Ok(TreebankSummaryRow {
        treebank: analysis.id.clone(),
        sentences_raw: analysis.sentences_raw,
        sentences_filtered: metrics.len(),
        tally: analysis.tally,
        avg_c_true: mean(&c).ok_or_else(empty)?,
        avg_delta0: mean(&d0).ok_or_else(empty)?,
        delta2: Summary::of(&d2, kind).ok_or_else(empty)?,
    })
}

/// Descending average crossing count; ties broken by treebank name.
pub fn sort_by_crossings(rows: &mut [TreebankSummaryRow]) {
    rows.sort_by(|a, b| {
        b.avg_c_true
            .total_cmp(&a.avg_c_true)
            .then_with(|| a.treebank.cmp(&b.treebank))
    });
}

#[derive(Debug, Clone, PartialEq)]
pub struct LengthGroupRow {
    pub n: usize,
    pub size: usize,
    pub mean_delta0: f64,
    pub mean_delta2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LengthSummary {
    pub treebank: String,
    /// Groups with at least the minimum size, by increasing `n`.
    pub rows: Vec<LengthGroupRow>,
    /// Statistics over the group means of `delta2`.
    pub delta2: Summary,
    pub delta0: Summary,
    /// Mean of `delta2` over all sentences, for contrast with `delta2.mean`.
    pub pooled_delta2: f64,
}

impl LengthSummary {
    pub fn distinct_lengths(&self) -> usize {
        self.rows.len()
    }
}

/// Groups sentences by length and summarizes the per-group means. Groups
/// smaller than `min_group_size` are left out of both the rows and the
/// overall statistics.
pub fn summarize_by_length(
    treebank: &str,
    metrics: &[SentenceMetrics],
    min_group_size: usize,
    kind: StdDevKind,
) -> Result<LengthSummary, ReportError> {
    if metrics.is_empty() {
        return Err(ReportError::Empty(treebank.to_owned()));
    }
    let mut groups: BTreeMap<usize, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for m in metrics {
        let g = groups.entry(m.n).or_default();
        g.0.push(m.delta0);
        g.1.push(m.delta2);
    }
    let rows: Vec<LengthGroupRow> = groups
        .into_iter()
        .filter(|(_, (d0, _))| d0.len() >= min_group_size.max(1))
        .map(|(n, (d0, d2))| LengthGroupRow {
            n,
            size: d0.len(),
            mean_delta0: mean(&d0).unwrap(),
            mean_delta2: mean(&d2).unwrap(),
        })
        .collect();
    let d0: Vec<f64> = rows.iter().map(|r| r.mean_delta0).collect();
    let d2: Vec<f64> = rows.iter().map(|r| r.mean_delta2).collect();
    let pooled: Vec<f64> = metrics.iter().map(|m| m.delta2).collect();
    Ok(LengthSummary {
        treebank: treebank.to_owned(),
        delta2: Summary::of(&d2, kind).ok_or(ReportError::NoGroups(min_group_size))?,
        delta0: Summary::of(&d0, kind).ok_or(ReportError::NoGroups(min_group_size))?,
        pooled_delta2: mean(&pooled).unwrap(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub n: usize,
    pub treebanks: usize,
    pub mean_delta0: f64,
    pub sd_delta0: f64,
    pub mean_delta2: f64,
    pub sd_delta2: f64,
}

/// Value drawn as the control line under the `delta0` curve.
pub const DELTA0_REFERENCE: f64 = 1.0 / 3.0;

/// Mean and spread across treebanks of the per-length group means. Lengths
/// seen in fewer than two treebanks are dropped.
pub fn curve_across_treebanks(summaries: &[LengthSummary], kind: StdDevKind) -> Result<Vec<CurvePoint>, ReportError> {
    if summaries.len() < 2 {
        return Err(ReportError::TooFewTreebanks(summaries.len()));
    }
    let mut by_n: BTreeMap<usize, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for s in summaries {
        for r in &s.rows {
            let e = by_n.entry(r.n).or_default();
            e.0.push(r.mean_delta0);
            e.1.push(r.mean_delta2);
        }
    }
    Ok(by_n
        .into_iter()
        .filter(|(_, (d0, _))| d0.len() >= 2)
        .map(|(n, (d0, d2))| CurvePoint {
            n,
            treebanks: d0.len(),
            mean_delta0: mean(&d0).unwrap(),
            sd_delta0: std_dev(&d0, kind).unwrap(),
            mean_delta2: mean(&d2).unwrap(),
            sd_delta2: std_dev(&d2, kind).unwrap(),
        })
        .collect())
}

pub const SENTENCE_COLUMNS: &str = "sentence\tn\tC_true\tQ\tD\tk2\th\tE0\tE2\tdelta0\tdelta2";

/// One TSV per treebank with a row per included sentence. The comment block
/// also records the raw sentence count and exclusion tallies so the file can
/// be re-aggregated on its own.
pub fn sentence_tsv(analysis: &TreebankAnalysis, provenance: &Provenance) -> String {
    let mut out = provenance.header(&[
        ("treebank", analysis.id.clone()),
        ("sentences", analysis.sentences_raw.to_string()),
        ("excluded_malformed", analysis.tally.malformed.to_string()),
        ("excluded_not_tree", analysis.tally.not_tree.to_string()),
        ("excluded_star", analysis.tally.star_tree.to_string()),
    ]);
    out.push_str(SENTENCE_COLUMNS);
    out.push('\n');
    for m in &analysis.metrics {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            m.id,
            m.n,
            m.c_true,
            m.q_size,
            m.total_length,
            fmt_f64(m.k2_mean),
            fmt_f64(m.hubiness),
            fmt_f64(m.e0),
            fmt_f64(m.e2),
            fmt_f64(m.delta0),
            fmt_f64(m.delta2)
        )
        .unwrap();
    }
    out
}

/// Reads a file written by [`sentence_tsv`] back into an analysis.
pub fn parse_sentence_tsv(source_name: &str, text: &str) -> Result<TreebankAnalysis, ReportError> {
    let err = |line: usize, message: String| ReportError::Parse {
        source_name: source_name.to_owned(),
        line,
        message,
    };
    let mut analysis = TreebankAnalysis::default();
    let mut header_seen = false;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if let Some(comment) = line.strip_prefix("# ") {
            if let Some((key, value)) = comment.split_once(": ") {
                let count = || value.parse::<usize>().map_err(|_| err(line_no, format!("bad count '{value}'")));
                match key {
                    "treebank" => analysis.id = value.to_owned(),
                    "sentences" => analysis.sentences_raw = count()?,
                    "excluded_malformed" => analysis.tally.malformed = count()?,
                    "excluded_not_tree" => analysis.tally.not_tree = count()?,
                    "excluded_star" => analysis.tally.star_tree = count()?,
                    _ => {}
                }
            }
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            if line != SENTENCE_COLUMNS {
                return Err(err(line_no, "unexpected column header".into()));
            }
            header_seen = true;
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 11 {
            return Err(err(line_no, format!("expected 11 columns, found {}", cols.len())));
        }
        let int = |j: usize| cols[j].parse::<u64>().map_err(|_| err(line_no, format!("bad integer '{}'", cols[j])));
        let float = |j: usize| cols[j].parse::<f64>().map_err(|_| err(line_no, format!("bad number '{}'", cols[j])));
        analysis.metrics.push(SentenceMetrics {
            id: int(0)? as usize,
            n: int(1)? as usize,
            c_true: int(2)?,
            q_size: int(3)?,
            total_length: int(4)?,
            k2_mean: float(5)?,
            hubiness: float(6)?,
            e0: float(7)?,
            e2: float(8)?,
            delta0: float(9)?,
            delta2: float(10)?,
        });
    }
    if !header_seen {
        return Err(err(0, "missing column header".into()));
    }
    if analysis.id.is_empty() {
        analysis.id = source_name.to_owned();
    }
    Ok(analysis)
}

pub fn summary_tsv(rows: &[TreebankSummaryRow], provenance: &Provenance) -> String {
    let mut out = provenance.header(&[("stat", "pooled over sentences".into())]);
    out.push_str(
        "treebank\tsentences\tfiltered\texcluded_malformed\texcluded_not_tree\texcluded_star\t\
         avg_C_true\tavg_delta0\tavg_delta2\tmedian_delta2\tsd_delta2\n",
    );
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.treebank,
            r.sentences_raw,
            r.sentences_filtered,
            r.tally.malformed,
            r.tally.not_tree,
            r.tally.star_tree,
            fmt_f64(r.avg_c_true),
            fmt_f64(r.avg_delta0),
            fmt_f64(r.delta2.mean),
            fmt_f64(r.delta2.median),
            fmt_f64(r.delta2.std_dev)
        )
        .unwrap();
    }
    out
}

pub fn length_groups_tsv(summaries: &[LengthSummary], provenance: &Provenance) -> String {
    let mut out = provenance.header(&[]);
    out.push_str("treebank\tn\tsentences\tmean_delta0\tmean_delta2\n");
    for s in summaries {
        for r in &s.rows {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                s.treebank,
                r.n,
                r.size,
                fmt_f64(r.mean_delta0),
                fmt_f64(r.mean_delta2)
            )
            .unwrap();
        }
    }
    out
}

pub fn length_summary_tsv(summaries: &[LengthSummary], min_group_size: usize, provenance: &Provenance) -> String {
    let mut out = provenance.header(&[
        ("stat", "over per-length group means".into()),
        ("min_group_size", min_group_size.to_string()),
    ]);
    out.push_str("treebank\tlengths\tavg_delta2\tmedian_delta2\tsd_delta2\tavg_delta0\tpooled_avg_delta2\n");
    for s in summaries {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            s.treebank,
            s.distinct_lengths(),
            fmt_f64(s.delta2.mean),
            fmt_f64(s.delta2.median),
            fmt_f64(s.delta2.std_dev),
            fmt_f64(s.delta0.mean),
            fmt_f64(s.pooled_delta2)
        )
        .unwrap();
    }
    out
}

pub fn curve_tsv(points: &[CurvePoint], provenance: &Provenance) -> String {
    let mut out = provenance.header(&[]);
    out.push_str("n\ttreebanks\tmean_delta0\tsd_delta0\tmean_delta2\tsd_delta2\treference_delta0\n");
    for p in points {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            p.n,
            p.treebanks,
            fmt_f64(p.mean_delta0),
            fmt_f64(p.sd_delta0),
            fmt_f64(p.mean_delta2),
            fmt_f64(p.sd_delta2),
            fmt_f64(DELTA0_REFERENCE)
        )
        .unwrap();
    }
    out
}
