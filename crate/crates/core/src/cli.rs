//! Command-line entry point.
//!
//! Exit codes: 0 success, 2 usage (bad flags, missing input, bad config),
//! 3 I/O failure, 4 a treebank with no sentences left after filtering.

use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::{analyze_stream, TreebankAnalysis};
use crate::ensembles::{par_estimate_crossings, uniform_random_tree, ArrangementPolicy, RandomSource};
use crate::ingest::{Format, IngestConfig};
use crate::metrics::{count_crossings, hubiness, potential_crossings};
use crate::predictor::{probability_map, PredictionResult, ProbabilityCache};
use crate::report::{
    curve_across_treebanks, curve_tsv, fmt_f64, length_groups_tsv, length_summary_tsv, parse_sentence_tsv,
    sentence_tsv, sort_by_crossings, summarize_by_length, summarize_treebank, summary_tsv, Provenance, ReportError,
    TreebankSummaryRow,
};
use crate::stats::StdDevKind;

/// Monte Carlo streams per simulated tree; fixed so output does not depend on
/// the number of cores.
const SIMULATION_STREAMS: usize = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    EmptyAfterFilter(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::EmptyAfterFilter(_) => 4,
        }
    }
}

fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "depcross", version, about = "Dependency crossing statistics and crossing predictors for CoNLL treebanks")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse treebanks and write per-sentence metrics and summary tables.
    Analyze(AnalyzeArgs),
    /// Write the crossing-probability map p(d1, d2) for one sentence length.
    ProbMap(ProbMapArgs),
    /// Run random-tree experiments with a fixed seed.
    Simulate(SimulateArgs),
    /// Re-aggregate per-sentence TSV files written by `analyze`.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct AggregateArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Also write per-length groups, their summary and cross-treebank curves.
    #[arg(long)]
    group_by_length: bool,
    /// Smallest length group that enters the per-length statistics.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    min_group_size: u64,
    /// Use the N-1 divisor for standard deviations instead of N.
    #[arg(long)]
    sample_sd: bool,
}

impl AggregateArgs {
    fn sd_kind(&self) -> StdDevKind {
        if self.sample_sd {
            StdDevKind::Sample
        } else {
            StdDevKind::Population
        }
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Input variant; overrides the config file.
    #[arg(long)]
    format: Option<Format>,
    /// Token classification config (key = value text).
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    aggregate: AggregateArgs,
    /// One CoNLL file per treebank; the file stem names the treebank.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct ProbMapArgs {
    /// Sentence length.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    n: u64,
    /// Emit both triangles of the map instead of d1 <= d2.
    #[arg(long)]
    full: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Vertices per random tree.
    #[arg(long, value_parser = clap::value_parser!(u64).range(4..))]
    n: u64,
    /// Number of non-star random trees.
    #[arg(long, default_value_t = 10)]
    trees: usize,
    /// Random arrangements per tree for the Monte Carlo estimates.
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(2..))]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Arrangement treated as the observed one: identity, random or planar.
    #[arg(long, default_value = "identity")]
    arrangement: ArrangementPolicy,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[command(flatten)]
    aggregate: AggregateArgs,
    /// Per-sentence TSV files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("depcross: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::ProbMap(args) => prob_map(args),
        Command::Simulate(args) => simulate(args),
        Command::Report(args) => report(args),
    }
}

fn load_config(path: Option<&Path>, format: Option<Format>) -> Result<IngestConfig, CliError> {
    let mut config = match path {
        None => IngestConfig::default(),
        Some(p) => {
            if !p.exists() {
                return Err(CliError::Usage(format!("config file {} does not exist", p.display())));
            }
            let text = fs::read_to_string(p).map_err(|e| io_error(p, e))?;
            IngestConfig::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?
        }
    };
    if let Some(f) = format {
        config.format = f;
    }
    Ok(config)
}

fn check_inputs(inputs: &[PathBuf]) -> Result<Vec<String>, CliError> {
    let mut ids = Vec::with_capacity(inputs.len());
    for p in inputs {
        if !p.is_file() {
            return Err(CliError::Usage(format!("input {} does not exist", p.display())));
        }
        let id = p
            .file_name()
            .and_then(|s| s.to_str())
            .map(|s| s.split('.').next().unwrap_or(s).to_owned())
            .filter(|s| !s.is_empty())
            .ok_or_else(|| CliError::Usage(format!("cannot derive a treebank name from {}", p.display())))?;
        if ids.contains(&id) {
            return Err(CliError::Usage(format!("two inputs map to treebank name '{id}'")));
        }
        ids.push(id);
    }
    Ok(ids)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| io_error(path, e))
}

fn write_or_print(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, contents),
        None => io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let config = load_config(args.config.as_deref(), args.format)?;
    let ids = check_inputs(&args.inputs)?;
    let cache = ProbabilityCache::new();
    let analyses: Vec<TreebankAnalysis> = args
        .inputs
        .par_iter()
        .zip(ids.par_iter())
        .map(|(path, id)| {
            let file = File::open(path).map_err(|e| io_error(path, e))?;
            analyze_stream(id, BufReader::new(file), &config, &cache).map_err(|e| io_error(path, e))
        })
        .collect::<Result<_, _>>()?;

    for a in &analyses {
        for m in &a.malformed {
            eprintln!("depcross: {}: {m}", a.id);
        }
        eprintln!(
            "depcross: {}: {} sentences, {} included ({} malformed, {} not trees, {} stars)",
            a.id,
            a.sentences_raw,
            a.filtered(),
            a.tally.malformed,
            a.tally.not_tree,
            a.tally.star_tree
        );
    }

    let provenance = Provenance {
        config_fingerprint: config.fingerprint(),
        seed: None,
    };
    fs::create_dir_all(&args.aggregate.out).map_err(|e| io_error(&args.aggregate.out, e))?;
    for a in &analyses {
        write_file(
            &args.aggregate.out.join(format!("{}.sentences.tsv", a.id)),
            &sentence_tsv(a, &provenance),
        )?;
    }
    aggregate(&analyses, &args.aggregate, &provenance)
}

fn aggregate(analyses: &[TreebankAnalysis], args: &AggregateArgs, provenance: &Provenance) -> Result<(), CliError> {
    let empty = |e: ReportError| CliError::EmptyAfterFilter(e.to_string());
    let kind = args.sd_kind();
    let mut rows: Vec<TreebankSummaryRow> = analyses
        .iter()
        .map(|a| summarize_treebank(a, kind))
        .collect::<Result<_, _>>()
        .map_err(empty)?;
    sort_by_crossings(&mut rows);
    fs::create_dir_all(&args.out).map_err(|e| io_error(&args.out, e))?;
    write_file(&args.out.join("summary.tsv"), &summary_tsv(&rows, provenance))?;

    if args.group_by_length {
        let min = args.min_group_size as usize;
        let summaries = rows
            .iter()
            .map(|r| {
                let a = analyses.iter().find(|a| a.id == r.treebank).unwrap();
                summarize_by_length(&a.id, &a.metrics, min, kind)
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(empty)?;
        write_file(&args.out.join("by_length.tsv"), &length_groups_tsv(&summaries, provenance))?;
        write_file(
            &args.out.join("length_summary.tsv"),
            &length_summary_tsv(&summaries, min, provenance),
        )?;
        if summaries.len() >= 2 {
            let points = curve_across_treebanks(&summaries, kind).map_err(empty)?;
            write_file(&args.out.join("curve.tsv"), &curve_tsv(&points, provenance))?;
        }
    }
    Ok(())
}

fn report(args: ReportArgs) -> Result<(), CliError> {
    let mut analyses = Vec::with_capacity(args.inputs.len());
    let mut fingerprint: Option<String> = None;
    for path in &args.inputs {
        if !path.is_file() {
            return Err(CliError::Usage(format!("input {} does not exist", path.display())));
        }
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        let name = path.display().to_string();
        let analysis = parse_sentence_tsv(&name, &text).map_err(|e| CliError::Usage(e.to_string()))?;
        if analyses.iter().any(|a: &TreebankAnalysis| a.id == analysis.id) {
            return Err(CliError::Usage(format!("treebank '{}' given twice", analysis.id)));
        }
        let fp = text.lines().find_map(|l| l.strip_prefix("# config: ")).unwrap_or("unknown");
        match &fingerprint {
            None => fingerprint = Some(fp.to_owned()),
            Some(f) if f != fp => fingerprint = Some("mixed".to_owned()),
            Some(_) => {}
        }
        analyses.push(analysis);
    }
    let provenance = Provenance {
        config_fingerprint: fingerprint.unwrap_or_else(|| "unknown".into()),
        seed: None,
    };
    aggregate(&analyses, &args.aggregate, &provenance)
}

fn prob_map(args: ProbMapArgs) -> Result<(), CliError> {
    let n = args.n as usize;
    let cache = ProbabilityCache::new();
    let table = cache.table(n);
    let provenance = Provenance {
        config_fingerprint: "none".into(),
        seed: None,
    };
    let mut out = provenance.header(&[("n", n.to_string())]);
    out.push_str("n\td1\td2\talpha\tbeta\tp\n");
    for cell in probability_map(&table, args.full) {
        out.push_str(&format!(
            "{n}\t{}\t{}\t{}\t{}\t{}\n",
            cell.d1,
            cell.d2,
            cell.placements.alpha,
            cell.placements.beta,
            fmt_f64(cell.p)
        ));
    }
    write_or_print(args.out.as_deref(), &out)
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let n = args.n as usize;
    let samples = args.samples as usize;
    let cache = ProbabilityCache::new();
    let table = cache.table(n);
    let mut trees_rng = RandomSource::stream(args.seed, 0);
    let mut arrange_rng = RandomSource::stream(args.seed, 1);
    let sim_error = |e: crate::ensembles::EnsembleError| CliError::Usage(e.to_string());

    let mut trees = Vec::with_capacity(args.trees);
    while trees.len() < args.trees {
        let t = uniform_random_tree(n, &mut trees_rng).map_err(sim_error)?;
        if !t.is_star() {
            trees.push(args.arrangement.apply(&t, &mut arrange_rng));
        }
    }

    let provenance = Provenance {
        config_fingerprint: "none".into(),
        seed: Some(args.seed),
    };
    let mut out = provenance.header(&[
        ("n", n.to_string()),
        ("samples", samples.to_string()),
        ("arrangement", format!("{:?}", args.arrangement).to_lowercase()),
    ]);
    out.push_str("tree\tn\tQ\th\tC\tE0\tE2\tdelta0\tdelta2\tmc_mean_C\tmc_se_C\tmc_mean_E2\tmc_se_E2\n");
    for (k, tree) in trees.iter().enumerate() {
        let q = potential_crossings(tree);
        let c = count_crossings(tree);
        let prediction = PredictionResult::from_parts(tree, &table, q, c).map_err(|e| CliError::Usage(e.to_string()))?;
        let seed = args.seed.wrapping_add(1 + k as u64);
        let (mc_c, mc_e2) =
            par_estimate_crossings(tree, samples, seed, SIMULATION_STREAMS, &table).map_err(sim_error)?;
        out.push_str(&format!(
            "{}\t{n}\t{q}\t{}\t{c}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            k + 1,
            fmt_f64(hubiness(tree).unwrap_or(f64::NAN)),
            fmt_f64(prediction.e0),
            fmt_f64(prediction.e2),
            fmt_f64(prediction.delta0),
            fmt_f64(prediction.delta2),
            fmt_f64(mc_c.mean),
            fmt_f64(mc_c.std_error),
            fmt_f64(mc_e2.mean),
            fmt_f64(mc_e2.std_error)
        ));
    }
    eprintln!("depcross: simulate seed {}", args.seed);
    write_or_print(args.out.as_deref(), &out)
}
