//! Command-line front end. Every subcommand reads files, writes one report
//! or store, and maps errors onto exit codes (3 I/O, 4 validation).

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analytics::{self, NerIndex, SourceSelector};
use crate::error::{Error, Result};
use crate::extract::{extract_graph, ExtractionConfig, ExtractionMode};
use crate::graph::SentenceGraph;
use crate::ingest::{self, conllu_files, read_conllu_file, ParsedSentence};
use crate::label::StanceLabel;
use crate::mace::{self, MaceConfig};
use crate::predict::remote::RemoteOptions;
use crate::predict::{predict_graph, PredictorSpec, DEFAULT_RESTARTS};
use crate::stats;

#[derive(Debug, Parser)]
#[command(name = "stancegraph", version, about = "Multi-source epistemic stance graphs")]
pub struct Cli {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Print errors as JSON on stderr.
    #[arg(long, global = true)]
    pub json_errors: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract unlabeled source/event tuples from CoNLL-U files.
    Extract(ExtractArgs),
    /// Label every tuple of a store.
    Predict(PredictArgs),
    /// Aggregate crowd annotations with MACE.
    Aggregate(AggregateArgs),
    /// Score a predicted store against a gold store.
    Evaluate(EvaluateArgs),
    /// Inter-annotator agreement of an annotation file.
    Agreement(AgreementArgs),
    /// Corpus analytics over a labeled store.
    Analyze(AnalyzeArgs),
    /// Summary of a book metadata file.
    CorpusStats(CorpusStatsArgs),
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Directory of *.conllu files.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub mode: Option<ExtractionMode>,
    /// TOML extraction settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Keep only clause heads attached directly to the root.
    #[arg(long)]
    pub direct_only: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Unlabeled (or labeled) tuple store.
    #[arg(long)]
    pub input: PathBuf,
    /// baseline, file:PATH[,PATH...] or remote:URL[,URL...]
    #[arg(long, default_value = "baseline")]
    pub predictor: String,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    /// CoNLL-U directory the store was extracted from (baseline and remote).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Requests per HTTP call for remote predictors.
    #[arg(long, default_value_t = 64)]
    pub batch_size: usize,
    /// Attempts per HTTP call for remote predictors.
    #[arg(long, default_value_t = 3)]
    pub attempts: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long, default_value_t = mace::DEFAULT_ITERS)]
    pub iters: usize,
    #[arg(long, default_value_t = mace::DEFAULT_RESTARTS)]
    pub restarts: usize,
    /// Smoothing added to expected counts (default 0.1 / K).
    #[arg(long)]
    pub smoothing: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV of item_id,label; prints MACE and majority-vote accuracy.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Unit {
    Sentence,
    Tuple,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    /// Second system for a paired significance test against --pred.
    #[arg(long)]
    pub compare: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Unit::Sentence)]
    pub unit: Unit,
    #[arg(long, default_value_t = 10_000)]
    pub bootstrap_samples: usize,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Human-readable table instead of JSON.
    #[arg(long)]
    pub table: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AgreementArgs {
    #[arg(long)]
    pub annotations: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Analysis {
    BeliefHolders,
    BeliefScore,
    Jaccard,
    CitationRatio,
    Hedging,
    Ed,
    HolderEval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(value_enum)]
    pub analysis: Analysis,
    /// Labeled tuple store.
    #[arg(long)]
    pub store: PathBuf,
    /// NER spans (JSONL).
    #[arg(long)]
    pub ner: Option<PathBuf>,
    /// Book metadata (TSV).
    #[arg(long)]
    pub meta: Option<PathBuf>,
    /// Gold store for holder-eval.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    #[arg(long, default_value_t = analytics::DEFAULT_MIN_BOOKS)]
    pub min_books: usize,
    /// Count every source for hedging, not only the author.
    #[arg(long)]
    pub all_sources: bool,
    /// First source for ed ("author" or a holder name).
    #[arg(long)]
    pub source_a: Option<String>,
    #[arg(long)]
    pub source_b: Option<String>,
    /// Enable the expected-stance analyses.
    #[arg(long)]
    pub experimental: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorpusStatsArgs {
    #[arg(long)]
    pub meta: PathBuf,
    /// Also count documents and sentences in a CoNLL-U directory.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args(args: Vec<std::ffi::OsString>) -> i32 {
    let json_errors = args.iter().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            if json_errors && code != 0 {
                let msg = json!({"error": "usage", "message": e.to_string().trim_end(), "exit_code": code});
                eprintln!("{msg}");
            } else {
                let _ = e.print();
            }
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let code = e.exit_code();
            if cli.json_errors {
                eprintln!(
                    "{}",
                    json!({"error": e.kind(), "message": e.to_string(), "exit_code": code})
                );
            } else {
                eprintln!("error: {e}");
            }
            code
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::validation("--jobs must be at least 1"));
        }
        builder = builder.num_threads(jobs);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::validation(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Extract(a) => cmd_extract(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Aggregate(a) => cmd_aggregate(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Agreement(a) => cmd_agreement(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::CorpusStats(a) => cmd_corpus_stats(a),
    })
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Error::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn store_bytes(graphs: &[SentenceGraph]) -> Vec<u8> {
    let mut buf = Vec::new();
    ingest::tuples::write_tuples_to(&mut buf, graphs).expect("writing to memory");
    buf
}

/// Rounds every float to 6 decimals so reports stay short and stable.
fn round6(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            json!((x * 1e6).round() / 1e6)
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(round6).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round6(v))).collect()),
        other => other,
    }
}

fn json_bytes<T: Serialize>(report: &T) -> Vec<u8> {
    let value = round6(serde_json::to_value(report).expect("reports serialize"));
    let mut bytes = serde_json::to_vec_pretty(&value).expect("values serialize");
    bytes.push(b'\n');
    bytes
}

/// Reads every CoNLL-U file in `dir`; files in name order, sentences in
/// file order.
pub fn read_corpus(dir: &Path) -> Result<Vec<ParsedSentence>> {
    let files = conllu_files(dir)?;
    let parsed = files.par_iter().map(read_conllu_file).collect::<Result<Vec<_>>>()?;
    let mut sentences = Vec::new();
    for (file, (s, skipped)) in files.iter().zip(parsed) {
        if skipped > 0 {
            log::warn!("{}: skipped {skipped} malformed sentence(s)", file.display());
        }
        sentences.extend(s);
    }
    Ok(sentences)
}

fn cmd_extract(a: &ExtractArgs) -> Result<()> {
    let mut config = match &a.config {
        Some(p) => ExtractionConfig::from_file(p)?,
        None => ExtractionConfig::default(),
    };
    if let Some(mode) = a.mode {
        config.mode = mode;
    }
    config.direct_only |= a.direct_only;
    let sentences = read_corpus(&a.corpus)?;
    let graphs = sentences
        .par_iter()
        .map(|s| extract_graph(s, &config))
        .collect::<Result<Vec<_>>>()?;
    write_output(a.output.as_deref(), &store_bytes(&graphs))
}

fn cmd_predict(a: &PredictArgs) -> Result<()> {
    let spec: PredictorSpec = a.predictor.parse()?;
    let spec = spec.with_restarts(a.restarts);
    let options = RemoteOptions {
        batch_size: a.batch_size,
        attempts: a.attempts,
        ..RemoteOptions::from_env()
    };
    let predictor = spec.build(&options)?;
    let graphs = ingest::read_tuples(&a.input)?;
    let parses: HashMap<(String, String), ParsedSentence> = if spec.needs_parse() {
        let corpus = a.corpus.as_ref().ok_or_else(|| {
            Error::validation(format!(
                "predictor {:?} needs --corpus with the CoNLL-U files",
                a.predictor
            ))
        })?;
        read_corpus(corpus)?
            .into_iter()
            .map(|s| ((s.doc_id.clone(), s.sent_id.clone()), s))
            .collect()
    } else {
        HashMap::new()
    };
    let labeled = graphs
        .into_par_iter()
        .map(|g| {
            let parse = if spec.needs_parse() {
                let key = (g.doc_id().to_string(), g.sent_id().to_string());
                Some(
                    parses
                        .get(&key)
                        .ok_or_else(|| Error::validation(format!("no parse for {}/{} in the corpus", key.0, key.1)))?,
                )
            } else {
                None
            };
            predict_graph(g.unlabeled(), parse, predictor.as_ref())
        })
        .collect::<Result<Vec<_>>>()?;
    write_output(a.output.as_deref(), &store_bytes(&labeled))
}

fn read_gold_labels(path: &Path, labels: &[String]) -> Result<HashMap<String, usize>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::validation(format!("{}: {e}", path.display())))?;
    let mut out = HashMap::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::parse(path.display().to_string(), i + 2, e.to_string()))?;
        if row.len() != 2 {
            return Err(Error::parse(
                path.display().to_string(),
                i + 2,
                "expected item_id,label",
            ));
        }
        let label = labels.iter().position(|l| l == &row[1]).ok_or_else(|| {
            Error::parse(
                path.display().to_string(),
                i + 2,
                format!("unknown label {:?}", &row[1]),
            )
        })?;
        out.insert(row[0].to_string(), label);
    }
    Ok(out)
}

fn cmd_aggregate(a: &AggregateArgs) -> Result<()> {
    let set = ingest::read_annotations(&a.annotations)?;
    let ann = set.indexed();
    let config = MaceConfig {
        iters: a.iters,
        restarts: a.restarts,
        smoothing: a.smoothing,
        seed: a.seed,
    };
    let (_, result) = mace::em_fit(&ann, &config)?;
    let mut buf = Vec::new();
    mace::write_aggregation(&mut buf, &ann, &set.labels, &result).map_err(|e| Error::io("<buffer>", e))?;
    write_output(a.output.as_deref(), &buf)?;
    if let Some(gold_path) = &a.gold {
        let gold = read_gold_labels(gold_path, &set.labels)?;
        let majority = mace::majority_vote(&ann);
        let (mut n, mut hit_mace, mut hit_majority) = (0usize, 0usize, 0usize);
        for (i, item) in ann.items.iter().enumerate() {
            if let Some(&g) = gold.get(item) {
                n += 1;
                hit_mace += usize::from(result.hard_labels[i] == g);
                hit_majority += usize::from(majority[i] == g);
            }
        }
        if n == 0 {
            return Err(Error::validation("no gold labels match the annotated items"));
        }
        eprintln!(
            "accuracy: mace {:.6} ({hit_mace}/{n}), majority {:.6} ({hit_majority}/{n})",
            hit_mace as f64 / n as f64,
            hit_majority as f64 / n as f64
        );
    }
    Ok(())
}

/// Gold and predicted labels per sentence, matched on source and event tokens.
pub type AlignedSentence = Vec<(StanceLabel, StanceLabel)>;

pub fn align_stores(gold: &[SentenceGraph], pred: &[SentenceGraph]) -> Result<Vec<AlignedSentence>> {
    let mut index: HashMap<(&str, &str), &SentenceGraph> = HashMap::new();
    for g in pred {
        index.insert((g.doc_id(), g.sent_id()), g);
    }
    gold.iter()
        .map(|g| {
            let missing = || Error::validation(format!("prediction lacks sentence {}/{}", g.doc_id(), g.sent_id()));
            let p = index.get(&(g.doc_id(), g.sent_id())).ok_or_else(missing)?;
            let by_pair: HashMap<(Option<usize>, usize), StanceLabel> = p
                .tuples()
                .iter()
                .filter_map(|t| Some(((t.source.token_index(), t.event.token_index), t.label?)))
                .collect();
            g.tuples()
                .iter()
                .map(|t| {
                    let gold_label = t.label.ok_or_else(|| {
                        Error::validation(format!("unlabeled gold tuple in {}/{}", g.doc_id(), g.sent_id()))
                    })?;
                    let pred_label = by_pair
                        .get(&(t.source.token_index(), t.event.token_index))
                        .copied()
                        .ok_or_else(|| Error::MissingPrediction {
                            doc_id: g.doc_id().to_string(),
                            sent_id: g.sent_id().to_string(),
                            source_key: t.source.key(),
                            event: t.event.token_index,
                        })?;
                    Ok((gold_label, pred_label))
                })
                .collect()
        })
        .collect()
}

fn units_of(aligned: Vec<AlignedSentence>, unit: Unit) -> Vec<AlignedSentence> {
    match unit {
        Unit::Sentence => aligned,
        Unit::Tuple => aligned.into_iter().flatten().map(|p| vec![p]).collect(),
    }
}

fn report_of(units: &[&AlignedSentence]) -> stats::MetricsReport {
    let (gold, pred): (Vec<_>, Vec<_>) = units.iter().flat_map(|u| u.iter().copied()).unzip();
    stats::macro_f1(&gold, &pred).expect("aligned sequences have equal length")
}

#[derive(Debug, Serialize)]
struct EvaluateReport {
    unit: &'static str,
    units: usize,
    metrics: stats::MetricsReport,
    macro_f1_all: stats::BootstrapResult,
    macro_f1_non_ne: stats::BootstrapResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    compare: Option<CompareReport>,
}

#[derive(Debug, Serialize)]
struct CompareReport {
    macro_f1_all: stats::CompareResult,
    macro_f1_non_ne: stats::CompareResult,
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<()> {
    let gold = ingest::read_tuples(&a.gold)?;
    let pred = ingest::read_tuples(&a.pred)?;
    let units = units_of(align_stores(&gold, &pred)?, a.unit);
    let all_units: Vec<&AlignedSentence> = units.iter().collect();
    let metrics = report_of(&all_units);
    let b = a.bootstrap_samples;
    let ci_all = stats::bootstrap_ci(&units, |s| report_of(s).macro_f1_all, b, a.level, a.seed)?;
    let ci_non_ne = stats::bootstrap_ci(&units, |s| report_of(s).macro_f1_non_ne, b, a.level, a.seed)?;
    let compare = match &a.compare {
        None => None,
        Some(other_path) => {
            let other = ingest::read_tuples(other_path)?;
            let first = align_stores(&gold, &pred)?;
            let second = align_stores(&gold, &other)?;
            // unit = (gold, A, B) triples of one sentence or tuple
            let paired: Vec<Vec<(StanceLabel, StanceLabel, StanceLabel)>> = first
                .into_iter()
                .zip(second)
                .map(|(x, y)| x.into_iter().zip(y).map(|((g, p), (_, q))| (g, p, q)).collect())
                .collect();
            let paired = match a.unit {
                Unit::Sentence => paired,
                Unit::Tuple => paired.into_iter().flatten().map(|t| vec![t]).collect(),
            };
            let score = |s: &[&Vec<(StanceLabel, StanceLabel, StanceLabel)>], second: bool, non_ne: bool| {
                let (gold, pred): (Vec<_>, Vec<_>) = s
                    .iter()
                    .flat_map(|u| u.iter().map(|&(g, p, q)| (g, if second { q } else { p })))
                    .unzip();
                let r = stats::macro_f1(&gold, &pred).expect("aligned");
                if non_ne {
                    r.macro_f1_non_ne
                } else {
                    r.macro_f1_all
                }
            };
            Some(CompareReport {
                macro_f1_all: stats::bootstrap_compare(
                    &paired,
                    |s| score(s, false, false),
                    |s| score(s, true, false),
                    b,
                    a.seed,
                )?,
                macro_f1_non_ne: stats::bootstrap_compare(
                    &paired,
                    |s| score(s, false, true),
                    |s| score(s, true, true),
                    b,
                    a.seed,
                )?,
            })
        }
    };
    if a.table {
        let mut text = metrics.to_table();
        text.push_str(&format!(
            "{:.0}% CI (all)\t[{:.1}, {:.1}]\n{:.0}% CI (non-NE)\t[{:.1}, {:.1}]\n",
            100.0 * a.level,
            100.0 * ci_all.ci_low,
            100.0 * ci_all.ci_high,
            100.0 * a.level,
            100.0 * ci_non_ne.ci_low,
            100.0 * ci_non_ne.ci_high
        ));
        if let Some(c) = &compare {
            text.push_str(&format!(
                "p (all)\t{:.4}\np (non-NE)\t{:.4}\n",
                c.macro_f1_all.p_value, c.macro_f1_non_ne.p_value
            ));
        }
        return write_output(a.output.as_deref(), text.as_bytes());
    }
    let report = EvaluateReport {
        unit: match a.unit {
            Unit::Sentence => "sentence",
            Unit::Tuple => "tuple",
        },
        units: units.len(),
        metrics,
        macro_f1_all: ci_all,
        macro_f1_non_ne: ci_non_ne,
        compare,
    };
    write_output(a.output.as_deref(), &json_bytes(&report))
}

fn cmd_agreement(a: &AgreementArgs) -> Result<()> {
    let set = ingest::read_annotations(&a.annotations)?;
    let ann = set.indexed();
    let report = json!({
        "items": ann.items.len(),
        "annotators": ann.annotators.len(),
        "judgments": ann.judgments.len(),
        "raw_agreement": stats::raw_agreement(&ann)?,
        "krippendorff_alpha": stats::krippendorff_alpha(&ann)?,
    });
    write_output(None, &json_bytes(&report))
}

fn require<'a>(path: &'a Option<PathBuf>, flag: &str, analysis: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| Error::validation(format!("{analysis} needs --{flag}")))
}

fn tsv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut out = header.join("\t");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out.into_bytes()
}

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

fn cmd_analyze(a: &AnalyzeArgs) -> Result<()> {
    let name = a.analysis.to_possible_value().expect("named").get_name().to_string();
    if a.analysis == Analysis::Ed && !a.experimental {
        return Err(Error::validation("ed is experimental; pass --experimental"));
    }
    let graphs = ingest::read_tuples(&a.store)?;
    if let Some(g) = graphs.iter().find(|g| !g.is_labeled()) {
        return Err(Error::validation(format!(
            "store has unlabeled tuples ({}/{})",
            g.doc_id(),
            g.sent_id()
        )));
    }
    let spans = match &a.ner {
        Some(p) => ingest::read_ner_spans(p)?,
        None => Vec::new(),
    };
    let ner = NerIndex::new(&spans);
    let tsv_mode = a.format == Format::Tsv;
    let bytes = match a.analysis {
        Analysis::BeliefHolders => {
            let records = analytics::belief_holders(&graphs, &ner);
            let ideology = match &a.meta {
                Some(p) => Some(analytics::holders::ideology_map(&ingest::read_book_metadata(p)?)),
                None => None,
            };
            let mut rows = Vec::new();
            for r in &records {
                let counts = ideology.as_ref().map(|m| r.ideology_counts(m)).transpose()?;
                rows.push((r, counts));
            }
            if tsv_mode {
                tsv(
                    &["canonical", "books", "mentions", "n_left", "n_right", "n_centrist"],
                    rows.iter().map(|(r, c)| {
                        let (l, rr, cc) = c.map_or((String::new(), String::new(), String::new()), |c| {
                            (c.0.to_string(), c.1.to_string(), c.2.to_string())
                        });
                        vec![
                            r.canonical.clone(),
                            r.books.len().to_string(),
                            r.mention_count.to_string(),
                            l,
                            rr,
                            cc,
                        ]
                    }),
                )
            } else {
                let list: Vec<Value> = rows
                    .iter()
                    .map(|(r, c)| {
                        let mut v = serde_json::to_value(r).expect("serializable");
                        if let Some((l, rr, cc)) = c {
                            v["n_left"] = json!(l);
                            v["n_right"] = json!(rr);
                            v["n_centrist"] = json!(cc);
                        }
                        v
                    })
                    .collect();
                json_bytes(&json!({ "belief_holders": list }))
            }
        }
        Analysis::BeliefScore => {
            let scores = analytics::belief_score_by_type(&graphs, &ner);
            if tsv_mode {
                tsv(
                    &["entity_type", "belief_score"],
                    scores.iter().map(|(t, s)| vec![t.to_string(), f6(*s)]),
                )
            } else {
                let map: BTreeMap<String, f64> = scores.iter().map(|(t, s)| (t.to_string(), *s)).collect();
                json_bytes(&json!({ "belief_score": map }))
            }
        }
        Analysis::Jaccard => {
            require(&a.ner, "ner", &name)?;
            let holders = analytics::belief_set(&analytics::belief_holders(&graphs, &ner));
            let entities = analytics::ner_entity_set(&spans);
            let j = analytics::jaccard(&holders, &entities);
            let report = json!({
                "belief_holders": holders.len(),
                "ner_entities": entities.len(),
                "intersection": holders.intersection(&entities).count(),
                "jaccard": j,
            });
            if tsv_mode {
                tsv(
                    &["belief_holders", "ner_entities", "intersection", "jaccard"],
                    [vec![
                        holders.len().to_string(),
                        entities.len().to_string(),
                        holders.intersection(&entities).count().to_string(),
                        f6(j),
                    ]],
                )
            } else {
                json_bytes(&report)
            }
        }
        Analysis::CitationRatio => {
            let meta = ingest::read_book_metadata(require(&a.meta, "meta", &name)?)?;
            let records = analytics::belief_holders(&graphs, &ner);
            let ranking = analytics::citation_ratios(&records, &meta, a.min_books)?;
            if tsv_mode {
                let rows = ranking.left_leaning.iter().enumerate().map(|(i, r)| {
                    vec![
                        (i + 1).to_string(),
                        r.canonical.clone(),
                        r.n_left.to_string(),
                        r.n_right.to_string(),
                        f6(r.p_left),
                        f6(r.p_right),
                        f6(r.ratio),
                    ]
                });
                tsv(
                    &["rank", "canonical", "n_left", "n_right", "p_left", "p_right", "ratio"],
                    rows,
                )
            } else {
                json_bytes(&ranking)
            }
        }
        Analysis::Hedging => {
            let r = analytics::hedging_uncertainty(&graphs, !a.all_sources)?;
            if tsv_mode {
                tsv(
                    &["hedged", "epistemic", "tuples", "uncertainty", "uncertainty_all_events"],
                    [vec![
                        r.hedged.to_string(),
                        r.epistemic.to_string(),
                        r.tuples.to_string(),
                        f6(r.uncertainty),
                        f6(r.uncertainty_all_events),
                    ]],
                )
            } else {
                json_bytes(&r)
            }
        }
        Analysis::Ed => {
            let sa: SourceSelector = a
                .source_a
                .as_deref()
                .ok_or_else(|| Error::validation("ed needs --source-a"))?
                .parse()?;
            let sb: SourceSelector = a
                .source_b
                .as_deref()
                .ok_or_else(|| Error::validation("ed needs --source-b"))?
                .parse()?;
            let d = analytics::epistemological_difference(&graphs, &ner, &sa, &sb)?;
            if tsv_mode {
                tsv(
                    &["score_a", "score_b", "ed"],
                    [vec![f6(d.score_a.score), f6(d.score_b.score), f6(d.ed)]],
                )
            } else {
                json_bytes(&d)
            }
        }
        Analysis::HolderEval => {
            let gold = ingest::read_tuples(require(&a.gold, "gold", &name)?)?;
            let r = analytics::belief_holder_eval(&graphs, &gold)?;
            if tsv_mode {
                tsv(
                    &["precision", "recall", "true_positives", "predicted", "gold"],
                    [vec![
                        f6(r.precision),
                        f6(r.recall),
                        r.true_positives.to_string(),
                        r.predicted.to_string(),
                        r.gold.to_string(),
                    ]],
                )
            } else {
                json_bytes(&r)
            }
        }
    };
    write_output(a.output.as_deref(), &bytes)
}

fn cmd_corpus_stats(a: &CorpusStatsArgs) -> Result<()> {
    let meta = ingest::read_book_metadata(&a.meta)?;
    let mut report = serde_json::to_value(ingest::meta::corpus_stats(&meta)).expect("serializable");
    if let Some(dir) = &a.corpus {
        let sentences = read_corpus(dir)?;
        let docs: std::collections::BTreeSet<&str> = sentences.iter().map(|s| s.doc_id.as_str()).collect();
        report["documents"] = json!(docs.len());
        report["sentences"] = json!(sentences.len());
        report["tokens"] = json!(sentences.iter().map(|s| s.tokens.len()).sum::<usize>());
    }
    write_output(None, &json_bytes(&report))
}
