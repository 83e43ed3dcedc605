#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use serde_json::Value;
use stancegraph::extract::{extract_events, extract_sources, ExtractionConfig, ExtractionMode};
use stancegraph::ingest::read_conllu_file;
use unicode_normalization::UnicodeNormalization;

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

pub fn run_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stancegraph"))
        .args(args)
        .env_remove("STANCEGRAPH_CACHE")
        .output()
        .expect("binary runs")
}

/// Minimal HTTP/1.1 server answering every request through `handler`,
/// which gets the request body and returns (status, body).
pub struct StubServer {
    pub url: String,
    pub hits: Arc<AtomicUsize>,
}

type Handler = dyn Fn(&str) -> (u16, String) + Send + Sync;

impl StubServer {
    pub fn start(handler: impl Fn(&str) -> (u16, String) + Send + Sync + 'static) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        let hits = Arc::new(AtomicUsize::new(0));
        let handler: Arc<Handler> = Arc::new(handler);
        let counter = hits.clone();
        std::thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(mut stream) = stream else { continue };
                let handler = handler.clone();
                let counter = counter.clone();
                std::thread::spawn(move || {
                    let mut reader = BufReader::new(stream.try_clone().unwrap());
                    let mut length = 0;
                    loop {
                        let mut line = String::new();
                        if reader.read_line(&mut line).unwrap_or(0) == 0 {
                            return;
                        }
                        let line = line.trim_end();
                        if line.is_empty() {
                            break;
                        }
                        if let Some((k, v)) = line.split_once(':') {
                            if k.eq_ignore_ascii_case("content-length") {
                                length = v.trim().parse().unwrap();
                            }
                        }
                    }
                    let mut body = vec![0; length];
                    reader.read_exact(&mut body).unwrap();
                    counter.fetch_add(1, Ordering::SeqCst);
                    let (status, reply) = handler(&String::from_utf8(body).unwrap());
                    let head = format!(
                        "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
                        reply.len()
                    );
                    let _ = stream.write_all(head.as_bytes());
                    let _ = stream.write_all(reply.as_bytes());
                });
            }
        });
        StubServer { url, hits }
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }
}

pub const LABELS: [&str; 6] = ["CT+", "CT-", "PR+", "PS+", "Uu", "NE"];

/// Krippendorff's nominal alpha from the pairwise-disagreement definition:
/// 1 − (n − 1) · Σ_u (1/(m_u − 1)) Σ_{i≠j} [c_i ≠ c_j] / Σ_{c≠k} n_c n_k.
pub fn alpha_pairwise(items: &[Vec<usize>]) -> Option<f64> {
    let pairable: Vec<&Vec<usize>> = items.iter().filter(|v| v.len() >= 2).collect();
    let n: usize = pairable.iter().map(|v| v.len()).sum();
    let mut observed = 0.0;
    for v in &pairable {
        let mut d = 0usize;
        for i in 0..v.len() {
            for j in 0..v.len() {
                if i != j && v[i] != v[j] {
                    d += 1;
                }
            }
        }
        observed += d as f64 / (v.len() - 1) as f64;
    }
    let mut totals: BTreeMap<usize, usize> = BTreeMap::new();
    for v in &pairable {
        for &c in v.iter() {
            *totals.entry(c).or_default() += 1;
        }
    }
    let mut expected = 0usize;
    for (&a, &na) in &totals {
        for (&b, &nb) in &totals {
            if a != b {
                expected += na * nb;
            }
        }
    }
    if expected == 0 {
        return None;
    }
    Some(1.0 - (n - 1) as f64 * observed / expected as f64)
}

pub fn canonical(s: &str) -> String {
    let s: String = s.nfc().collect::<String>().to_lowercase();
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn jsonl(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

/// One tuple as read straight from the store JSON.
#[derive(Debug, Clone)]
pub struct RawTuple {
    pub doc: String,
    pub sent: String,
    pub source_token: Option<usize>,
    pub surface: String,
    pub event: usize,
    pub label: String,
    pub probs: Option<[f64; 6]>,
}

#[derive(Debug, Clone)]
pub struct RawSpan {
    pub doc: String,
    pub sent: String,
    pub start: usize,
    pub end: usize,
    pub kind: String,
    pub surface: String,
}

/// Recomputes every corpus analysis from the raw files with plain loops.
pub struct NaiveCorpus {
    pub tuples: Vec<RawTuple>,
    pub spans: Vec<RawSpan>,
    pub ideology: HashMap<String, String>,
}

impl NaiveCorpus {
    pub fn load(store: &Path, ner: &Path, meta: &Path) -> Self {
        let tuples = jsonl(store)
            .into_iter()
            .map(|v| RawTuple {
                doc: v["doc_id"].as_str().unwrap().into(),
                sent: v["sent_id"].as_str().unwrap().into(),
                source_token: v["source"]["token"].as_u64().map(|t| t as usize),
                surface: v["source"]["surface"].as_str().unwrap().into(),
                event: v["event"]["token"].as_u64().unwrap() as usize,
                label: v["label"].as_str().unwrap().into(),
                probs: v.get("probs").map(|p| LABELS.map(|l| p[l].as_f64().unwrap())),
            })
            .collect();
        let spans = jsonl(ner)
            .into_iter()
            .map(|v| RawSpan {
                doc: v["doc_id"].as_str().unwrap().into(),
                sent: v["sent_id"].as_str().unwrap().into(),
                start: v["start"].as_u64().unwrap() as usize,
                end: v["end"].as_u64().unwrap() as usize,
                kind: v["type"].as_str().unwrap().into(),
                surface: v["surface"].as_str().unwrap().into(),
            })
            .collect();
        let ideology = std::fs::read_to_string(meta)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split('\t').collect();
                (f[0].to_string(), f[4].to_string())
            })
            .collect();
        NaiveCorpus {
            tuples,
            spans,
            ideology,
        }
    }

    /// Earliest, then longest, span covering the token.
    pub fn span(&self, doc: &str, sent: &str, token: usize) -> Option<&RawSpan> {
        let mut best: Option<&RawSpan> = None;
        for s in &self.spans {
            if s.doc == doc && s.sent == sent && s.start <= token && token <= s.end {
                let better = match best {
                    None => true,
                    Some(b) => s.start < b.start || (s.start == b.start && s.end > b.end),
                };
                if better {
                    best = Some(s);
                }
            }
        }
        best
    }

    pub fn name(&self, t: &RawTuple) -> Option<String> {
        let token = t.source_token?;
        Some(match self.span(&t.doc, &t.sent, token) {
            Some(s) => canonical(&s.surface),
            None => canonical(&t.surface),
        })
    }

    /// holder -> (books, mentions)
    pub fn holders(&self) -> BTreeMap<String, (BTreeSet<String>, usize)> {
        let mut holding: BTreeSet<(String, String, usize)> = BTreeSet::new();
        for t in &self.tuples {
            if let Some(tok) = t.source_token {
                if t.label != "NE" {
                    holding.insert((t.doc.clone(), t.sent.clone(), tok));
                }
            }
        }
        let mut out: BTreeMap<String, (BTreeSet<String>, usize)> = BTreeMap::new();
        for (doc, sent, tok) in holding {
            let t = self
                .tuples
                .iter()
                .find(|t| t.doc == doc && t.sent == sent && t.source_token == Some(tok))
                .unwrap();
            let e = out.entry(self.name(t).unwrap()).or_default();
            e.0.insert(doc);
            e.1 += 1;
        }
        out
    }

    pub fn belief_score_by_type(&self) -> BTreeMap<String, f64> {
        let mut sentences: BTreeMap<(String, String), Vec<&RawTuple>> = BTreeMap::new();
        for t in &self.tuples {
            sentences.entry((t.doc.clone(), t.sent.clone())).or_default().push(t);
        }
        let mut acc: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for ((doc, sent), ts) in &sentences {
            let events: BTreeSet<usize> = ts.iter().map(|t| t.event).collect();
            let sources: BTreeSet<usize> = ts.iter().filter_map(|t| t.source_token).collect();
            for s in sources {
                let Some(span) = self.span(doc, sent, s) else { continue };
                let held = ts
                    .iter()
                    .filter(|t| t.source_token == Some(s) && t.label != "NE")
                    .count();
                acc.entry(span.kind.clone())
                    .or_default()
                    .push(held as f64 / events.len() as f64);
            }
        }
        acc.into_iter()
            .map(|(k, v)| (k, v.iter().sum::<f64>() / v.len() as f64))
            .collect()
    }

    pub fn jaccard(&self) -> f64 {
        let a: BTreeSet<String> = self.holders().into_keys().collect();
        let b: BTreeSet<String> = self
            .spans
            .iter()
            .filter(|s| s.kind != "OTHER")
            .map(|s| canonical(&s.surface))
            .collect();
        a.intersection(&b).count() as f64 / a.union(&b).count() as f64
    }

    /// (name, n_left, n_right, ratio), unsorted.
    pub fn citation_rows(&self, min_books: usize) -> Vec<(String, usize, usize, f64)> {
        let total = |code: &str| self.ideology.values().filter(|v| v.as_str() == code).count();
        let (tl, tr) = (total("L"), total("R"));
        let mut rows = Vec::new();
        for (name, (books, _)) in self.holders() {
            let nl = books.iter().filter(|b| self.ideology[*b] == "L").count();
            let nr = books.iter().filter(|b| self.ideology[*b] == "R").count();
            if nl + nr >= min_books {
                let ratio = ((nl + 1) as f64 / (tl + 1) as f64) / ((nr + 1) as f64 / (tr + 1) as f64);
                rows.push((name, nl, nr, ratio));
            }
        }
        rows
    }

    fn expected(p: &[f64; 6]) -> f64 {
        // only CT+ and CT- are polar
        (p[0] - p[1]) / (1.0 - p[5])
    }

    /// Mean E[F] over non-NE tuples of a source; `None` selects the author.
    pub fn source_score(&self, name: Option<&str>) -> (f64, usize) {
        let mut xs = Vec::new();
        for t in &self.tuples {
            let hit = match name {
                None => t.source_token.is_none(),
                Some(n) => self.name(t).as_deref() == Some(n),
            };
            if hit && t.label != "NE" {
                xs.push(Self::expected(t.probs.as_ref().unwrap()));
            }
        }
        (xs.iter().sum::<f64>() / xs.len() as f64, xs.len())
    }
}

/// Runs a CLI invocation and panics with stderr if it fails.
pub fn run_ok(args: &[&str]) -> Vec<u8> {
    let out = run_cli(args);
    assert!(
        out.status.success(),
        "{args:?} exited with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

/// extract -> predict (file) -> analyze hedging for one transcript.
pub fn hedging_pipeline(name: &str, work: &Path, jobs: &str) -> Value {
    let corpus = work.join(format!("{name}-corpus"));
    std::fs::create_dir_all(&corpus).unwrap();
    std::fs::copy(
        fixture(&format!("hedging/{name}.conllu")),
        corpus.join(format!("{name}.conllu")),
    )
    .unwrap();
    let store = work.join(format!("{name}.tuples.jsonl"));
    let labeled = work.join(format!("{name}.labeled.jsonl"));
    let predictions = fixture(&format!("hedging/{name}.predictions.jsonl"));
    run_ok(&[
        "--jobs",
        jobs,
        "extract",
        "--corpus",
        corpus.to_str().unwrap(),
        "-o",
        store.to_str().unwrap(),
    ]);
    run_ok(&[
        "--jobs",
        jobs,
        "predict",
        "--input",
        store.to_str().unwrap(),
        "--predictor",
        &format!("file:{}", predictions.display()),
        "-o",
        labeled.to_str().unwrap(),
    ]);
    let out = run_ok(&[
        "--jobs",
        jobs,
        "analyze",
        "hedging",
        "--store",
        labeled.to_str().unwrap(),
    ]);
    serde_json::from_slice(&out).unwrap()
}

/// Runs every subcommand with `--jobs jobs` and returns the outputs by name.
pub fn full_pipeline(jobs: &str) -> BTreeMap<String, Vec<u8>> {
    let work = tempfile::tempdir().unwrap();
    let w = |name: &str| work.path().join(name).to_str().unwrap().to_string();
    let mut out = BTreeMap::new();
    let corpus = w("corpus");
    std::fs::create_dir_all(&corpus).unwrap();
    std::fs::copy(
        fixture("extraction/golden.conllu"),
        Path::new(&corpus).join("golden.conllu"),
    )
    .unwrap();
    for name in ["bush", "carter", "coltart"] {
        std::fs::copy(
            fixture(&format!("hedging/{name}.conllu")),
            Path::new(&corpus).join(format!("{name}.conllu")),
        )
        .unwrap();
    }
    let f = |p: &str| fixture(p).to_str().unwrap().to_string();
    let j = ["--jobs", jobs];
    let cmds: Vec<(&str, Vec<String>)> = vec![
        (
            "extract",
            vec![
                "extract".into(),
                "--corpus".into(),
                corpus.clone(),
                "-o".into(),
                w("extract"),
            ],
        ),
        (
            "extract-sip",
            vec![
                "extract".into(),
                "--corpus".into(),
                corpus.clone(),
                "--mode".into(),
                "sip".into(),
                "-o".into(),
                w("extract-sip"),
            ],
        ),
        (
            "predict",
            vec![
                "predict".into(),
                "--input".into(),
                w("extract"),
                "--corpus".into(),
                corpus.clone(),
                "-o".into(),
                w("predict"),
            ],
        ),
        (
            "aggregate",
            vec![
                "aggregate".into(),
                "--annotations".into(),
                f("mace/planted.csv"),
                "--seed".into(),
                "7".into(),
                "-o".into(),
                w("aggregate"),
            ],
        ),
        (
            "evaluate",
            vec![
                "evaluate".into(),
                "--gold".into(),
                f("metrics/gold.jsonl"),
                "--pred".into(),
                f("metrics/pred.jsonl"),
                "--compare".into(),
                f("metrics/gold.jsonl"),
                "--bootstrap-samples".into(),
                "300".into(),
                "--seed".into(),
                "3".into(),
                "-o".into(),
                w("evaluate"),
            ],
        ),
        (
            "citation",
            vec![
                "analyze".into(),
                "citation-ratio".into(),
                "--store".into(),
                f("analytics/store.jsonl"),
                "--ner".into(),
                f("analytics/ner.jsonl"),
                "--meta".into(),
                f("analytics/books.tsv"),
                "--min-books".into(),
                "2".into(),
                "-o".into(),
                w("citation"),
            ],
        ),
        (
            "hedging",
            vec![
                "analyze".into(),
                "hedging".into(),
                "--store".into(),
                w("predict"),
                "--all-sources".into(),
                "-o".into(),
                w("hedging"),
            ],
        ),
    ];
    for (name, args) in cmds {
        let mut all: Vec<&str> = j.to_vec();
        all.extend(args.iter().map(String::as_str));
        run_ok(&all);
        out.insert(name.to_string(), std::fs::read(w(name)).unwrap());
    }
    let agreement = run_ok(&["--jobs", jobs, "agreement", "--annotations", &f("mace/planted.csv")]);
    out.insert("agreement".into(), agreement);
    out
}

/// sent_id -> (events, loose sources, sip sources)
pub type Golden = BTreeMap<String, [Vec<usize>; 3]>;

pub fn golden() -> Golden {
    let text = std::fs::read_to_string(fixture("extraction/expected.tsv")).unwrap();
    let parse = |s: &str| -> Vec<usize> {
        if s == "-" {
            Vec::new()
        } else {
            s.split(',').map(|x| x.parse().unwrap()).collect()
        }
    };
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[0].to_string(), [parse(f[1]), parse(f[2]), parse(f[3])])
        })
        .collect()
}

/// Lines describing every mismatch against the hand-annotated sets.
pub fn golden_diffs() -> Vec<String> {
    let (sentences, _) = read_conllu_file(fixture("extraction/golden.conllu")).unwrap();
    let expected = golden();
    let mut diffs = Vec::new();
    if sentences.len() != expected.len() {
        diffs.push(format!(
            "{} sentences vs {} golden rows",
            sentences.len(),
            expected.len()
        ));
    }
    for s in &sentences {
        let Some(want) = expected.get(&s.sent_id) else {
            diffs.push(format!("{}: no golden row", s.sent_id));
            continue;
        };
        for (col, mode) in [(1, ExtractionMode::Loose), (2, ExtractionMode::Sip)] {
            let config = ExtractionConfig::with_mode(mode);
            let events: Vec<usize> = extract_events(s, &config).iter().map(|e| e.token_index).collect();
            let sources: Vec<usize> = extract_sources(s, &config)
                .iter()
                .filter_map(|x| x.token_index())
                .collect();
            if events != want[0] {
                diffs.push(format!("{} {mode:?} events {events:?} != {:?}", s.sent_id, want[0]));
            }
            if sources != want[col] {
                diffs.push(format!("{} {mode:?} sources {sources:?} != {:?}", s.sent_id, want[col]));
            }
        }
    }
    diffs
}

/// Differences between the library analytics and `NaiveCorpus` on the
/// synthetic ten-book corpus.
pub fn analytics_mismatches() -> Vec<String> {
    use stancegraph::analytics::{self, NerIndex, SourceSelector};
    use stancegraph::ingest::{read_book_metadata, read_ner_spans, read_tuples};

    let (store, ner, meta) = (
        fixture("analytics/store.jsonl"),
        fixture("analytics/ner.jsonl"),
        fixture("analytics/books.tsv"),
    );
    let naive = NaiveCorpus::load(&store, &ner, &meta);
    let graphs = read_tuples(&store).unwrap();
    let spans = read_ner_spans(&ner).unwrap();
    let books = read_book_metadata(&meta).unwrap();
    let index = NerIndex::new(&spans);
    let mut bad = Vec::new();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;

    let records = analytics::belief_holders(&graphs, &index);
    let got: BTreeMap<String, (BTreeSet<String>, usize)> = records
        .iter()
        .map(|r| (r.canonical.clone(), (r.books.clone(), r.mention_count)))
        .collect();
    let want = naive.holders();
    if got != want {
        bad.push(format!("belief holders: {got:?} != {want:?}"));
    }

    let got: BTreeMap<String, f64> = analytics::belief_score_by_type(&graphs, &index)
        .into_iter()
        .map(|(t, s)| (t.to_string(), s))
        .collect();
    let want = naive.belief_score_by_type();
    if got.keys().ne(want.keys()) || got.iter().any(|(k, v)| !close(*v, want[k])) {
        bad.push(format!("belief score: {got:?} != {want:?}"));
    }

    let j = analytics::jaccard(&analytics::belief_set(&records), &analytics::ner_entity_set(&spans));
    if !close(j, naive.jaccard()) {
        bad.push(format!("jaccard {j} != {}", naive.jaccard()));
    }

    for min_books in [1, 2, 3, 5] {
        let ranking = analytics::citation_ratios(&records, &books, min_books).unwrap();
        let mut want = naive.citation_rows(min_books);
        want.sort_by(|a, b| b.3.partial_cmp(&a.3).unwrap().then(a.0.cmp(&b.0)));
        let got: Vec<(String, usize, usize, f64)> = ranking
            .left_leaning
            .iter()
            .map(|r| (r.canonical.clone(), r.n_left, r.n_right, r.ratio))
            .collect();
        if got != want {
            bad.push(format!("citation ratios (min {min_books}): {got:?} != {want:?}"));
        }
        let reversed: Vec<&str> = ranking.right_leaning.iter().map(|r| r.canonical.as_str()).collect();
        let mut asc = want.clone();
        asc.sort_by(|a, b| a.3.partial_cmp(&b.3).unwrap().then(a.0.cmp(&b.0)));
        if reversed != asc.iter().map(|r| r.0.as_str()).collect::<Vec<_>>() {
            bad.push(format!("right-leaning order (min {min_books})"));
        }
    }

    // E[F] per tuple
    let mut n = 0;
    for g in &graphs {
        for t in g.tuples() {
            let raw = naive
                .tuples
                .iter()
                .find(|r| {
                    r.doc == g.doc_id()
                        && r.sent == g.sent_id()
                        && r.source_token == t.source.token_index()
                        && r.event == t.event.token_index
                })
                .unwrap();
            let p = raw.probs.unwrap();
            let want = (p[0] - p[1]) / (1.0 - p[5]);
            let got = analytics::expected_stance(&t.dist.unwrap()).unwrap();
            if !close(got, want) {
                bad.push(format!("E[F] {got} != {want}"));
            }
            n += 1;
        }
    }
    if n != naive.tuples.len() {
        bad.push(format!("{n} tuples read vs {} raw", naive.tuples.len()));
    }

    let selectors: Vec<(SourceSelector, Option<&str>)> = vec![
        (SourceSelector::Author, None),
        ("Media".parse().unwrap(), Some("media")),
        ("Barack  Obama".parse().unwrap(), Some("barack obama")),
        ("founders".parse().unwrap(), Some("founders")),
        ("Fox News".parse().unwrap(), Some("fox news")),
    ];
    for (sa, na) in &selectors {
        for (sb, nb) in &selectors {
            let d = analytics::epistemological_difference(&graphs, &index, sa, sb).unwrap();
            let (a, ca) = naive.source_score(*na);
            let (b, cb) = naive.source_score(*nb);
            if d.score_a.tuples != ca || d.score_b.tuples != cb || !close(d.ed, (a - b).abs()) {
                bad.push(format!("ED {na:?} vs {nb:?}: {} != {}", d.ed, (a - b).abs()));
            }
        }
    }
    bad
}

/// Author at E[F] 0.32, the Times at 0.95.
pub fn ed_example() -> f64 {
    let mut p = [0.0; 6];
    p[0] = 0.66;
    p[1] = 0.34;
    let author = stancegraph::StanceDistribution::new(p).unwrap();
    p[0] = 0.975;
    p[1] = 0.025;
    let times = stancegraph::StanceDistribution::new(p).unwrap();
    let g = stancegraph::build_graph(
        "d",
        "1",
        Vec::new(),
        vec![
            stancegraph::SourceRef::Author,
            stancegraph::SourceRef::mention(0, "Times"),
        ],
        vec![stancegraph::EventRef::new(2, "e")],
    )
    .unwrap()
    .with_distributions(vec![author, times])
    .unwrap();
    stancegraph::analytics::epistemological_difference(
        &[g],
        &stancegraph::analytics::NerIndex::default(),
        &stancegraph::analytics::SourceSelector::Author,
        &"Times".parse().unwrap(),
    )
    .unwrap()
    .ed
}
