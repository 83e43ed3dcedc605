//! Regenerates the synthetic fixtures under `tests/fixtures`.
//!
//! cargo run -p stancegraph --example build_fixtures
//!
//! Output is deterministic; rerunning must leave the tree unchanged.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stancegraph::extract::{extract_graph, ExtractionConfig};
use stancegraph::ingest::annotations::{write_annotations, AnnotationRecord, AnnotationSet};
use stancegraph::ingest::conllu::parse_conllu_str;
use stancegraph::ingest::{write_ner_spans, write_tuples, EntityType, NerSpan};
use stancegraph::predict::remote::PredictRequest;
use stancegraph::{build_graph, EventRef, SentenceGraph, SourceRef, StanceDistribution, StanceLabel};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn dir(name: &str) -> PathBuf {
    let d = fixtures().join(name);
    fs::create_dir_all(&d).unwrap();
    d
}

const TARGET_F1: [f64; 6] = [90.7, 78.4, 51.4, 62.7, 84.8, 97.8];

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Every class c has `m` false negatives, all predicted as class c+1, so
/// F1_c = TP_c / (TP_c + m). Finds the smallest m with integer TPs that
/// hit every published per-class and macro value at one decimal.
fn metrics_counts() -> (usize, [usize; 6]) {
    for m in 10..500 {
        let mut tps = [0usize; 6];
        let mut ok = true;
        for (c, &target) in TARGET_F1.iter().enumerate() {
            let f = target / 100.0;
            let guess = (f * m as f64 / (1.0 - f)).round() as usize;
            let hit =
                (guess.saturating_sub(3)..guess + 4).find(|&tp| round1(100.0 * tp as f64 / (tp + m) as f64) == target);
            match hit {
                Some(tp) => tps[c] = tp,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let f1: Vec<f64> = tps.iter().map(|&tp| tp as f64 / (tp + m) as f64).collect();
        let all = 100.0 * f1.iter().sum::<f64>() / 6.0;
        let non_ne = 100.0 * f1[..5].iter().sum::<f64>() / 5.0;
        if round1(all) == 77.6 && round1(non_ne) == 73.6 {
            return (m, tps);
        }
    }
    panic!("no construction found");
}

fn author_graph(doc: &str, sent: usize, n_events: usize) -> SentenceGraph {
    let events = (0..n_events).map(|e| EventRef::new(e, format!("e{e}"))).collect();
    build_graph(doc, format!("{sent:04}"), Vec::new(), vec![SourceRef::Author], events).unwrap()
}

fn metrics_fixture() {
    let (m, tps) = metrics_counts();
    let mut pairs: Vec<(StanceLabel, StanceLabel)> = Vec::new();
    for (c, &tp) in tps.iter().enumerate() {
        let gold = StanceLabel::ALL[c];
        pairs.extend(std::iter::repeat_n((gold, gold), tp));
        pairs.extend(std::iter::repeat_n((gold, StanceLabel::ALL[(c + 1) % 6]), m));
    }
    pairs.shuffle(&mut ChaCha8Rng::seed_from_u64(2));
    let per_sentence = 8;
    let mut gold = Vec::new();
    let mut pred = Vec::new();
    for (s, chunk) in pairs.chunks(per_sentence).enumerate() {
        let mut g = author_graph("factbank-test", s, chunk.len());
        let mut p = g.clone();
        for (i, &(gl, pl)) in chunk.iter().enumerate() {
            g.set_prediction(i, Some(gl), None).unwrap();
            p.set_prediction(i, Some(pl), None).unwrap();
        }
        gold.push(g);
        pred.push(p);
    }
    let d = dir("metrics");
    write_tuples(d.join("gold.jsonl"), &gold).unwrap();
    write_tuples(d.join("pred.jsonl"), &pred).unwrap();
    println!("metrics: m={m} tp={tps:?} n={}", pairs.len());
}

const SUBJECTS: [(&str, &str); 8] = [
    ("we", "PRON"),
    ("they", "PRON"),
    ("people", "NOUN"),
    ("families", "NOUN"),
    ("Congress", "PROPN"),
    ("workers", "NOUN"),
    ("America", "PROPN"),
    ("it", "PRON"),
];
const VERBS: [&str; 10] = [
    "grow", "work", "rise", "fail", "change", "recover", "vote", "wait", "succeed", "act",
];
const BELIEFS: [&str; 4] = ["believe", "know", "think", "expect"];

/// Writes `n_events` worth of single- and two-clause sentences.
fn transcript_conllu(name: &str, n_events: usize, rng: &mut ChaCha8Rng) -> String {
    let mut out = format!("# newdoc id = {name}\n");
    let mut left = n_events;
    let mut sent = 0;
    while left > 0 {
        sent += 1;
        let (s1, p1) = SUBJECTS[rng.gen_range(0..SUBJECTS.len())];
        let v1 = VERBS[rng.gen_range(0..VERBS.len())];
        writeln!(out, "# sent_id = {sent}").unwrap();
        if left >= 2 && rng.gen_bool(0.4) {
            let (s2, p2) = SUBJECTS[rng.gen_range(0..SUBJECTS.len())];
            let b = BELIEFS[rng.gen_range(0..BELIEFS.len())];
            writeln!(out, "# text = {s1} {b} {s2} will {v1} .").unwrap();
            writeln!(out, "1\t{s1}\t{}\t{p1}\t_\t_\t2\tnsubj\t_\t_", s1.to_lowercase()).unwrap();
            writeln!(out, "2\t{b}\t{b}\tVERB\t_\t_\t0\troot\t_\t_").unwrap();
            writeln!(out, "3\t{s2}\t{}\t{p2}\t_\t_\t5\tnsubj\t_\t_", s2.to_lowercase()).unwrap();
            writeln!(out, "4\twill\twill\tAUX\t_\t_\t5\taux\t_\t_").unwrap();
            writeln!(out, "5\t{v1}\t{v1}\tVERB\t_\t_\t2\tccomp\t_\t_").unwrap();
            writeln!(out, "6\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_\n").unwrap();
            left -= 2;
        } else {
            writeln!(out, "# text = {s1} will {v1} .").unwrap();
            writeln!(out, "1\t{s1}\t{}\t{p1}\t_\t_\t3\tnsubj\t_\t_", s1.to_lowercase()).unwrap();
            writeln!(out, "2\twill\twill\tAUX\t_\t_\t3\taux\t_\t_").unwrap();
            writeln!(out, "3\t{v1}\t{v1}\tVERB\t_\t_\t0\troot\t_\t_").unwrap();
            writeln!(out, "4\t.\t.\tPUNCT\t_\t_\t3\tpunct\t_\t_\n").unwrap();
            left -= 1;
        }
    }
    out
}

/// Speaker, PR+/PS+ author stances, other non-NE author stances, NE ones.
const TRANSCRIPTS: [(&str, usize, usize, usize); 3] =
    [("bush", 20, 350, 30), ("carter", 41, 452, 57), ("coltart", 5, 36, 9)];

fn hedging() {
    let d = dir("hedging");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for &(name, hedged, certain, ne) in &TRANSCRIPTS {
        let text = transcript_conllu(name, hedged + certain + ne, &mut rng);
        fs::write(d.join(format!("{name}.conllu")), &text).unwrap();
        let (sentences, skipped) = parse_conllu_str(&text, name).unwrap();
        assert_eq!(skipped, 0);
        let mut author_labels: Vec<StanceLabel> = Vec::new();
        for i in 0..hedged {
            author_labels.push(if i % 3 == 0 {
                StanceLabel::PsPos
            } else {
                StanceLabel::PrPos
            });
        }
        for i in 0..certain {
            author_labels.push(match i % 10 {
                0 => StanceLabel::CtNeg,
                1 => StanceLabel::Uu,
                _ => StanceLabel::CtPos,
            });
        }
        author_labels.extend(std::iter::repeat_n(StanceLabel::Ne, ne));
        author_labels.shuffle(&mut rng);
        let mut next = author_labels.into_iter();
        let config = ExtractionConfig::default();
        let mut graphs = Vec::new();
        for s in &sentences {
            let g = extract_graph(s, &config).unwrap();
            let dists = g
                .tuples()
                .iter()
                .map(|t| {
                    let label = if t.source.is_author() {
                        next.next().expect("enough author labels")
                    } else if rng.gen_bool(0.5) {
                        StanceLabel::Ne
                    } else {
                        StanceLabel::CtPos
                    };
                    StanceDistribution::smoothed(label, 0.85)
                })
                .collect();
            graphs.push(g.with_distributions(dists).unwrap());
        }
        assert!(next.next().is_none());
        write_tuples(d.join(format!("{name}.predictions.jsonl")), &graphs).unwrap();
    }
}

/// (surface tokens, entity type if tagged)
const MENTIONS: [(&[&str], Option<EntityType>); 11] = [
    (&["Barack", "Obama"], Some(EntityType::Person)),
    (&["Obama"], Some(EntityType::Person)),
    (&["Senate"], Some(EntityType::Organization)),
    (&["America"], Some(EntityType::Gpe)),
    (&["Republicans"], Some(EntityType::Norp)),
    (&["Fox", "News"], Some(EntityType::Organization)),
    (&["media"], None),
    (&["Founders"], None),
    (&["founders"], None),
    (&["experts"], None),
    (&["they"], None),
];

fn random_dist(rng: &mut ChaCha8Rng) -> StanceDistribution {
    let favored = rng.gen_range(0..6);
    let mut w = [0u64; 6];
    for (i, x) in w.iter_mut().enumerate() {
        *x = rng.gen_range(1..100) + if i == favored { 300 } else { 0 };
    }
    // NE-heavy a third of the time
    if rng.gen_bool(0.33) {
        w[5] += 400;
    }
    let total: u64 = w.iter().sum();
    let mut micros = w.map(|x| x * 1_000_000 / total);
    let rest = 1_000_000 - micros.iter().sum::<u64>();
    micros[favored] += rest;
    StanceDistribution::from_micros(micros).unwrap()
}

fn analytics_corpus() {
    let d = dir("analytics");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ideology = ["L", "L", "L", "L", "R", "R", "R", "R", "C", "C"];
    let mut meta = String::from("book_id\ttitle\tauthor\tyear\tideology\n");
    let mut graphs = Vec::new();
    let mut spans = Vec::new();
    for (b, code) in ideology.iter().enumerate() {
        let book = format!("b{:02}", b + 1);
        writeln!(
            meta,
            "{book}\tSynthetic Book {}\tAuthor {}\t{}\t{code}",
            b + 1,
            b + 1,
            2001 + b
        )
        .unwrap();
        for s in 0..12 {
            let sent = format!("{}", s + 1);
            let mut pos = 0;
            let mut sources = vec![SourceRef::Author];
            let mut used = Vec::new();
            for _ in 0..rng.gen_range(0..4) {
                let m = rng.gen_range(0..MENTIONS.len());
                if used.contains(&m) {
                    continue;
                }
                used.push(m);
                let (tokens, ty) = MENTIONS[m];
                let head = pos + tokens.len() - 1;
                sources.push(SourceRef::mention(head, tokens[tokens.len() - 1]));
                if let Some(ty) = ty {
                    spans.push(NerSpan {
                        doc_id: book.clone(),
                        sent_id: sent.clone(),
                        start_token: pos,
                        end_token: head,
                        entity_type: ty,
                        surface: tokens.join(" "),
                    });
                }
                pos += tokens.len() + 1;
            }
            if rng.gen_bool(0.2) {
                spans.push(NerSpan {
                    doc_id: book.clone(),
                    sent_id: sent.clone(),
                    start_token: pos,
                    end_token: pos,
                    entity_type: EntityType::Other,
                    surface: "1990".into(),
                });
                pos += 1;
            }
            let events: Vec<EventRef> = (0..rng.gen_range(1..4))
                .map(|e| EventRef::new(pos + 2 * e, format!("v{}", e + 1)))
                .collect();
            let g = build_graph(book.clone(), sent, Vec::new(), sources, events).unwrap();
            let dists = (0..g.tuples().len()).map(|_| random_dist(&mut rng)).collect();
            graphs.push(g.with_distributions(dists).unwrap());
        }
    }
    write_tuples(d.join("store.jsonl"), &graphs).unwrap();
    write_ner_spans(d.join("ner.jsonl"), &spans).unwrap();
    fs::write(d.join("books.tsv"), meta).unwrap();
}

fn metadata() {
    let mut out = String::from("book_id\ttitle\tauthor\tyear\tideology\n");
    let mut codes: Vec<&str> = Vec::new();
    codes.extend(std::iter::repeat_n("L", 133));
    codes.extend(std::iter::repeat_n("R", 226));
    codes.extend(std::iter::repeat_n("C", 11));
    codes.shuffle(&mut ChaCha8Rng::seed_from_u64(5));
    for (i, code) in codes.iter().enumerate() {
        writeln!(
            out,
            "bk{:03}\tTitle {}\tWriter {}\t{}\t{code}",
            i + 1,
            i + 1,
            i % 97,
            1990 + i % 30
        )
        .unwrap();
    }
    fs::write(dir("meta").join("books.tsv"), out).unwrap();
}

fn planted_annotations() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let labels = vec!["a".to_string(), "b".into(), "c".into()];
    let mut records = Vec::new();
    let mut gold = String::from("item_id,label\n");
    for i in 0..50 {
        let truth = rng.gen_range(0..3);
        writeln!(gold, "item{i:02},{}", labels[truth]).unwrap();
        for j in 0..8 {
            let label = if j < 4 {
                if rng.gen_bool(0.95) {
                    truth
                } else {
                    rng.gen_range(0..3)
                }
            } else {
                rng.gen_range(0..3)
            };
            records.push(AnnotationRecord {
                item_id: format!("item{i:02}"),
                annotator_id: format!("{}{j}", if j < 4 { "f" } else { "s" }),
                label_index: label,
            });
        }
    }
    let set = AnnotationSet {
        labels,
        records,
        duplicates: 0,
    };
    let d = dir("mace");
    let mut buf = Vec::new();
    write_annotations(&mut buf, &set).unwrap();
    fs::write(d.join("planted.csv"), buf).unwrap();
    fs::write(d.join("planted_gold.csv"), gold).unwrap();
}

fn remote_golden() {
    let tokens: Vec<String> = ["John", "said", "he", "left", "."]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let pairs = [
        (None, 1),
        (None, 3),
        (Some(0), 1),
        (Some(0), 3),
        (Some(2), 1),
        (Some(2), 3),
    ];
    let requests: Vec<PredictRequest> = pairs
        .iter()
        .map(|&(s, e)| PredictRequest {
            tokens: tokens.clone(),
            source_index: s,
            event_index: e,
        })
        .collect();
    let probs = [
        [0.912, 0.011, 0.014, 0.009, 0.021, 0.033],
        [0.102, 0.018, 0.061, 0.044, 0.731, 0.044],
        [0.021, 0.004, 0.006, 0.003, 0.012, 0.954],
        [0.843, 0.022, 0.047, 0.018, 0.031, 0.039],
        [0.015, 0.002, 0.004, 0.002, 0.011, 0.966],
        [0.019, 0.003, 0.005, 0.004, 0.013, 0.956],
    ];
    let responses: Vec<serde_json::Value> = probs
        .iter()
        .map(|p| {
            let map: serde_json::Map<String, serde_json::Value> = StanceLabel::ALL
                .iter()
                .zip(p)
                .map(|(l, x)| (l.as_str().to_string(), serde_json::json!(x)))
                .collect();
            serde_json::json!({ "probs": map })
        })
        .collect();
    let d = dir("remote");
    fs::write(
        d.join("requests.json"),
        serde_json::to_string_pretty(&requests).unwrap() + "\n",
    )
    .unwrap();
    fs::write(
        d.join("responses.json"),
        serde_json::to_string_pretty(&responses).unwrap() + "\n",
    )
    .unwrap();
}

fn main() {
    metrics_fixture();
    hedging();
    analytics_corpus();
    metadata();
    planted_annotations();
    remote_golden();
}
