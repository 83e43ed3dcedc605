//! Tuple store: JSON Lines, one object per (source, event) tuple.
//!
//! Keys are written in a fixed order and probabilities with six decimals so
//! that equal stores serialize to identical bytes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::{build_graph, EventRef, SentenceGraph, SourceRef, StanceTuple};
use crate::label::{StanceDistribution, StanceLabel};

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

/// One store line, without the trailing newline.
pub fn format_tuple(doc_id: &str, sent_id: &str, tuple: &StanceTuple) -> String {
    let mut line = String::with_capacity(256);
    let token = match tuple.source.token_index() {
        Some(i) => i.to_string(),
        None => "null".to_string(),
    };
    write!(
        line,
        r#"{{"doc_id":{},"sent_id":{},"source":{{"kind":"{}","token":{},"surface":{}}},"event":{{"token":{},"surface":{}}},"label":"#,
        json_str(doc_id),
        json_str(sent_id),
        tuple.source.kind_str(),
        token,
        json_str(tuple.source.surface()),
        tuple.event.token_index,
        json_str(&tuple.event.surface),
    )
    .unwrap();
    match tuple.label {
        Some(label) => line.push_str(&json_str(label.as_str())),
        None => line.push_str("null"),
    }
    if let Some(dist) = &tuple.dist {
        line.push_str(r#","probs":{"#);
        for (i, (label, micros)) in StanceLabel::ALL.iter().zip(dist.to_micros()).enumerate() {
            if i > 0 {
                line.push(',');
            }
            write!(line, "\"{}\":{}.{:06}", label, micros / 1_000_000, micros % 1_000_000).unwrap();
        }
        line.push('}');
    }
    line.push('}');
    line
}

pub fn write_tuples_to<W: Write>(mut out: W, graphs: &[SentenceGraph]) -> std::io::Result<()> {
    for graph in graphs {
        for tuple in graph.tuples() {
            writeln!(out, "{}", format_tuple(graph.doc_id(), graph.sent_id(), tuple))?;
        }
    }
    out.flush()
}

pub fn write_tuples(path: impl AsRef<Path>, graphs: &[SentenceGraph]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_tuples_to(BufWriter::new(file), graphs).map_err(|e| Error::io(path, e))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    kind: String,
    token: Option<usize>,
    surface: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvent {
    token: usize,
    surface: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTuple {
    doc_id: String,
    sent_id: String,
    source: RawSource,
    event: RawEvent,
    label: Option<String>,
    probs: Option<BTreeMap<String, f64>>,
}

/// (source, event, label, dist, line)
type PendingTuple = (
    Option<usize>,
    usize,
    Option<StanceLabel>,
    Option<StanceDistribution>,
    usize,
);

struct PendingGraph {
    doc_id: String,
    sent_id: String,
    sources: BTreeMap<Option<usize>, SourceRef>,
    events: BTreeMap<usize, EventRef>,
    tuples: Vec<PendingTuple>,
}

fn parse_probs(probs: &BTreeMap<String, f64>) -> std::result::Result<StanceDistribution, String> {
    if probs.len() != 6 {
        return Err(format!("probs must have exactly six keys, found {}", probs.len()));
    }
    let mut values = [0.0; 6];
    for (key, &p) in probs {
        let label: StanceLabel = key.parse().map_err(|e: Error| e.to_string())?;
        values[label.index()] = p;
    }
    StanceDistribution::new(values).map_err(|e| e.to_string())
}

pub fn read_tuples(path: impl AsRef<Path>) -> Result<Vec<SentenceGraph>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_tuples_from(file, &path.display().to_string())
}

/// Reads a store into graphs.
///
/// Graphs appear in order of first mention; within a graph, sources are
/// ordered author first then by token, events by token. The lines of a
/// sentence must cover the full source × event cross product.
pub fn read_tuples_from<R: Read>(reader: R, name: &str) -> Result<Vec<SentenceGraph>> {
    let mut order: Vec<(String, String)> = Vec::new();
    let mut pending: HashMap<(String, String), PendingGraph> = HashMap::new();

    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(name, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawTuple = serde_json::from_str(&line).map_err(|e| Error::parse(name, line_no, e.to_string()))?;
        let perr = |msg: String| Error::parse(name, line_no, msg);

        let source = match (raw.source.kind.as_str(), raw.source.token) {
            ("AUTHOR", None) => SourceRef::Author,
            ("MENTION", Some(t)) => SourceRef::mention(t, raw.source.surface.clone()),
            (kind, token) => {
                return Err(perr(format!(
                    "invalid source kind/token combination {kind:?}/{token:?}"
                )))
            }
        };
        let label = raw
            .label
            .as_deref()
            .map(str::parse::<StanceLabel>)
            .transpose()
            .map_err(|e| perr(e.to_string()))?;
        let dist = raw.probs.as_ref().map(parse_probs).transpose().map_err(perr)?;

        let key = (raw.doc_id.clone(), raw.sent_id.clone());
        let entry = pending.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            PendingGraph {
                doc_id: raw.doc_id.clone(),
                sent_id: raw.sent_id.clone(),
                sources: BTreeMap::new(),
                events: BTreeMap::new(),
                tuples: Vec::new(),
            }
        });
        let token = source.token_index();
        if let Some(existing) = entry.sources.get(&token) {
            if existing != &source {
                return Err(perr(format!("conflicting surfaces for source {}", source.key())));
            }
        } else {
            entry.sources.insert(token, source);
        }
        let event = EventRef::new(raw.event.token, raw.event.surface);
        if let Some(existing) = entry.events.get(&event.token_index) {
            if existing != &event {
                return Err(perr(format!("conflicting surfaces for event {}", event.token_index)));
            }
        } else {
            entry.events.insert(event.token_index, event.clone());
        }
        entry.tuples.push((token, event.token_index, label, dist, line_no));
    }

    let mut graphs = Vec::with_capacity(order.len());
    for key in order {
        let p = pending.remove(&key).expect("pending graph");
        let expected = p.sources.len() * p.events.len();
        let mut seen = BTreeSet::new();
        for (s, e, _, _, line_no) in &p.tuples {
            if !seen.insert((*s, *e)) {
                return Err(Error::parse(name, *line_no, "duplicate (source, event) pair"));
            }
        }
        if seen.len() != expected {
            return Err(Error::validation(format!(
                "{name}: {}/{} has {} tuples but {} sources x {} events",
                p.doc_id,
                p.sent_id,
                seen.len(),
                p.sources.len(),
                p.events.len()
            )));
        }
        let source_pos: HashMap<Option<usize>, usize> = p.sources.keys().enumerate().map(|(i, k)| (*k, i)).collect();
        let event_pos: HashMap<usize, usize> = p.events.keys().enumerate().map(|(i, k)| (*k, i)).collect();
        let n_events = p.events.len();
        let mut graph = build_graph(
            p.doc_id,
            p.sent_id,
            Vec::new(),
            p.sources.into_values().collect(),
            p.events.into_values().collect(),
        )?;
        for (s, e, label, dist, line_no) in p.tuples {
            let at = source_pos[&s] * n_events + event_pos[&e];
            graph
                .set_prediction(at, label, dist)
                .map_err(|err| Error::parse(name, line_no, err.to_string()))?;
        }
        graphs.push(graph);
    }
    Ok(graphs)
}
