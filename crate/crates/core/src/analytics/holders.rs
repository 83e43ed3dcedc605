use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::graph::{SentenceGraph, SourceRef};
use crate::ingest::{BookMeta, EntityType, Ideology, NerSpan};

/// NFC, lowercase, single spaces.
pub fn canonicalize(s: &str) -> String {
    let folded: String = s.nfc().collect::<String>().to_lowercase();
    folded.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// NER spans grouped by sentence for token lookups.
#[derive(Debug, Clone, Default)]
pub struct NerIndex {
    by_sentence: HashMap<(String, String), Vec<NerSpan>>,
}

impl NerIndex {
    pub fn new(spans: &[NerSpan]) -> Self {
        let mut by_sentence: HashMap<(String, String), Vec<NerSpan>> = HashMap::new();
        for s in spans {
            by_sentence
                .entry((s.doc_id.clone(), s.sent_id.clone()))
                .or_default()
                .push(s.clone());
        }
        // overlapping spans: the earliest, then the longest, wins
        for v in by_sentence.values_mut() {
            v.sort_by(|a, b| a.start_token.cmp(&b.start_token).then(b.end_token.cmp(&a.end_token)));
        }
        NerIndex { by_sentence }
    }

    pub fn span_at(&self, doc_id: &str, sent_id: &str, token: usize) -> Option<&NerSpan> {
        self.by_sentence
            .get(&(doc_id.to_string(), sent_id.to_string()))?
            .iter()
            .find(|s| s.contains(token))
    }

    /// Canonical name of a mention: the enclosing span's text if any,
    /// otherwise the token surface. `None` for the author.
    pub fn canonical_source(&self, graph: &SentenceGraph, source: &SourceRef) -> Option<String> {
        let token = source.token_index()?;
        Some(match self.span_at(graph.doc_id(), graph.sent_id(), token) {
            Some(span) => canonicalize(&span.surface),
            None => canonicalize(source.surface()),
        })
    }
}

/// Mention sources holding at least one non-NE stance in `graph`.
pub fn holders_in(graph: &SentenceGraph) -> Vec<&SourceRef> {
    graph
        .sources()
        .iter()
        .filter(|s| !s.is_author() && graph.tuples_of(s).any(|t| t.is_epistemic()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BeliefHolderRecord {
    pub canonical: String,
    pub books: BTreeSet<String>,
    pub mention_count: usize,
}

impl BeliefHolderRecord {
    /// Number of distinct books per ideology: (left, right, centrist).
    pub fn ideology_counts(&self, meta: &HashMap<String, Ideology>) -> Result<(usize, usize, usize)> {
        let mut counts = (0, 0, 0);
        for book in &self.books {
            match meta.get(book) {
                Some(Ideology::Left) => counts.0 += 1,
                Some(Ideology::Right) => counts.1 += 1,
                Some(Ideology::Centrist) => counts.2 += 1,
                None => return Err(Error::validation(format!("book {book:?} is not in the metadata"))),
            }
        }
        Ok(counts)
    }
}

pub fn ideology_map(meta: &[BookMeta]) -> HashMap<String, Ideology> {
    meta.iter().map(|m| (m.book_id.clone(), m.ideology)).collect()
}

/// Every mention source with a non-NE stance counts once toward its
/// canonical holder. Documents are books. Output is sorted by name.
pub fn belief_holders(graphs: &[SentenceGraph], ner: &NerIndex) -> Vec<BeliefHolderRecord> {
    let mut merged: BTreeMap<String, BeliefHolderRecord> = BTreeMap::new();
    for g in graphs {
        for s in holders_in(g) {
            let name = ner.canonical_source(g, s).expect("mentions have tokens");
            let rec = merged.entry(name.clone()).or_insert_with(|| BeliefHolderRecord {
                canonical: name,
                books: BTreeSet::new(),
                mention_count: 0,
            });
            rec.books.insert(g.doc_id().to_string());
            rec.mention_count += 1;
        }
    }
    merged.into_values().collect()
}

pub fn belief_set(records: &[BeliefHolderRecord]) -> BTreeSet<String> {
    records.iter().map(|r| r.canonical.clone()).collect()
}

/// Canonical surfaces of spans with one of the named entity types.
pub fn ner_entity_set(spans: &[NerSpan]) -> BTreeSet<String> {
    spans
        .iter()
        .filter(|s| s.entity_type.is_named())
        .map(|s| canonicalize(&s.surface))
        .collect()
}

/// |A ∩ B| / |A ∪ B|, 0 when both are empty.
pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderEval {
    pub precision: f64,
    pub recall: f64,
    pub true_positives: usize,
    pub predicted: usize,
    pub gold: usize,
}

fn holder_keys(graphs: &[SentenceGraph]) -> BTreeSet<(String, String, usize)> {
    graphs
        .iter()
        .flat_map(|g| {
            holders_in(g).into_iter().map(|s| {
                (
                    g.doc_id().to_string(),
                    g.sent_id().to_string(),
                    s.token_index().expect("mention"),
                )
            })
        })
        .collect()
}

/// Set precision and recall of (sentence, source) belief-holder membership.
pub fn belief_holder_eval(pred: &[SentenceGraph], gold: &[SentenceGraph]) -> Result<HolderEval> {
    let sentences = |gs: &[SentenceGraph]| -> BTreeSet<(String, String)> {
        gs.iter()
            .map(|g| (g.doc_id().to_string(), g.sent_id().to_string()))
            .collect()
    };
    let (ps, gs) = (sentences(pred), sentences(gold));
    if ps != gs {
        let missing = gs.symmetric_difference(&ps).next().expect("sets differ");
        return Err(Error::validation(format!(
            "prediction and gold cover different sentences (e.g. {}/{})",
            missing.0, missing.1
        )));
    }
    let p = holder_keys(pred);
    let g = holder_keys(gold);
    let tp = p.intersection(&g).count();
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            if num == 0 && p.is_empty() && g.is_empty() {
                1.0
            } else {
                0.0
            }
        } else {
            num as f64 / den as f64
        }
    };
    Ok(HolderEval {
        precision: ratio(tp, p.len()),
        recall: ratio(tp, g.len()),
        true_positives: tp,
        predicted: p.len(),
        gold: g.len(),
    })
}

/// Mean share of non-NE stances per mention instance inside an entity span,
/// by entity type. Types without instances are absent.
pub fn belief_score_by_type(graphs: &[SentenceGraph], ner: &NerIndex) -> BTreeMap<EntityType, f64> {
    let mut acc: BTreeMap<EntityType, (f64, usize)> = BTreeMap::new();
    for g in graphs {
        let n_events = g.events().len();
        if n_events == 0 {
            continue;
        }
        for s in g.sources() {
            let Some(token) = s.token_index() else { continue };
            let Some(span) = ner.span_at(g.doc_id(), g.sent_id(), token) else {
                continue;
            };
            let epistemic = g.tuples_of(s).filter(|t| t.is_epistemic()).count();
            let e = acc.entry(span.entity_type).or_insert((0.0, 0));
            e.0 += epistemic as f64 / n_events as f64;
            e.1 += 1;
        }
    }
    acc.into_iter().map(|(t, (sum, n))| (t, sum / n as f64)).collect()
}
