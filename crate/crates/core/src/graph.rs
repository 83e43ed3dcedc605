//! Per-sentence stance graph: every source paired with every event.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::label::{StanceDistribution, StanceLabel};

/// Surface used for the synthetic author source.
pub const AUTHOR_SURFACE: &str = "Author";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// 0-based position in the sentence.
    pub index: usize,
    pub form: String,
}

/// A belief-capable entity: the text's author, or a mention in the sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SourceRef {
    Author,
    Mention { token_index: usize, surface: String },
}

impl SourceRef {
    pub fn mention(token_index: usize, surface: impl Into<String>) -> Self {
        SourceRef::Mention {
            token_index,
            surface: surface.into(),
        }
    }

    pub fn is_author(&self) -> bool {
        matches!(self, SourceRef::Author)
    }

    pub fn token_index(&self) -> Option<usize> {
        match self {
            SourceRef::Author => None,
            SourceRef::Mention { token_index, .. } => Some(*token_index),
        }
    }

    pub fn surface(&self) -> &str {
        match self {
            SourceRef::Author => AUTHOR_SURFACE,
            SourceRef::Mention { surface, .. } => surface,
        }
    }

    pub fn kind_str(&self) -> &'static str {
        match self {
            SourceRef::Author => "AUTHOR",
            SourceRef::Mention { .. } => "MENTION",
        }
    }

    /// Stable key independent of the surface string, e.g. `AUTHOR` or `MENTION:3`.
    pub fn key(&self) -> String {
        match self {
            SourceRef::Author => "AUTHOR".to_string(),
            SourceRef::Mention { token_index, .. } => format!("MENTION:{token_index}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventRef {
    pub token_index: usize,
    pub surface: String,
}

impl EventRef {
    pub fn new(token_index: usize, surface: impl Into<String>) -> Self {
        EventRef {
            token_index,
            surface: surface.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StanceTuple {
    pub source: SourceRef,
    pub event: EventRef,
    pub label: Option<StanceLabel>,
    pub dist: Option<StanceDistribution>,
}

impl StanceTuple {
    pub fn is_epistemic(&self) -> bool {
        self.label.is_some_and(StanceLabel::is_epistemic)
    }
}

/// Sources, events and their full cross product for one sentence.
///
/// Tuples are ordered source-major, event-minor. Graphs loaded from a tuple
/// store carry no token list; bounds are checked only when tokens are known.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceGraph {
    doc_id: String,
    sent_id: String,
    tokens: Vec<Token>,
    sources: Vec<SourceRef>,
    events: Vec<EventRef>,
    tuples: Vec<StanceTuple>,
}

/// Builds a graph over the cross product of `sources` and `events`.
///
/// The author source is prepended when absent.
pub fn build_graph(
    doc_id: impl Into<String>,
    sent_id: impl Into<String>,
    tokens: Vec<Token>,
    sources: Vec<SourceRef>,
    events: Vec<EventRef>,
) -> Result<SentenceGraph> {
    let doc_id = doc_id.into();
    let sent_id = sent_id.into();

    let mut sources = sources;
    if !sources.iter().any(SourceRef::is_author) {
        sources.insert(0, SourceRef::Author);
    }

    let check_bounds = |index: usize| -> Result<()> {
        if !tokens.is_empty() && index >= tokens.len() {
            return Err(Error::OutOfBounds {
                doc_id: doc_id.clone(),
                sent_id: sent_id.clone(),
                index,
                len: tokens.len(),
            });
        }
        Ok(())
    };

    let mut seen = HashSet::new();
    for source in &sources {
        if let Some(index) = source.token_index() {
            check_bounds(index)?;
        }
        if !seen.insert(source.token_index()) {
            return Err(Error::DuplicateSource {
                doc_id: doc_id.clone(),
                sent_id: sent_id.clone(),
                kind: source.kind_str(),
                token: source.token_index(),
            });
        }
    }

    let mut seen_events = HashSet::new();
    for event in &events {
        check_bounds(event.token_index)?;
        if !seen_events.insert(event.token_index) {
            return Err(Error::validation(format!(
                "duplicate event at token {} in {doc_id}/{sent_id}",
                event.token_index
            )));
        }
    }

    let tuples = sources
        .iter()
        .flat_map(|source| {
            events.iter().map(move |event| StanceTuple {
                source: source.clone(),
                event: event.clone(),
                label: None,
                dist: None,
            })
        })
        .collect();

    Ok(SentenceGraph {
        doc_id,
        sent_id,
        tokens,
        sources,
        events,
        tuples,
    })
}

impl SentenceGraph {
    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn sent_id(&self) -> &str {
        &self.sent_id
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn sources(&self) -> &[SourceRef] {
        &self.sources
    }

    pub fn events(&self) -> &[EventRef] {
        &self.events
    }

    pub fn tuples(&self) -> &[StanceTuple] {
        &self.tuples
    }

    /// Tuples held by `source`, in event order.
    pub fn tuples_of<'a>(&'a self, source: &'a SourceRef) -> impl Iterator<Item = &'a StanceTuple> {
        self.tuples.iter().filter(move |t| &t.source == source)
    }

    pub fn is_labeled(&self) -> bool {
        self.tuples.iter().all(|t| t.label.is_some())
    }

    /// Attaches one distribution per tuple; labels become the argmax.
    pub fn with_distributions(mut self, dists: Vec<StanceDistribution>) -> Result<Self> {
        if dists.len() != self.tuples.len() {
            return Err(Error::validation(format!(
                "{} distributions for {} tuples in {}/{}",
                dists.len(),
                self.tuples.len(),
                self.doc_id,
                self.sent_id
            )));
        }
        for (tuple, dist) in self.tuples.iter_mut().zip(dists) {
            tuple.label = Some(dist.argmax());
            tuple.dist = Some(dist);
        }
        Ok(self)
    }

    /// Sets label and distribution of tuple `i` as loaded from a store.
    ///
    /// When both are given the label must be a (possibly tied) maximum of the
    /// distribution.
    pub fn set_prediction(
        &mut self,
        i: usize,
        label: Option<StanceLabel>,
        dist: Option<StanceDistribution>,
    ) -> Result<()> {
        if let (Some(label), Some(dist)) = (label, dist) {
            let best = dist.get(dist.argmax());
            if dist.get(label) < best - crate::label::SUM_TOLERANCE {
                return Err(Error::validation(format!(
                    "label {label} is not the most probable class in {}/{} tuple {i}",
                    self.doc_id, self.sent_id
                )));
            }
        }
        let tuple = self
            .tuples
            .get_mut(i)
            .ok_or_else(|| Error::validation(format!("tuple index {i} out of range")))?;
        tuple.label = label.or(dist.map(|d| d.argmax()));
        tuple.dist = dist;
        Ok(())
    }

    /// Drops labels and distributions, keeping the candidate structure.
    pub fn unlabeled(mut self) -> Self {
        for tuple in &mut self.tuples {
            tuple.label = None;
            tuple.dist = None;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tokens(words: &[&str]) -> Vec<Token> {
        words
            .iter()
            .enumerate()
            .map(|(index, form)| Token {
                index,
                form: form.to_string(),
            })
            .collect()
    }

    #[test]
    fn four_by_three() {
        let toks = tokens(&["a", "b", "c", "d", "e", "f", "g"]);
        let sources = vec![
            SourceRef::Author,
            SourceRef::mention(0, "a"),
            SourceRef::mention(1, "b"),
            SourceRef::mention(2, "c"),
        ];
        let events = vec![EventRef::new(4, "e"), EventRef::new(5, "f"), EventRef::new(6, "g")];
        let g = build_graph("d", "s", toks, sources, events).unwrap();
        assert_eq!(g.tuples().len(), 12);
    }

    #[test]
    fn author_only_no_events() {
        let g = build_graph("d", "s", tokens(&["x"]), vec![SourceRef::Author], vec![]).unwrap();
        assert_eq!(g.sources().len(), 1);
        assert!(g.tuples().is_empty());
    }

    #[test]
    fn author_is_injected() {
        let g = build_graph("d", "s", tokens(&["x", "y"]), vec![SourceRef::mention(0, "x")], vec![]).unwrap();
        assert_eq!(g.sources()[0], SourceRef::Author);
        assert_eq!(g.sources().len(), 2);
    }

    #[test]
    fn source_major_order() {
        let toks = tokens(&["a", "b", "c", "d", "e"]);
        let sources = vec![
            SourceRef::Author,
            SourceRef::mention(0, "a"),
            SourceRef::mention(1, "b"),
        ];
        let events = vec![EventRef::new(3, "d"), EventRef::new(4, "e")];
        let g = build_graph("d", "s", toks, sources.clone(), events.clone()).unwrap();
        let pairs: Vec<_> = g.tuples().iter().map(|t| (t.source.clone(), t.event.clone())).collect();
        let expected: Vec<_> = sources
            .iter()
            .flat_map(|s| events.iter().map(move |e| (s.clone(), e.clone())))
            .collect();
        assert_eq!(pairs, expected);
        assert_eq!(pairs[1], (SourceRef::Author, EventRef::new(4, "e")));
        assert_eq!(pairs[2], (SourceRef::mention(0, "a"), EventRef::new(3, "d")));
    }

    #[test]
    fn duplicate_source_rejected() {
        let err = build_graph(
            "d",
            "s",
            tokens(&["a", "b"]),
            vec![SourceRef::mention(0, "a"), SourceRef::mention(0, "a")],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateSource { .. }));

        let err = build_graph(
            "d",
            "s",
            tokens(&["a"]),
            vec![SourceRef::Author, SourceRef::Author],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateSource { .. }));
    }

    #[test]
    fn out_of_bounds_rejected() {
        let err = build_graph("d", "s", tokens(&["a"]), vec![], vec![EventRef::new(3, "x")]).unwrap_err();
        assert!(matches!(err, Error::OutOfBounds { index: 3, len: 1, .. }));
        let err = build_graph("d", "s", tokens(&["a"]), vec![SourceRef::mention(1, "b")], vec![]).unwrap_err();
        assert!(matches!(err, Error::OutOfBounds { .. }));
    }

    #[test]
    fn distributions_set_argmax_labels() {
        let g = build_graph("d", "s", tokens(&["a", "b"]), vec![], vec![EventRef::new(1, "b")]).unwrap();
        let g = g
            .with_distributions(vec![StanceDistribution::smoothed(StanceLabel::Uu, 0.9)])
            .unwrap();
        assert_eq!(g.tuples()[0].label, Some(StanceLabel::Uu));
        assert!(g.is_labeled());
    }

    #[test]
    fn inconsistent_label_rejected() {
        let mut g = build_graph("d", "s", tokens(&["a", "b"]), vec![], vec![EventRef::new(1, "b")]).unwrap();
        let dist = StanceDistribution::point_mass(StanceLabel::CtPos);
        assert!(g.set_prediction(0, Some(StanceLabel::Ne), Some(dist)).is_err());
        assert!(g.set_prediction(0, Some(StanceLabel::CtPos), Some(dist)).is_ok());
    }
}
