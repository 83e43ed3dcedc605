use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::SentenceGraph;
use crate::ingest::{read_tuples, ParsedSentence};
use crate::label::StanceDistribution;

use super::StancePredictor;

/// (source token, None for the author; event token)
type PairKey = (Option<usize>, usize);

/// Looks predictions up in a labeled tuple store.
///
/// Keys are (doc, sentence, source kind and token, event token); surface
/// strings are ignored. Tuples without probabilities count as point masses
/// on their label.
#[derive(Debug, Clone, Default)]
pub struct FilePredictor {
    table: HashMap<(String, String), HashMap<PairKey, StanceDistribution>>,
}

impl FilePredictor {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_graphs(&read_tuples(path)?).map_err(|e| Error::validation(format!("{}: {e}", path.display())))
    }

    pub fn from_graphs(graphs: &[SentenceGraph]) -> Result<Self> {
        let mut table: HashMap<(String, String), HashMap<PairKey, StanceDistribution>> = HashMap::new();
        for g in graphs {
            let entry = table
                .entry((g.doc_id().to_string(), g.sent_id().to_string()))
                .or_default();
            for t in g.tuples() {
                let dist = match (t.dist, t.label) {
                    (Some(d), _) => d,
                    (None, Some(l)) => StanceDistribution::point_mass(l),
                    (None, None) => {
                        return Err(Error::validation(format!(
                            "prediction store has an unlabeled tuple in {}/{}",
                            g.doc_id(),
                            g.sent_id()
                        )))
                    }
                };
                entry.insert((t.source.token_index(), t.event.token_index), dist);
            }
        }
        Ok(FilePredictor { table })
    }
}

impl StancePredictor for FilePredictor {
    fn predict(&self, graph: &SentenceGraph, _parse: Option<&ParsedSentence>) -> Result<Vec<StanceDistribution>> {
        let sentence = self
            .table
            .get(&(graph.doc_id().to_string(), graph.sent_id().to_string()));
        graph
            .tuples()
            .iter()
            .map(|t| {
                sentence
                    .and_then(|s| s.get(&(t.source.token_index(), t.event.token_index)))
                    .copied()
                    .ok_or_else(|| Error::MissingPrediction {
                        doc_id: graph.doc_id().to_string(),
                        sent_id: graph.sent_id().to_string(),
                        source_key: t.source.key(),
                        event: t.event.token_index,
                    })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, EventRef, SourceRef};
    use crate::label::StanceLabel;
    use crate::predict::predict_graph;

    fn graph() -> SentenceGraph {
        build_graph(
            "d",
            "s",
            Vec::new(),
            vec![SourceRef::Author, SourceRef::mention(0, "x")],
            vec![EventRef::new(1, "y"), EventRef::new(2, "z")],
        )
        .unwrap()
    }

    #[test]
    fn lookup_reproduces_fixture_labels() {
        let labels = [StanceLabel::CtPos, StanceLabel::Uu, StanceLabel::Ne, StanceLabel::PsPos];
        let fixture = graph()
            .with_distributions(labels.iter().map(|&l| StanceDistribution::smoothed(l, 0.8)).collect())
            .unwrap();
        let predictor = FilePredictor::from_graphs(&[fixture]).unwrap();
        let out = predict_graph(graph(), None, &predictor).unwrap();
        let got: Vec<_> = out.tuples().iter().map(|t| t.label.unwrap()).collect();
        assert_eq!(got, labels);
    }

    #[test]
    fn surfaces_do_not_matter() {
        let mut fixture = build_graph(
            "d",
            "s",
            Vec::new(),
            vec![SourceRef::Author, SourceRef::mention(0, "other")],
            vec![EventRef::new(1, "a"), EventRef::new(2, "b")],
        )
        .unwrap();
        for i in 0..4 {
            fixture.set_prediction(i, Some(StanceLabel::CtNeg), None).unwrap();
        }
        let predictor = FilePredictor::from_graphs(&[fixture]).unwrap();
        let out = predict_graph(graph(), None, &predictor).unwrap();
        assert!(out.tuples().iter().all(|t| t.label == Some(StanceLabel::CtNeg)));
        assert_eq!(
            out.tuples()[0].dist,
            Some(StanceDistribution::point_mass(StanceLabel::CtNeg))
        );
    }

    #[test]
    fn missing_pair_is_reported() {
        let partial = build_graph(
            "d",
            "s",
            Vec::new(),
            vec![SourceRef::Author],
            vec![EventRef::new(1, "y")],
        )
        .unwrap()
        .with_distributions(vec![StanceDistribution::uniform()])
        .unwrap();
        let predictor = FilePredictor::from_graphs(&[partial]).unwrap();
        let err = predict_graph(graph(), None, &predictor).unwrap_err();
        match err {
            Error::MissingPrediction { source_key, event, .. } => {
                assert_eq!(source_key, "AUTHOR");
                assert_eq!(event, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
