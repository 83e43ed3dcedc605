use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::SentenceGraph;
use crate::label::StanceLabel;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HedgingReport {
    /// Tuples labeled PR+ or PS+.
    pub hedged: usize,
    /// Tuples labeled anything but NE.
    pub epistemic: usize,
    /// All counted tuples, i.e. one per event for the author.
    pub tuples: usize,
    /// hedged / epistemic
    pub uncertainty: f64,
    /// hedged / tuples
    pub uncertainty_all_events: f64,
}

/// Share of PR+/PS+ stances among the non-NE stances of the author (or of
/// every source when `author_only` is false).
pub fn hedging_uncertainty(graphs: &[SentenceGraph], author_only: bool) -> Result<HedgingReport> {
    let mut hedged = 0;
    let mut epistemic = 0;
    let mut tuples = 0;
    for g in graphs {
        for t in g.tuples() {
            if author_only && !t.source.is_author() {
                continue;
            }
            let label = t
                .label
                .ok_or_else(|| Error::validation(format!("unlabeled tuple in {}/{}", g.doc_id(), g.sent_id())))?;
            tuples += 1;
            if label != StanceLabel::Ne {
                epistemic += 1;
            }
            if matches!(label, StanceLabel::PrPos | StanceLabel::PsPos) {
                hedged += 1;
            }
        }
    }
    if epistemic == 0 {
        return Err(Error::Undefined("hedging uncertainty: no non-NE stances".into()));
    }
    Ok(HedgingReport {
        hedged,
        epistemic,
        tuples,
        uncertainty: hedged as f64 / epistemic as f64,
        uncertainty_all_events: hedged as f64 / tuples as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, EventRef, SourceRef};
    use StanceLabel::*;

    fn author_graph(labels: &[StanceLabel]) -> SentenceGraph {
        let events = (0..labels.len()).map(|i| EventRef::new(i, "e")).collect();
        let mut g = build_graph("d", "1", Vec::new(), vec![SourceRef::Author], events).unwrap();
        for (i, &l) in labels.iter().enumerate() {
            g.set_prediction(i, Some(l), None).unwrap();
        }
        g
    }

    #[test]
    fn eight_of_hundred() {
        let mut labels = vec![CtPos; 92];
        labels.extend([PrPos; 5]);
        labels.extend([PsPos; 3]);
        let r = hedging_uncertainty(&[author_graph(&labels)], true).unwrap();
        assert_eq!(r.uncertainty, 0.08);
        assert_eq!(r.uncertainty_all_events, 0.08);
    }

    #[test]
    fn ne_leaves_the_denominator() {
        let r = hedging_uncertainty(&[author_graph(&[PrPos, CtPos, Ne, Ne])], true).unwrap();
        assert_eq!(r.uncertainty, 0.5);
        assert_eq!(r.uncertainty_all_events, 0.25);
    }

    #[test]
    fn all_certain_and_all_ne() {
        assert_eq!(
            hedging_uncertainty(&[author_graph(&[CtPos, CtNeg])], true)
                .unwrap()
                .uncertainty,
            0.0
        );
        assert!(hedging_uncertainty(&[author_graph(&[Ne])], true).is_err());
    }

    #[test]
    fn mention_sources_are_skipped_by_default() {
        let mut g = build_graph(
            "d",
            "1",
            Vec::new(),
            vec![SourceRef::Author, SourceRef::mention(5, "x")],
            vec![EventRef::new(0, "e")],
        )
        .unwrap();
        g.set_prediction(0, Some(CtPos), None).unwrap();
        g.set_prediction(1, Some(PsPos), None).unwrap();
        assert_eq!(
            hedging_uncertainty(std::slice::from_ref(&g), true).unwrap().uncertainty,
            0.0
        );
        assert_eq!(hedging_uncertainty(&[g], false).unwrap().uncertainty, 0.5);
    }
}
