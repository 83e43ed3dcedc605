//! Continuous stance scores and the difference between two sources.

use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::SentenceGraph;
use crate::label::{CoarseLabel, StanceDistribution, StanceLabel};

use super::holders::{canonicalize, NerIndex};

/// (P(POS) − P(NEG)) / (1 − P(NE)).
pub fn expected_stance(dist: &StanceDistribution) -> Result<f64> {
    let c = dist.coarsen();
    let ne = c.get(CoarseLabel::Ne);
    if (1.0 - ne).abs() <= 1e-9 {
        return Err(Error::Undefined("expected stance: all mass is on NE".into()));
    }
    Ok((c.get(CoarseLabel::Pos) - c.get(CoarseLabel::Neg)) / (1.0 - ne))
}

/// A source identified across a whole store.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceSelector {
    Author,
    /// Canonical holder name.
    Named(String),
}

impl FromStr for SourceSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("author") {
            return Ok(SourceSelector::Author);
        }
        let name = canonicalize(s);
        if name.is_empty() {
            return Err(Error::validation("empty source name"));
        }
        Ok(SourceSelector::Named(name))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceScore {
    pub score: f64,
    pub tuples: usize,
}

/// Mean expected stance over the source's tuples whose label is not NE.
pub fn source_score(graphs: &[SentenceGraph], ner: &NerIndex, source: &SourceSelector) -> Result<SourceScore> {
    let mut sum = 0.0;
    let mut n = 0;
    for g in graphs {
        for s in g.sources() {
            let matches = match source {
                SourceSelector::Author => s.is_author(),
                SourceSelector::Named(name) => ner.canonical_source(g, s).as_deref() == Some(name.as_str()),
            };
            if !matches {
                continue;
            }
            for t in g.tuples_of(s) {
                let Some(label) = t.label else {
                    return Err(Error::validation(format!(
                        "unlabeled tuple in {}/{}",
                        g.doc_id(),
                        g.sent_id()
                    )));
                };
                if label == StanceLabel::Ne {
                    continue;
                }
                let dist = t.dist.unwrap_or_else(|| StanceDistribution::point_mass(label));
                sum += expected_stance(&dist)?;
                n += 1;
            }
        }
    }
    if n == 0 {
        return Err(Error::Undefined(format!("no non-NE stances for source {source:?}")));
    }
    Ok(SourceScore {
        score: sum / n as f64,
        tuples: n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Divergence {
    pub score_a: SourceScore,
    pub score_b: SourceScore,
    pub ed: f64,
}

pub fn epistemological_difference(
    graphs: &[SentenceGraph],
    ner: &NerIndex,
    a: &SourceSelector,
    b: &SourceSelector,
) -> Result<Divergence> {
    let score_a = source_score(graphs, ner, a)?;
    let score_b = source_score(graphs, ner, b)?;
    Ok(Divergence {
        ed: (score_a.score - score_b.score).abs(),
        score_a,
        score_b,
    })
}
