//! Stance prediction over a [`SentenceGraph`].
//!
//! Every predictor returns one [`StanceDistribution`] per tuple; labels are
//! always the argmax of the (possibly ensembled) distribution.

mod baseline;
mod file;
pub mod remote;

use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::SentenceGraph;
use crate::ingest::ParsedSentence;
use crate::label::{StanceDistribution, SUM_TOLERANCE};

pub use baseline::{baseline_rules, BaselinePredictor, HedgeLexicon};
pub use file::FilePredictor;
pub use remote::{PredictRequest, RemoteClient, RemotePredictor};

pub const DEFAULT_RESTARTS: usize = 5;

pub trait StancePredictor: Send + Sync {
    /// One distribution per tuple of `graph`, in tuple order.
    fn predict(&self, graph: &SentenceGraph, parse: Option<&ParsedSentence>) -> Result<Vec<StanceDistribution>>;
}

/// Labels every tuple of `graph`.
pub fn predict_graph(
    graph: SentenceGraph,
    parse: Option<&ParsedSentence>,
    predictor: &dyn StancePredictor,
) -> Result<SentenceGraph> {
    if let Some(parse) = parse {
        if parse.doc_id != graph.doc_id() || parse.sent_id != graph.sent_id() {
            return Err(Error::validation(format!(
                "parse {}/{} does not match graph {}/{}",
                parse.doc_id,
                parse.sent_id,
                graph.doc_id(),
                graph.sent_id()
            )));
        }
        let len = parse.tokens.len();
        let max_index = graph
            .sources()
            .iter()
            .filter_map(|s| s.token_index())
            .chain(graph.events().iter().map(|e| e.token_index))
            .max();
        if max_index.is_some_and(|m| m >= len) {
            return Err(Error::validation(format!(
                "graph {}/{} refers to tokens beyond the parsed sentence",
                graph.doc_id(),
                graph.sent_id()
            )));
        }
    }
    let dists = predictor.predict(&graph, parse)?;
    graph.with_distributions(dists)
}

/// Element-wise mean of `dists`, renormalized only if the inputs drifted.
pub fn ensemble(dists: &[StanceDistribution]) -> Result<StanceDistribution> {
    if dists.is_empty() {
        return Err(Error::validation("cannot ensemble an empty list of distributions"));
    }
    let mut mean = [0.0; 6];
    for d in dists {
        for (m, p) in mean.iter_mut().zip(d.as_array()) {
            *m += p;
        }
    }
    let n = dists.len() as f64;
    for m in &mut mean {
        *m /= n;
    }
    let total: f64 = mean.iter().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        for m in &mut mean {
            *m /= total;
        }
    }
    StanceDistribution::new(mean)
}

/// Averages the outputs of several predictors, e.g. restarts of one model.
pub struct EnsemblePredictor {
    members: Vec<Box<dyn StancePredictor>>,
}

impl EnsemblePredictor {
    pub fn new(members: Vec<Box<dyn StancePredictor>>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::validation("ensemble needs at least one member"));
        }
        Ok(EnsemblePredictor { members })
    }
}

impl StancePredictor for EnsemblePredictor {
    fn predict(&self, graph: &SentenceGraph, parse: Option<&ParsedSentence>) -> Result<Vec<StanceDistribution>> {
        let outputs = self
            .members
            .iter()
            .map(|m| m.predict(graph, parse))
            .collect::<Result<Vec<_>>>()?;
        (0..graph.tuples().len())
            .map(|i| {
                let column: Vec<_> = outputs.iter().map(|o| o[i]).collect();
                ensemble(&column)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PredictorKind {
    Baseline,
    /// One tuple-store file per restart.
    File(Vec<PathBuf>),
    /// One endpoint per restart.
    Remote(Vec<String>),
}

/// Parsed form of `baseline`, `file:PATH[,PATH...]` or `remote:URL[,URL...]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictorSpec {
    pub kind: PredictorKind,
    pub restarts: usize,
}

impl FromStr for PredictorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let split = |rest: &str| -> Vec<String> {
            rest.split(',')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(String::from)
                .collect()
        };
        let kind = if s == "baseline" {
            PredictorKind::Baseline
        } else if let Some(rest) = s.strip_prefix("file:") {
            PredictorKind::File(split(rest).into_iter().map(PathBuf::from).collect())
        } else if let Some(rest) = s.strip_prefix("remote:") {
            PredictorKind::Remote(split(rest))
        } else {
            return Err(Error::validation(format!(
                "unknown predictor {s:?}; expected baseline, file:PATH or remote:URL"
            )));
        };
        if matches!(&kind, PredictorKind::File(v) if v.is_empty())
            || matches!(&kind, PredictorKind::Remote(v) if v.is_empty())
        {
            return Err(Error::validation(format!("predictor {s:?} names no file or endpoint")));
        }
        Ok(PredictorSpec {
            kind,
            restarts: DEFAULT_RESTARTS,
        })
    }
}

impl PredictorSpec {
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    /// Whether the predictor needs the dependency parse of each sentence.
    pub fn needs_parse(&self) -> bool {
        !matches!(self.kind, PredictorKind::File(_))
    }

    /// Instantiates the predictor. A single file or endpoint is taken to be
    /// already averaged; several must match `restarts` and are averaged here.
    pub fn build(&self, remote: &remote::RemoteOptions) -> Result<Box<dyn StancePredictor>> {
        if self.restarts == 0 {
            return Err(Error::validation("restarts must be at least 1"));
        }
        let check_members = |n: usize| -> Result<()> {
            if n > 1 && n != self.restarts {
                return Err(Error::validation(format!(
                    "{n} predictor members given but restarts = {}",
                    self.restarts
                )));
            }
            Ok(())
        };
        let mut members: Vec<Box<dyn StancePredictor>> = match &self.kind {
            PredictorKind::Baseline => return Ok(Box::new(BaselinePredictor::default())),
            PredictorKind::File(paths) => {
                check_members(paths.len())?;
                paths
                    .iter()
                    .map(|p| FilePredictor::load(p).map(|f| Box::new(f) as Box<dyn StancePredictor>))
                    .collect::<Result<_>>()?
            }
            PredictorKind::Remote(urls) => {
                check_members(urls.len())?;
                urls.iter()
                    .map(|u| {
                        Box::new(RemotePredictor::new(RemoteClient::new(u.clone(), remote.clone())))
                            as Box<dyn StancePredictor>
                    })
                    .collect()
            }
        };
        if members.len() == 1 {
            return Ok(members.pop().expect("one member"));
        }
        Ok(Box::new(EnsemblePredictor::new(members)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::StanceLabel;
    use proptest::prelude::*;

    #[test]
    fn ensemble_examples() {
        let d = StanceDistribution::smoothed(StanceLabel::PrPos, 0.7);
        let same = ensemble(&[d, d, d]).unwrap();
        for (x, y) in same.as_array().iter().zip(d.as_array()) {
            assert!((x - y).abs() < 1e-12);
        }

        let mixed = ensemble(&[
            StanceDistribution::point_mass(StanceLabel::CtPos),
            StanceDistribution::point_mass(StanceLabel::Uu),
        ])
        .unwrap();
        assert_eq!(mixed.as_array(), &[0.5, 0.0, 0.0, 0.0, 0.5, 0.0]);

        assert!(ensemble(&[]).is_err());
    }

    #[test]
    fn ensemble_of_five_hand_computed() {
        let rows = [
            [0.50, 0.10, 0.10, 0.10, 0.10, 0.10],
            [0.30, 0.20, 0.10, 0.10, 0.20, 0.10],
            [0.40, 0.00, 0.20, 0.20, 0.10, 0.10],
            [0.20, 0.20, 0.20, 0.20, 0.10, 0.10],
            [0.60, 0.00, 0.00, 0.00, 0.00, 0.40],
        ];
        let dists: Vec<_> = rows.iter().map(|r| StanceDistribution::new(*r).unwrap()).collect();
        // column sums / 5
        let expected = [0.40, 0.10, 0.12, 0.12, 0.10, 0.16];
        let got = ensemble(&dists).unwrap();
        for (g, e) in got.as_array().iter().zip(expected) {
            assert!((g - e).abs() < 1e-12, "{g} vs {e}");
        }
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(
            "baseline".parse::<PredictorSpec>().unwrap().kind,
            PredictorKind::Baseline
        );
        assert_eq!(
            "file:a.jsonl,b.jsonl".parse::<PredictorSpec>().unwrap().kind,
            PredictorKind::File(vec!["a.jsonl".into(), "b.jsonl".into()])
        );
        assert_eq!(
            "remote:http://localhost:8000".parse::<PredictorSpec>().unwrap().kind,
            PredictorKind::Remote(vec!["http://localhost:8000".into()])
        );
        assert!("file:".parse::<PredictorSpec>().is_err());
        assert!("svm".parse::<PredictorSpec>().is_err());
        assert_eq!("baseline".parse::<PredictorSpec>().unwrap().restarts, 5);
    }

    fn dist_strategy() -> impl Strategy<Value = StanceDistribution> {
        proptest::array::uniform6(0.01f64..1.0).prop_map(|raw| {
            let total: f64 = raw.iter().sum();
            StanceDistribution::new(raw.map(|r| r / total)).unwrap()
        })
    }

    proptest! {
        #[test]
        fn ensemble_is_permutation_invariant(mut ds in proptest::collection::vec(dist_strategy(), 1..6)) {
            let a = ensemble(&ds).unwrap();
            ds.reverse();
            let b = ensemble(&ds).unwrap();
            for (x, y) in a.as_array().iter().zip(b.as_array()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn ensemble_of_copies_keeps_argmax(d in dist_strategy(), n in 1usize..8) {
            let copies = vec![d; n];
            let e = ensemble(&copies).unwrap();
            prop_assert_eq!(e.argmax(), d.argmax());
            for (x, y) in e.as_array().iter().zip(d.as_array()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
