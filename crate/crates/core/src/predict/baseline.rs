//! Rule-based stance baseline.
//!
//! Rules, first match wins:
//! 1. A mention source only holds a stance toward events inside the clausal
//!    complement of a report/belief verb it is the subject of; anything
//!    else is NE. The author holds a stance toward every event.
//! 2. A negative polarity item attached to the event (or to its auxiliaries)
//!    gives CT-.
//! 3. A "possible" hedge gives PS+, a "probable" hedge gives PR+.
//! 4. The author is uncommitted (Uu) toward events reported by someone else.
//! 5. Otherwise CT+.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::extract::DEFAULT_SIP_LEXICON;
use crate::graph::{SentenceGraph, SourceRef};
use crate::ingest::ParsedSentence;
use crate::label::{StanceDistribution, StanceLabel};

use super::StancePredictor;

/// Mass placed on the chosen label; the rest is split evenly.
pub const BASELINE_PEAK: f64 = 0.9;

const COMPLEMENT_RELATIONS: [&str; 2] = ["ccomp", "xcomp"];
const AUX_RELATIONS: [&str; 3] = ["aux", "aux:pass", "cop"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HedgeLexicon {
    pub npi: BTreeSet<String>,
    pub hedge_pr: BTreeSet<String>,
    pub hedge_ps: BTreeSet<String>,
    pub sip: BTreeSet<String>,
}

fn set(words: &[&str]) -> BTreeSet<String> {
    words.iter().map(|w| w.to_string()).collect()
}

impl Default for HedgeLexicon {
    fn default() -> Self {
        HedgeLexicon {
            npi: set(&["no", "not", "n't", "never", "nobody", "none"]),
            hedge_pr: set(&["probably", "likely", "should", "presumably", "apparently"]),
            hedge_ps: set(&["may", "might", "could", "possibly", "perhaps", "maybe"]),
            sip: set(DEFAULT_SIP_LEXICON),
        }
    }
}

impl HedgeLexicon {
    fn is_sip(&self, parse: &ParsedSentence, position: usize) -> bool {
        let token = parse.token(position);
        self.sip.contains(&token.form.to_lowercase())
            || token
                .lemma
                .as_ref()
                .is_some_and(|l| self.sip.contains(&l.to_lowercase()))
    }
}

fn lower_form(parse: &ParsedSentence, position: usize) -> String {
    parse.token(position).form.to_lowercase()
}

/// Whether `event` lies strictly inside a clausal complement of `verb`.
fn in_complement(parse: &ParsedSentence, verb: usize, event: usize) -> bool {
    parse.children(verb).any(|c| {
        let rel = parse.token(c).deprel.split(':').next().unwrap_or("");
        COMPLEMENT_RELATIONS.contains(&rel) && parse.dominates(c, event)
    })
}

fn subject_of(parse: &ParsedSentence, verb: usize) -> Option<usize> {
    parse.children(verb).find(|&c| parse.token(c).deprel == "nsubj")
}

/// Dependents of `event` and of its auxiliaries.
fn governors(parse: &ParsedSentence, event: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for c in parse.children(event) {
        out.push(c);
        if AUX_RELATIONS.contains(&parse.token(c).deprel.as_str()) {
            out.extend(parse.children(c));
        }
    }
    out
}

fn governed_by(parse: &ParsedSentence, event: usize, words: &BTreeSet<String>) -> bool {
    governors(parse, event)
        .into_iter()
        .any(|g| words.contains(&lower_form(parse, g)))
}

/// A first-person singular subject speaks for the author.
fn is_author_subject(parse: &ParsedSentence, subject: usize) -> bool {
    lower_form(parse, subject) == "i"
}

/// Label for one (source, event) pair; `event` is a 0-based token position.
pub fn baseline_rules(source: &SourceRef, event: usize, parse: &ParsedSentence, lexicon: &HedgeLexicon) -> StanceLabel {
    let in_scope = match source {
        SourceRef::Author => true,
        SourceRef::Mention { token_index, .. } => {
            let s = *token_index;
            parse.token(s).deprel == "nsubj"
                && parse
                    .head_of(s)
                    .is_some_and(|v| lexicon.is_sip(parse, v) && in_complement(parse, v, event))
        }
    };
    if !in_scope {
        return StanceLabel::Ne;
    }
    if governed_by(parse, event, &lexicon.npi) {
        return StanceLabel::CtNeg;
    }
    if governed_by(parse, event, &lexicon.hedge_ps) {
        return StanceLabel::PsPos;
    }
    if governed_by(parse, event, &lexicon.hedge_pr) {
        return StanceLabel::PrPos;
    }
    if source.is_author() {
        let reported = (0..parse.tokens.len()).any(|v| {
            lexicon.is_sip(parse, v)
                && subject_of(parse, v).is_some_and(|s| !is_author_subject(parse, s))
                && in_complement(parse, v, event)
        });
        if reported {
            return StanceLabel::Uu;
        }
    }
    StanceLabel::CtPos
}

#[derive(Debug, Clone, Default)]
pub struct BaselinePredictor {
    pub lexicon: HedgeLexicon,
}

impl StancePredictor for BaselinePredictor {
    fn predict(&self, graph: &SentenceGraph, parse: Option<&ParsedSentence>) -> Result<Vec<StanceDistribution>> {
        let parse = parse.ok_or_else(|| {
            Error::validation(format!(
                "baseline predictor needs the parse of {}/{}",
                graph.doc_id(),
                graph.sent_id()
            ))
        })?;
        Ok(graph
            .tuples()
            .iter()
            .map(|t| {
                let label = baseline_rules(&t.source, t.event.token_index, parse, &self.lexicon);
                StanceDistribution::smoothed(label, BASELINE_PEAK)
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{extract_graph, ExtractionConfig};
    use crate::ingest::conllu::parse_conllu_str;
    use crate::predict::predict_graph;

    fn parse(text: &str) -> ParsedSentence {
        parse_conllu_str(text, "d").unwrap().0.remove(0)
    }

    fn labels(text: &str) -> Vec<(String, String, StanceLabel)> {
        let p = parse(text);
        let g = extract_graph(&p, &ExtractionConfig::default()).unwrap();
        let g = predict_graph(g, Some(&p), &BaselinePredictor::default()).unwrap();
        g.tuples()
            .iter()
            .map(|t| {
                (
                    t.source.surface().to_string(),
                    t.event.surface.clone(),
                    t.label.unwrap(),
                )
            })
            .collect()
    }

    fn label_of(all: &[(String, String, StanceLabel)], s: &str, e: &str) -> StanceLabel {
        all.iter().find(|(a, b, _)| a == s && b == e).unwrap().2
    }

    #[test]
    fn john_said_he_left() {
        let all = labels(crate::extract::tests::JOHN_SAID);
        assert_eq!(all.len(), 6);
        assert_eq!(label_of(&all, "Author", "said"), StanceLabel::CtPos);
        assert_eq!(label_of(&all, "Author", "left"), StanceLabel::Uu);
        assert_eq!(label_of(&all, "John", "left"), StanceLabel::CtPos);
        assert_eq!(label_of(&all, "John", "said"), StanceLabel::Ne);
        assert_eq!(label_of(&all, "he", "said"), StanceLabel::Ne);
        assert_eq!(label_of(&all, "he", "left"), StanceLabel::Ne);
    }

    #[test]
    fn negation_gives_certain_negative() {
        let all = labels(
            "1\tHe\the\tPRON\t_\t_\t4\tnsubj\t_\t_
2\tdid\tdo\tAUX\t_\t_\t4\taux\t_\t_
3\tnot\tnot\tPART\t_\t_\t4\tadvmod\t_\t_
4\tleave\tleave\tVERB\t_\t_\t0\troot\t_\t_
5\t.\t.\tPUNCT\t_\t_\t4\tpunct\t_\t_
",
        );
        assert_eq!(label_of(&all, "Author", "leave"), StanceLabel::CtNeg);
    }

    #[test]
    fn npi_on_auxiliary_chain() {
        // "never" hangs off the auxiliary
        let all = labels(
            "1\tShe\tshe\tPRON\t_\t_\t3\tnsubj\t_\t_
2\twill\twill\tAUX\t_\t_\t3\taux\t_\t_
3\tcome\tcome\tVERB\t_\t_\t0\troot\t_\t_
4\tnever\tnever\tADV\t_\t_\t2\tadvmod\t_\t_
",
        );
        assert_eq!(label_of(&all, "Author", "come"), StanceLabel::CtNeg);
    }

    #[test]
    fn modal_hedges() {
        let all = labels(
            "1\tShe\tshe\tPRON\t_\t_\t3\tnsubj\t_\t_
2\tmay\tmay\tAUX\t_\t_\t3\taux\t_\t_
3\twin\twin\tVERB\t_\t_\t0\troot\t_\t_
4\t.\t.\tPUNCT\t_\t_\t3\tpunct\t_\t_
",
        );
        assert_eq!(label_of(&all, "Author", "win"), StanceLabel::PsPos);

        let all = labels(
            "1\tThey\tthey\tPRON\t_\t_\t3\tnsubj\t_\t_
2\tprobably\tprobably\tADV\t_\t_\t3\tadvmod\t_\t_
3\tlost\tlose\tVERB\t_\t_\t0\troot\t_\t_
",
        );
        assert_eq!(label_of(&all, "Author", "lost"), StanceLabel::PrPos);
    }

    #[test]
    fn nested_report_scopes() {
        // The Quarterly hinted that McConnell said Obama was n't listening.
        let all = labels(
            "1\tThe\tthe\tDET\t_\t_\t3\tdet\t_\t_
2\tCongressional\tCongressional\tPROPN\t_\t_\t3\tcompound\t_\t_
3\tQuarterly\tQuarterly\tPROPN\t_\t_\t4\tnsubj\t_\t_
4\thinted\thint\tVERB\t_\t_\t0\troot\t_\t_
5\tthat\tthat\tSCONJ\t_\t_\t7\tmark\t_\t_
6\tMcConnell\tMcConnell\tPROPN\t_\t_\t7\tnsubj\t_\t_
7\tsaid\tsay\tVERB\t_\t_\t4\tccomp\t_\t_
8\tObama\tObama\tPROPN\t_\t_\t11\tnsubj\t_\t_
9\twas\tbe\tAUX\t_\t_\t11\taux\t_\t_
10\tn't\tnot\tPART\t_\t_\t11\tadvmod\t_\t_
11\tlistening\tlisten\tVERB\t_\t_\t7\tccomp\t_\t_
12\t.\t.\tPUNCT\t_\t_\t4\tpunct\t_\t_
",
        );
        assert_eq!(all.len(), 4 * 3);
        assert_eq!(label_of(&all, "Author", "hinted"), StanceLabel::CtPos);
        assert_eq!(label_of(&all, "Author", "listening"), StanceLabel::CtNeg);
        assert_eq!(label_of(&all, "McConnell", "listening"), StanceLabel::CtNeg);
        assert_eq!(label_of(&all, "Author", "said"), StanceLabel::Uu);
        assert_eq!(label_of(&all, "Obama", "listening"), StanceLabel::Ne);
        assert_eq!(label_of(&all, "Obama", "hinted"), StanceLabel::Ne);
    }

    #[test]
    fn first_person_report_is_the_author() {
        let all = labels(
            "1\tI\tI\tPRON\t_\t_\t2\tnsubj\t_\t_
2\tknow\tknow\tVERB\t_\t_\t0\troot\t_\t_
3\the\the\tPRON\t_\t_\t4\tnsubj\t_\t_
4\tleft\tleave\tVERB\t_\t_\t2\tccomp\t_\t_
",
        );
        assert_eq!(label_of(&all, "Author", "left"), StanceLabel::CtPos);
        assert_eq!(label_of(&all, "I", "left"), StanceLabel::CtPos);
    }

    #[test]
    fn distribution_is_smoothed_point_mass() {
        let p = parse(crate::extract::tests::JOHN_SAID);
        let g = extract_graph(&p, &ExtractionConfig::default()).unwrap();
        let dists = BaselinePredictor::default().predict(&g, Some(&p)).unwrap();
        let d = dists[0];
        assert_eq!(d.get(StanceLabel::CtPos), 0.9);
        for l in &StanceLabel::ALL[1..] {
            assert!((d.get(*l) - 0.02).abs() < 1e-12);
        }
        assert!(BaselinePredictor::default().predict(&g, None).is_err());
    }
}
