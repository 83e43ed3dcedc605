//! Source and event candidates from a dependency parse.
//!
//! Events are the root plus every clause head reachable from it through
//! clausal relations. Sources are either every unmodified nominal (loose
//! mode) or only the subjects of source-introducing predicates (SIP mode).

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::{build_graph, EventRef, SentenceGraph, SourceRef};
use crate::ingest::ParsedSentence;

pub const DEFAULT_CLAUSE_RELATIONS: [&str; 6] = ["acl:relcl", "advcl", "ccomp", "csubj", "parataxis", "xcomp"];

pub const DEFAULT_SOURCE_UPOS: [&str; 3] = ["NOUN", "PROPN", "PRON"];

/// UPOS tags whose dependents are never loose-mode sources.
const NOMINAL_OR_ADJ_HEADS: [&str; 3] = ["NOUN", "PROPN", "ADJ"];

/// Report and belief predicates, with common inflections for parses that
/// lack lemmas.
pub const DEFAULT_SIP_LEXICON: &[&str] = &[
    "claim",
    "claims",
    "claimed",
    "claiming",
    "doubt",
    "doubts",
    "doubted",
    "doubting",
    "feel",
    "feels",
    "felt",
    "feeling",
    "know",
    "knows",
    "knew",
    "known",
    "knowing",
    "say",
    "says",
    "said",
    "saying",
    "think",
    "thinks",
    "thought",
    "thinking",
    "believe",
    "believes",
    "believed",
    "believing",
    "argue",
    "argues",
    "argued",
    "arguing",
    "suggest",
    "suggests",
    "suggested",
    "suggesting",
    "hint",
    "hints",
    "hinted",
    "hinting",
    "report",
    "reports",
    "reported",
    "reporting",
    "state",
    "states",
    "stated",
    "stating",
    "tell",
    "tells",
    "told",
    "telling",
    "deny",
    "denies",
    "denied",
    "denying",
    "insist",
    "insists",
    "insisted",
    "insisting",
    "assert",
    "asserts",
    "asserted",
    "asserting",
    "announce",
    "announces",
    "announced",
    "announcing",
    "suspect",
    "suspects",
    "suspected",
    "suspecting",
    "fear",
    "fears",
    "feared",
    "fearing",
    "hope",
    "hopes",
    "hoped",
    "hoping",
    "expect",
    "expects",
    "expected",
    "expecting",
    "admit",
    "admits",
    "admitted",
    "admitting",
    "warn",
    "warns",
    "warned",
    "warning",
    "predict",
    "predicts",
    "predicted",
    "predicting",
    "write",
    "writes",
    "wrote",
    "written",
    "writing",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtractionMode {
    #[default]
    Loose,
    Sip,
}

impl std::str::FromStr for ExtractionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "loose" => Ok(ExtractionMode::Loose),
            "sip" => Ok(ExtractionMode::Sip),
            other => Err(Error::validation(format!("unknown extraction mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionConfig {
    pub mode: ExtractionMode,
    pub clause_relations: BTreeSet<String>,
    pub source_upos: BTreeSet<String>,
    /// Lowercased lemmas or forms.
    pub sip_lexicon: BTreeSet<String>,
    /// Only clause heads attached directly to the root become events.
    pub direct_only: bool,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            mode: ExtractionMode::Loose,
            clause_relations: DEFAULT_CLAUSE_RELATIONS.iter().map(|s| s.to_string()).collect(),
            source_upos: DEFAULT_SOURCE_UPOS.iter().map(|s| s.to_string()).collect(),
            sip_lexicon: DEFAULT_SIP_LEXICON.iter().map(|s| s.to_string()).collect(),
            direct_only: false,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    mode: Option<ExtractionMode>,
    clause_relations: Option<Vec<String>>,
    source_upos: Option<Vec<String>>,
    /// One lemma per line; relative paths resolve against the config file.
    sip_lexicon: Option<PathBuf>,
    direct_only: Option<bool>,
}

impl ExtractionConfig {
    pub fn with_mode(mode: ExtractionMode) -> Self {
        ExtractionConfig {
            mode,
            ..Default::default()
        }
    }

    /// Loads overrides from a TOML file, e.g.
    ///
    /// ```toml
    /// mode = "sip"
    /// clause_relations = ["ccomp", "xcomp"]
    /// source_upos = ["PROPN"]
    /// sip_lexicon = "lexicon.txt"
    /// ```
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ConfigFile =
            toml::from_str(&text).map_err(|e| Error::validation(format!("{}: {e}", path.display())))?;
        let mut config = ExtractionConfig::default();
        if let Some(mode) = file.mode {
            config.mode = mode;
        }
        if let Some(rels) = file.clause_relations {
            config.clause_relations = rels.into_iter().collect();
        }
        if let Some(upos) = file.source_upos {
            config.source_upos = upos.into_iter().collect();
        }
        if let Some(lexicon) = file.sip_lexicon {
            let lexicon = if lexicon.is_relative() {
                path.parent().unwrap_or(Path::new(".")).join(lexicon)
            } else {
                lexicon
            };
            config.sip_lexicon = read_lexicon(&lexicon)?;
        }
        if let Some(direct) = file.direct_only {
            config.direct_only = direct;
        }
        Ok(config)
    }

    fn is_clause_relation(&self, deprel: &str) -> bool {
        let base = deprel.split(':').next().unwrap_or(deprel);
        self.clause_relations.contains(deprel) || self.clause_relations.contains(base)
    }

    /// Whether a token's form or lemma is in the SIP lexicon.
    pub fn is_sip(&self, sentence: &ParsedSentence, position: usize) -> bool {
        let token = sentence.token(position);
        self.sip_lexicon.contains(&token.form.to_lowercase())
            || token
                .lemma
                .as_ref()
                .is_some_and(|l| self.sip_lexicon.contains(&l.to_lowercase()))
    }
}

/// One entry per non-empty line; `#` starts a comment.
pub fn read_lexicon(path: impl AsRef<Path>) -> Result<BTreeSet<String>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim().to_lowercase())
        .filter(|l| !l.is_empty())
        .collect())
}

pub fn extract_events(sentence: &ParsedSentence, config: &ExtractionConfig) -> Vec<EventRef> {
    let root = sentence.root();
    let mut selected = BTreeSet::from([root]);
    let mut frontier = vec![root];
    while let Some(node) = frontier.pop() {
        if config.direct_only && node != root {
            continue;
        }
        for child in sentence.children(node) {
            if config.is_clause_relation(&sentence.token(child).deprel) && selected.insert(child) {
                frontier.push(child);
            }
        }
    }
    selected
        .into_iter()
        .map(|i| EventRef::new(i, sentence.token(i).form.clone()))
        .collect()
}

pub fn extract_sources(sentence: &ParsedSentence, config: &ExtractionConfig) -> Vec<SourceRef> {
    let mut sources = vec![SourceRef::Author];
    for (i, token) in sentence.tokens.iter().enumerate() {
        let keep = match config.mode {
            ExtractionMode::Loose => {
                config.source_upos.contains(&token.upos)
                    && match sentence.head_of(i) {
                        None => true,
                        Some(h) => !NOMINAL_OR_ADJ_HEADS.contains(&sentence.token(h).upos.as_str()),
                    }
            }
            ExtractionMode::Sip => {
                token.deprel == "nsubj" && sentence.head_of(i).is_some_and(|h| config.is_sip(sentence, h))
            }
        };
        if keep {
            sources.push(SourceRef::mention(i, token.form.clone()));
        }
    }
    sources
}

pub fn extract_graph(sentence: &ParsedSentence, config: &ExtractionConfig) -> Result<SentenceGraph> {
    build_graph(
        sentence.doc_id.clone(),
        sentence.sent_id.clone(),
        sentence.graph_tokens(),
        extract_sources(sentence, config),
        extract_events(sentence, config),
    )
}
