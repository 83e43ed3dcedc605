//! HTTP client for a model service.
//!
//! `POST {endpoint}/predict` takes a JSON array of requests
//! `{"tokens": [...], "source_index": int|null, "event_index": int}` and
//! answers with an array of the same length whose items are either
//! `{"probs": {"CT+": p, ...}}` or `{"error": "message"}`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::SentenceGraph;
use crate::ingest::ParsedSentence;
use crate::label::{StanceDistribution, StanceLabel};

use super::StancePredictor;

pub const CACHE_ENV: &str = "STANCEGRAPH_CACHE";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictRequest {
    pub tokens: Vec<String>,
    /// `None` stands for the author.
    pub source_index: Option<usize>,
    pub event_index: usize,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ResponseItem {
    Probs { probs: BTreeMap<String, f64> },
    Error { error: String },
}

#[derive(Debug, Clone)]
pub struct RemoteOptions {
    pub batch_size: usize,
    pub max_in_flight: usize,
    pub attempts: usize,
    pub timeout: Duration,
    pub cache_dir: Option<PathBuf>,
}

impl Default for RemoteOptions {
    fn default() -> Self {
        RemoteOptions {
            batch_size: 64,
            max_in_flight: 4,
            attempts: 3,
            timeout: Duration::from_secs(60),
            cache_dir: None,
        }
    }
}

impl RemoteOptions {
    /// Defaults, with the cache directory taken from `STANCEGRAPH_CACHE`.
    pub fn from_env() -> Self {
        RemoteOptions {
            cache_dir: std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct RemoteClient {
    endpoint: String,
    options: RemoteOptions,
    agent: ureq::Agent,
}

impl RemoteClient {
    pub fn new(endpoint: impl Into<String>, options: RemoteOptions) -> Self {
        let endpoint = endpoint.into().trim_end_matches('/').to_string();
        let agent = ureq::AgentBuilder::new().timeout(options.timeout).build();
        RemoteClient {
            endpoint,
            options,
            agent,
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    /// Sends `requests` in batches, at most `max_in_flight` at a time, and
    /// returns one distribution per request in request order.
    pub fn predict(&self, requests: &[PredictRequest]) -> Result<Vec<StanceDistribution>> {
        if requests.is_empty() {
            return Ok(Vec::new());
        }
        let batch_size = self.options.batch_size.max(1);
        let in_flight = self.options.max_in_flight.max(1);
        let batches: Vec<(usize, &[PredictRequest])> = requests
            .chunks(batch_size)
            .enumerate()
            .map(|(i, c)| (i * batch_size, c))
            .collect();
        let mut out = Vec::with_capacity(requests.len());
        for wave in batches.chunks(in_flight) {
            let results: Vec<Result<Vec<StanceDistribution>>> = std::thread::scope(|scope| {
                let handles: Vec<_> = wave
                    .iter()
                    .map(|&(offset, batch)| scope.spawn(move || self.predict_batch(offset, batch)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("remote worker panicked"))
                    .collect()
            });
            for r in results {
                out.extend(r?);
            }
        }
        Ok(out)
    }

    fn predict_batch(&self, offset: usize, batch: &[PredictRequest]) -> Result<Vec<StanceDistribution>> {
        let body = serde_json::to_string(batch).map_err(|e| Error::validation(e.to_string()))?;
        let cache_path = self.options.cache_dir.as_ref().map(|dir| {
            let mut h = Sha256::new();
            h.update(self.endpoint.as_bytes());
            h.update(b"\n");
            h.update(body.as_bytes());
            dir.join(format!("{}.json", hex::encode(h.finalize())))
        });
        if let Some(path) = &cache_path {
            if let Ok(cached) = std::fs::read_to_string(path) {
                if let Ok(parsed) = decode(offset, batch.len(), &cached) {
                    return Ok(parsed);
                }
                log::warn!("ignoring unreadable cache entry {}", path.display());
            }
        }
        let text = self.post(&body)?;
        let parsed = decode(offset, batch.len(), &text)?;
        if let Some(path) = &cache_path {
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            // write-then-rename so concurrent runs never see half a file
            let tmp = path.with_extension(format!("tmp{}", std::process::id()));
            std::fs::write(&tmp, &text).map_err(|e| Error::io(&tmp, e))?;
            std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))?;
        }
        Ok(parsed)
    }

    fn post(&self, body: &str) -> Result<String> {
        let url = format!("{}/predict", self.endpoint);
        let attempts = self.options.attempts.max(1);
        let mut last = String::new();
        for attempt in 1..=attempts {
            match self
                .agent
                .post(&url)
                .set("Content-Type", "application/json")
                .send_string(body)
            {
                Ok(resp) => {
                    return resp.into_string().map_err(|e| Error::Transport {
                        attempts: attempt,
                        message: e.to_string(),
                    })
                }
                Err(ureq::Error::Status(status, resp)) => {
                    let body = resp.into_string().unwrap_or_default();
                    return Err(Error::Http { status, body });
                }
                Err(ureq::Error::Transport(t)) => {
                    log::debug!("attempt {attempt}/{attempts} to {url} failed: {t}");
                    last = t.to_string();
                    if attempt < attempts {
                        std::thread::sleep(Duration::from_millis(50 * attempt as u64));
                    }
                }
            }
        }
        Err(Error::Transport {
            attempts,
            message: last,
        })
    }
}

fn decode(offset: usize, expected: usize, text: &str) -> Result<Vec<StanceDistribution>> {
    let items: Vec<ResponseItem> = serde_json::from_str(text).map_err(|e| Error::RemoteItem {
        index: offset,
        message: format!("malformed response: {e}"),
    })?;
    if items.len() != expected {
        return Err(Error::RemoteItem {
            index: offset,
            message: format!("expected {expected} responses, got {}", items.len()),
        });
    }
    items
        .into_iter()
        .enumerate()
        .map(|(i, item)| {
            let index = offset + i;
            match item {
                ResponseItem::Error { error } => Err(Error::RemoteItem { index, message: error }),
                ResponseItem::Probs { probs } => {
                    probs_to_dist(&probs).map_err(|message| Error::RemoteItem { index, message })
                }
            }
        })
        .collect()
}

fn probs_to_dist(probs: &BTreeMap<String, f64>) -> std::result::Result<StanceDistribution, String> {
    if probs.len() != StanceLabel::COUNT {
        return Err(format!(
            "expected {} probabilities, got {}",
            StanceLabel::COUNT,
            probs.len()
        ));
    }
    let mut p = [0.0; StanceLabel::COUNT];
    for (k, v) in probs {
        let label: StanceLabel = k.parse().map_err(|e: Error| e.to_string())?;
        p[label.index()] = *v;
    }
    StanceDistribution::new(p).map_err(|e| e.to_string())
}

/// Builds one request per tuple of `graph`. Tokens come from the graph, or
/// from the parse when the graph was read from a store without tokens.
pub fn requests_for(graph: &SentenceGraph, parse: Option<&ParsedSentence>) -> Result<Vec<PredictRequest>> {
    let tokens: Vec<String> = if !graph.tokens().is_empty() {
        graph.tokens().iter().map(|t| t.form.clone()).collect()
    } else if let Some(parse) = parse {
        parse.tokens.iter().map(|t| t.form.clone()).collect()
    } else {
        return Err(Error::validation(format!(
            "remote prediction for {}/{} needs the sentence tokens",
            graph.doc_id(),
            graph.sent_id()
        )));
    };
    Ok(graph
        .tuples()
        .iter()
        .map(|t| PredictRequest {
            tokens: tokens.clone(),
            source_index: t.source.token_index(),
            event_index: t.event.token_index,
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct RemotePredictor {
    client: RemoteClient,
}

impl RemotePredictor {
    pub fn new(client: RemoteClient) -> Self {
        RemotePredictor { client }
    }
}

impl StancePredictor for RemotePredictor {
    fn predict(&self, graph: &SentenceGraph, parse: Option<&ParsedSentence>) -> Result<Vec<StanceDistribution>> {
        let requests = requests_for(graph, parse)?;
        self.client.predict(&requests)
    }
}
