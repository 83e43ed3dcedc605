//! MACE: annotator competence estimation by EM.
//!
//! Each item has a latent true label drawn uniformly from K labels. An
//! annotator j copies it with probability θ_j and otherwise draws a label
//! from their own spam distribution ξ_j.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::IndexedAnnotations;

pub const DEFAULT_ITERS: usize = 50;
pub const DEFAULT_RESTARTS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct MaceParams {
    pub k: usize,
    pub theta: Vec<f64>,
    pub xi: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaceConfig {
    pub iters: usize,
    pub restarts: usize,
    /// Additive smoothing on expected counts; `None` means 0.1 / K.
    pub smoothing: Option<f64>,
    pub seed: u64,
}

impl Default for MaceConfig {
    fn default() -> Self {
        MaceConfig {
            iters: DEFAULT_ITERS,
            restarts: DEFAULT_RESTARTS,
            smoothing: None,
            seed: 0,
        }
    }
}

impl MaceConfig {
    pub fn delta(&self, k: usize) -> f64 {
        self.smoothing.unwrap_or(0.1 / k as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregationResult {
    pub posteriors: Vec<Vec<f64>>,
    pub hard_labels: Vec<usize>,
    /// Posterior entropies in nats.
    pub entropies: Vec<f64>,
    /// Marginal log-likelihood at initialization and after every iteration.
    pub log_likelihood: Vec<f64>,
    /// Log-likelihood plus the smoothing prior; this is what EM increases.
    pub objective: Vec<f64>,
    pub restart: usize,
}

impl MaceParams {
    pub fn uniform_spam(k: usize, theta: Vec<f64>) -> Self {
        let xi = vec![vec![1.0 / k as f64; k]; theta.len()];
        MaceParams { k, theta, xi }
    }

    /// Log density of the smoothing prior, up to a constant.
    pub fn log_prior(&self, delta: f64) -> f64 {
        if delta == 0.0 {
            return 0.0;
        }
        let theta: f64 = self.theta.iter().map(|t| t.ln() + (1.0 - t).ln()).sum();
        let xi: f64 = self.xi.iter().flatten().map(|x| x.ln()).sum();
        delta * (theta + xi)
    }
}

fn check(params: &MaceParams, ann: &IndexedAnnotations) -> Result<()> {
    if ann.k < 2 {
        return Err(Error::validation(format!(
            "MACE needs at least 2 labels, got {}",
            ann.k
        )));
    }
    if params.k != ann.k {
        return Err(Error::validation("label count of parameters and annotations differ"));
    }
    if params.theta.len() != ann.annotators.len() || params.xi.len() != ann.annotators.len() {
        return Err(Error::validation("parameter and annotator counts differ"));
    }
    let mut seen = vec![false; ann.items.len()];
    for &(i, j, l) in &ann.judgments {
        if i >= ann.items.len() || j >= ann.annotators.len() || l >= ann.k {
            return Err(Error::validation(format!("judgment ({i}, {j}, {l}) out of range")));
        }
        seen[i] = true;
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::validation(format!("item {} has no judgments", ann.items[i])));
    }
    Ok(())
}

fn by_item(ann: &IndexedAnnotations) -> Vec<Vec<(usize, usize)>> {
    let mut out = vec![Vec::new(); ann.items.len()];
    for &(i, j, l) in &ann.judgments {
        out[i].push((j, l));
    }
    out
}

/// Log of the unnormalized joint P(T=t, labels of item) for every t.
fn item_log_weights(params: &MaceParams, judgments: &[(usize, usize)]) -> Vec<f64> {
    let prior = -(params.k as f64).ln();
    (0..params.k)
        .map(|t| {
            prior
                + judgments
                    .iter()
                    .map(|&(j, a)| {
                        let hit = if a == t { params.theta[j] } else { 0.0 };
                        (hit + (1.0 - params.theta[j]) * params.xi[j][a]).ln()
                    })
                    .sum::<f64>()
        })
        .collect()
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn normalize_log(weights: &[f64]) -> (Vec<f64>, f64) {
    let z = log_sum_exp(weights);
    (weights.iter().map(|w| (w - z).exp()).collect(), z)
}

/// Exact marginal log-likelihood of the observed labels.
pub fn log_likelihood(params: &MaceParams, ann: &IndexedAnnotations) -> Result<f64> {
    if ann.judgments.is_empty() {
        return Ok(0.0);
    }
    check(params, ann)?;
    Ok(by_item(ann)
        .iter()
        .map(|js| log_sum_exp(&item_log_weights(params, js)))
        .sum())
}

/// Posterior over each item's true label under fixed parameters.
pub fn posteriors(params: &MaceParams, ann: &IndexedAnnotations) -> Result<Vec<Vec<f64>>> {
    check(params, ann)?;
    Ok(by_item(ann)
        .iter()
        .map(|js| normalize_log(&item_log_weights(params, js)).0)
        .collect())
}

/// One EM iteration. Returns the updated parameters and the log-likelihood
/// of the parameters that were passed in.
pub fn em_step(params: &MaceParams, ann: &IndexedAnnotations, delta: f64) -> Result<(MaceParams, f64)> {
    check(params, ann)?;
    let k = params.k;
    let n = params.theta.len();
    let mut faithful = vec![0.0; n];
    let mut total = vec![0.0; n];
    let mut spam = vec![vec![0.0; k]; n];
    let mut ll = 0.0;
    for js in by_item(ann) {
        let (post, z) = normalize_log(&item_log_weights(params, &js));
        ll += z;
        for &(j, a) in &js {
            // P(S=0 | T=a, A=a); zero when T≠a
            let th = params.theta[j];
            let copy = th / (th + (1.0 - th) * params.xi[j][a]);
            let f = post[a] * copy;
            faithful[j] += f;
            total[j] += 1.0;
            spam[j][a] += 1.0 - f;
        }
    }
    let theta = (0..n)
        .map(|j| (faithful[j] + delta) / (total[j] + 2.0 * delta))
        .collect();
    let xi = spam
        .into_iter()
        .enumerate()
        .map(|(j, row)| {
            let s: f64 = row.iter().sum::<f64>() + k as f64 * delta;
            if s > 0.0 {
                row.iter().map(|c| (c + delta) / s).collect()
            } else {
                params.xi[j].clone()
            }
        })
        .collect();
    Ok((MaceParams { k, theta, xi }, ll))
}

pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum::<f64>()
}

/// First index of the maximum.
pub fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in p.iter().enumerate() {
        if x > p[best] {
            best = i;
        }
    }
    best
}

fn initial_params(ann: &IndexedAnnotations, rng: &mut ChaCha8Rng) -> MaceParams {
    let k = ann.k;
    let n = ann.annotators.len();
    let theta = (0..n).map(|_| rng.gen_range(0.3..0.9)).collect();
    let xi = (0..n)
        .map(|_| {
            let row: Vec<f64> = (0..k).map(|_| 1.0 + rng.gen_range(0.0..0.1)).collect();
            let s: f64 = row.iter().sum();
            row.into_iter().map(|x| x / s).collect()
        })
        .collect();
    MaceParams { k, theta, xi }
}

/// Runs EM from `params` for `iters` iterations.
pub fn run_em(
    mut params: MaceParams,
    ann: &IndexedAnnotations,
    iters: usize,
    delta: f64,
) -> Result<(MaceParams, Vec<f64>, Vec<f64>)> {
    let mut lls = Vec::with_capacity(iters + 1);
    let mut objective = Vec::with_capacity(iters + 1);
    for _ in 0..iters {
        let (next, ll) = em_step(&params, ann, delta)?;
        lls.push(ll);
        objective.push(ll + params.log_prior(delta));
        params = next;
    }
    let ll = log_likelihood(&params, ann)?;
    lls.push(ll);
    objective.push(ll + params.log_prior(delta));
    Ok((params, lls, objective))
}

/// Fits the model with several random restarts and keeps the restart with
/// the highest final log-likelihood (lowest restart index on ties).
pub fn em_fit(ann: &IndexedAnnotations, config: &MaceConfig) -> Result<(MaceParams, AggregationResult)> {
    if ann.k < 2 {
        return Err(Error::validation(format!(
            "MACE needs at least 2 labels, got {}",
            ann.k
        )));
    }
    if config.restarts == 0 {
        return Err(Error::validation("restarts must be at least 1"));
    }
    let delta = config.delta(ann.k);
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::validation("smoothing must be a finite non-negative number"));
    }
    let runs = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(r as u64);
            let init = initial_params(ann, &mut rng);
            run_em(init, ann, config.iters, delta)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (r, run) in runs.iter().enumerate() {
        let score = *run.1.last().expect("trace is never empty");
        if score > *runs[best].1.last().expect("trace is never empty") {
            best = r;
        }
    }
    let (params, log_likelihood, objective) = runs.into_iter().nth(best).expect("best restart exists");
    let posteriors = posteriors(&params, ann)?;
    let hard_labels = posteriors.iter().map(|p| argmax(p)).collect();
    let entropies = posteriors.iter().map(|p| entropy(p)).collect();
    Ok((
        params,
        AggregationResult {
            posteriors,
            hard_labels,
            entropies,
            log_likelihood,
            objective,
            restart: best,
        },
    ))
}

/// Per-item plurality label; ties go to the smallest label index.
pub fn majority_vote(ann: &IndexedAnnotations) -> Vec<usize> {
    ann.labels_by_item()
        .iter()
        .map(|labels| {
            let mut counts = vec![0usize; ann.k];
            for &l in labels {
                counts[l] += 1;
            }
            let mut best = 0;
            for (l, &c) in counts.iter().enumerate() {
                if c > counts[best] {
                    best = l;
                }
            }
            best
        })
        .collect()
}

/// Writes `item_id,hard_label,entropy,p_<label>...` rows in item order.
pub fn write_aggregation<W: Write>(
    mut out: W,
    ann: &IndexedAnnotations,
    labels: &[String],
    result: &AggregationResult,
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(&mut out);
    let mut header = vec!["item_id".to_string(), "hard_label".into(), "entropy".into()];
    header.extend(labels.iter().map(|l| format!("p_{l}")));
    w.write_record(&header)?;
    for (i, item) in ann.items.iter().enumerate() {
        let mut row = vec![
            item.clone(),
            labels[result.hard_labels[i]].clone(),
            format!("{:.6}", result.entropies[i]),
        ];
        row.extend(result.posteriors[i].iter().map(|p| format!("{p:.6}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
