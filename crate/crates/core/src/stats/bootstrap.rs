use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapResult {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub b: usize,
    pub level: f64,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareResult {
    /// m(A) − m(B) on the full sample.
    pub delta: f64,
    pub p_value: f64,
    pub b: usize,
}

/// Indices of one resample. Replicate `r` always draws from the same
/// stream, so results do not depend on how replicates are scheduled.
fn resample(n: usize, seed: u64, r: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

fn std_dev(xs: &[f64]) -> f64 {
    if xs.iter().all(|&x| x == xs[0]) {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

fn check(n: usize, b: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::validation("bootstrap needs at least one unit"));
    }
    if b < 2 {
        return Err(Error::validation(format!(
            "bootstrap needs at least 2 samples, got {b}"
        )));
    }
    Ok(())
}

/// Normal-interval bootstrap CI: point ± z · sd(replicates).
pub fn bootstrap_ci<U, F>(units: &[U], metric: F, b: usize, level: f64, seed: u64) -> Result<BootstrapResult>
where
    U: Sync,
    F: Fn(&[&U]) -> f64 + Sync,
{
    check(units.len(), b)?;
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::validation(format!(
            "confidence level must be in (0, 1), got {level}"
        )));
    }
    let all: Vec<&U> = units.iter().collect();
    let point = metric(&all);
    let replicates: Vec<f64> = (0..b)
        .into_par_iter()
        .map(|r| {
            let sample: Vec<&U> = resample(units.len(), seed, r).into_iter().map(|i| &units[i]).collect();
            metric(&sample)
        })
        .collect();
    let z = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf((1.0 + level) / 2.0);
    let half = z * std_dev(&replicates);
    Ok(BootstrapResult {
        point,
        ci_low: point - half,
        ci_high: point + half,
        b,
        level,
        p_value: None,
    })
}

/// Paired two-sided test of m(A) = m(B) by resampling units; the p-value is
/// (1 + #{|Δ* − Δ̂| ≥ |Δ̂|}) / (B + 1).
pub fn bootstrap_compare<U, FA, FB>(
    units: &[U],
    metric_a: FA,
    metric_b: FB,
    b: usize,
    seed: u64,
) -> Result<CompareResult>
where
    U: Sync,
    FA: Fn(&[&U]) -> f64 + Sync,
    FB: Fn(&[&U]) -> f64 + Sync,
{
    check(units.len(), b)?;
    let all: Vec<&U> = units.iter().collect();
    let delta = metric_a(&all) - metric_b(&all);
    let extreme = (0..b)
        .into_par_iter()
        .filter(|&r| {
            let sample: Vec<&U> = resample(units.len(), seed, r).into_iter().map(|i| &units[i]).collect();
            let d = metric_a(&sample) - metric_b(&sample);
            (d - delta).abs() >= delta.abs()
        })
        .count();
    Ok(CompareResult {
        delta,
        p_value: (1 + extreme) as f64 / (b + 1) as f64,
        b,
    })
}
