use crate::error::{Error, Result};
use crate::ingest::IndexedAnnotations;

fn label_counts(ann: &IndexedAnnotations) -> Vec<Vec<u64>> {
    ann.labels_by_item()
        .into_iter()
        .map(|labels| {
            let mut counts = vec![0u64; ann.k];
            for l in labels {
                counts[l] += 1;
            }
            counts
        })
        .collect()
}

/// Fraction of agreeing annotator pairs, pooled over all items.
pub fn raw_agreement(ann: &IndexedAnnotations) -> Result<f64> {
    let mut agree = 0u64;
    let mut pairs = 0u64;
    for counts in label_counts(ann) {
        let m: u64 = counts.iter().sum();
        pairs += m * m.saturating_sub(1) / 2;
        agree += counts.iter().map(|c| c * c.saturating_sub(1) / 2).sum::<u64>();
    }
    if pairs == 0 {
        return Err(Error::validation(
            "raw agreement needs an item with at least two judgments",
        ));
    }
    Ok(agree as f64 / pairs as f64)
}

/// Krippendorff's α with the nominal metric. Items with a single judgment
/// are not pairable and are ignored.
pub fn krippendorff_alpha(ann: &IndexedAnnotations) -> Result<f64> {
    let k = ann.k;
    let mut coincidence = vec![vec![0.0; k]; k];
    for counts in label_counts(ann) {
        let m: u64 = counts.iter().sum();
        if m < 2 {
            continue;
        }
        let w = 1.0 / (m - 1) as f64;
        for c in 0..k {
            for d in 0..k {
                let pairs = if c == d {
                    counts[c] * counts[c].saturating_sub(1)
                } else {
                    counts[c] * counts[d]
                };
                coincidence[c][d] += pairs as f64 * w;
            }
        }
    }
    let marginals: Vec<f64> = coincidence.iter().map(|row| row.iter().sum()).collect();
    let n: f64 = marginals.iter().sum();
    if n < 2.0 {
        return Err(Error::validation(
            "Krippendorff's alpha needs at least two pairable values",
        ));
    }
    let mut observed = 0.0;
    let mut expected = 0.0;
    for c in 0..k {
        for d in 0..k {
            if c != d {
                observed += coincidence[c][d];
                expected += marginals[c] * marginals[d];
            }
        }
    }
    let d_o = observed / n;
    let d_e = expected / (n * (n - 1.0));
    if d_e == 0.0 {
        return Err(Error::Undefined(
            "Krippendorff's alpha: expected disagreement is zero (a single label was used)".into(),
        ));
    }
    Ok(1.0 - d_o / d_e)
}
