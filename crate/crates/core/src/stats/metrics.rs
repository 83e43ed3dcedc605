use serde::Serialize;

use crate::error::{Error, Result};
use crate::label::StanceLabel;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold occurrences.
    pub support: u64,
    pub predicted: u64,
}

impl ClassMetrics {
    /// Classes that never occur in gold or prediction carry no signal and
    /// are left out of macro averages.
    pub fn is_present(&self) -> bool {
        self.support > 0 || self.predicted > 0
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Confusion matrix (gold rows, predicted columns) and per-class scores
/// over label indices `0..k`.
pub fn class_metrics(k: usize, gold: &[usize], pred: &[usize]) -> Result<(Vec<Vec<u64>>, Vec<ClassMetrics>)> {
    if gold.len() != pred.len() {
        return Err(Error::validation(format!(
            "gold has {} labels but prediction has {}",
            gold.len(),
            pred.len()
        )));
    }
    let mut confusion = vec![vec![0u64; k]; k];
    for (&g, &p) in gold.iter().zip(pred) {
        if g >= k || p >= k {
            return Err(Error::validation(format!("label index out of range for {k} classes")));
        }
        confusion[g][p] += 1;
    }
    let classes = (0..k)
        .map(|c| {
            let tp = confusion[c][c];
            let support: u64 = confusion[c].iter().sum();
            let predicted: u64 = confusion.iter().map(|row| row[c]).sum();
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, support);
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            ClassMetrics {
                label: c.to_string(),
                precision,
                recall,
                f1,
                support,
                predicted,
            }
        })
        .collect();
    Ok((confusion, classes))
}

/// Mean F1 over present classes that `include` accepts; 0 if none.
pub fn macro_average(classes: &[ClassMetrics], include: impl Fn(usize) -> bool) -> f64 {
    let chosen: Vec<f64> = classes
        .iter()
        .enumerate()
        .filter(|(i, c)| include(*i) && c.is_present())
        .map(|(_, c)| c.f1)
        .collect();
    if chosen.is_empty() {
        0.0
    } else {
        chosen.iter().sum::<f64>() / chosen.len() as f64
    }
}

/// Scores are fractions in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub n: usize,
    pub confusion: Vec<Vec<u64>>,
    pub classes: Vec<ClassMetrics>,
    pub macro_f1_all: f64,
    pub macro_f1_non_ne: f64,
}

impl MetricsReport {
    pub fn macro_excluding(&self, exclude: &[StanceLabel]) -> f64 {
        macro_average(&self.classes, |i| !exclude.iter().any(|l| l.index() == i))
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("label\tprecision\trecall\tf1\tsupport\n");
        for c in &self.classes {
            out.push_str(&format!(
                "{}\t{:.1}\t{:.1}\t{:.1}\t{}\n",
                c.label,
                100.0 * c.precision,
                100.0 * c.recall,
                100.0 * c.f1,
                c.support
            ));
        }
        out.push_str(&format!("macro (non-NE)\t\t\t{:.1}\n", 100.0 * self.macro_f1_non_ne));
        out.push_str(&format!("macro (all)\t\t\t{:.1}\n", 100.0 * self.macro_f1_all));
        out
    }
}

pub fn macro_f1(gold: &[StanceLabel], pred: &[StanceLabel]) -> Result<MetricsReport> {
    let g: Vec<usize> = gold.iter().map(|l| l.index()).collect();
    let p: Vec<usize> = pred.iter().map(|l| l.index()).collect();
    let (confusion, mut classes) = class_metrics(StanceLabel::COUNT, &g, &p)?;
    for (c, label) in classes.iter_mut().zip(StanceLabel::ALL) {
        c.label = label.as_str().to_string();
    }
    let ne = StanceLabel::Ne.index();
    Ok(MetricsReport {
        n: gold.len(),
        macro_f1_all: macro_average(&classes, |_| true),
        macro_f1_non_ne: macro_average(&classes, |i| i != ne),
        confusion,
        classes,
    })
}
