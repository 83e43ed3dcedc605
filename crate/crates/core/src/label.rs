//! The six-way stance label space, its four-way coarsening, and probability
//! vectors over both.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a distribution.
pub const SUM_TOLERANCE: f64 = 1e-6;

/// Epistemic stance of a source toward an event.
///
/// Declaration order is the tie-breaking order used by [`StanceDistribution::argmax`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StanceLabel {
    /// Certain, positive.
    CtPos,
    /// Certain, negative.
    CtNeg,
    /// Probable, positive.
    PrPos,
    /// Possible, positive.
    PsPos,
    /// Uncommitted.
    Uu,
    /// Non-epistemic: no stance expressed.
    Ne,
}

impl StanceLabel {
    pub const COUNT: usize = 6;

    pub const ALL: [StanceLabel; 6] = [
        StanceLabel::CtPos,
        StanceLabel::CtNeg,
        StanceLabel::PrPos,
        StanceLabel::PsPos,
        StanceLabel::Uu,
        StanceLabel::Ne,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StanceLabel::CtPos => "CT+",
            StanceLabel::CtNeg => "CT-",
            StanceLabel::PrPos => "PR+",
            StanceLabel::PsPos => "PS+",
            StanceLabel::Uu => "Uu",
            StanceLabel::Ne => "NE",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn is_epistemic(self) -> bool {
        self != StanceLabel::Ne
    }

    /// CT+ and CT- map to the polar classes, every hedged or uncommitted
    /// stance collapses to `Uncommitted`, NE stays NE.
    pub fn coarsen(self) -> CoarseLabel {
        match self {
            StanceLabel::CtPos => CoarseLabel::Pos,
            StanceLabel::CtNeg => CoarseLabel::Neg,
            StanceLabel::PrPos | StanceLabel::PsPos | StanceLabel::Uu => CoarseLabel::Uncommitted,
            StanceLabel::Ne => CoarseLabel::Ne,
        }
    }
}

impl fmt::Display for StanceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StanceLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "CT+" => Ok(StanceLabel::CtPos),
            "CT-" => Ok(StanceLabel::CtNeg),
            "PR+" => Ok(StanceLabel::PrPos),
            "PS+" => Ok(StanceLabel::PsPos),
            "Uu" => Ok(StanceLabel::Uu),
            "NE" => Ok(StanceLabel::Ne),
            "PR-" | "PS-" => Err(Error::validation(format!(
                "stance label {s:?} is not supported (only CT+, CT-, PR+, PS+, Uu, NE)"
            ))),
            _ => Err(Error::validation(format!("unknown stance label {s:?}"))),
        }
    }
}

impl Serialize for StanceLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for StanceLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Four-way polarity view of [`StanceLabel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CoarseLabel {
    Pos,
    Neg,
    Uncommitted,
    Ne,
}

impl CoarseLabel {
    pub const ALL: [CoarseLabel; 4] = [
        CoarseLabel::Pos,
        CoarseLabel::Neg,
        CoarseLabel::Uncommitted,
        CoarseLabel::Ne,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Probability vector over the six stance labels.
///
/// Every component lies in `[0, 1]` and the total is 1 within [`SUM_TOLERANCE`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StanceDistribution([f64; 6]);

impl StanceDistribution {
    pub fn new(probs: [f64; 6]) -> Result<Self> {
        for (label, &p) in StanceLabel::ALL.iter().zip(&probs) {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::validation(format!(
                    "probability for {label} is {p}, outside [0, 1]"
                )));
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::validation(format!(
                "probabilities sum to {total}, expected 1 within {SUM_TOLERANCE}"
            )));
        }
        Ok(StanceDistribution(probs))
    }

    pub fn point_mass(label: StanceLabel) -> Self {
        let mut probs = [0.0; 6];
        probs[label.index()] = 1.0;
        StanceDistribution(probs)
    }

    /// `peak` on `label`, the remainder spread evenly over the other five.
    pub fn smoothed(label: StanceLabel, peak: f64) -> Self {
        let rest = (1.0 - peak) / 5.0;
        let mut probs = [rest; 6];
        probs[label.index()] = peak;
        StanceDistribution(probs)
    }

    pub fn uniform() -> Self {
        StanceDistribution([1.0 / 6.0; 6])
    }

    pub fn get(&self, label: StanceLabel) -> f64 {
        self.0[label.index()]
    }

    pub fn as_array(&self) -> &[f64; 6] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = (StanceLabel, f64)> + '_ {
        StanceLabel::ALL.iter().copied().zip(self.0.iter().copied())
    }

    /// Most probable label; ties go to the label declared first.
    pub fn argmax(&self) -> StanceLabel {
        let mut best = 0;
        for i in 1..6 {
            if self.0[i] > self.0[best] {
                best = i;
            }
        }
        StanceLabel::ALL[best]
    }

    /// Rounds to millionths so that the six rounded values still add up to
    /// exactly one million (largest-remainder rounding).
    pub fn to_micros(&self) -> [u64; 6] {
        let total: f64 = self.0.iter().sum();
        let scaled: Vec<f64> = self.0.iter().map(|p| p / total * 1e6).collect();
        let mut micros: [u64; 6] = [0; 6];
        for (m, s) in micros.iter_mut().zip(&scaled) {
            *m = s.floor() as u64;
        }
        let assigned: u64 = micros.iter().sum();
        let mut order: Vec<usize> = (0..6).collect();
        // stable: equal remainders keep label order
        order.sort_by(|&a, &b| {
            let ra = scaled[a] - scaled[a].floor();
            let rb = scaled[b] - scaled[b].floor();
            rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal)
        });
        for &i in order.iter().take(1_000_000u64.saturating_sub(assigned) as usize) {
            micros[i] += 1;
        }
        micros
    }

    pub fn from_micros(micros: [u64; 6]) -> Result<Self> {
        Self::new(micros.map(|m| m as f64 / 1e6))
    }

    /// Sums fine-class masses into their coarse class.
    pub fn coarsen(&self) -> CoarseDistribution {
        let mut out = [0.0; 4];
        for (label, p) in self.iter() {
            out[label.coarsen().index()] += p;
        }
        CoarseDistribution(out)
    }
}

/// Probability vector over the four coarse labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoarseDistribution([f64; 4]);

impl CoarseDistribution {
    pub fn get(&self, label: CoarseLabel) -> f64 {
        self.0[label.index()]
    }

    pub fn as_array(&self) -> &[f64; 4] {
        &self.0
    }
}

pub fn coarsen(label: StanceLabel) -> CoarseLabel {
    label.coarsen()
}

pub fn coarsen_dist(dist: &StanceDistribution) -> CoarseDistribution {
    dist.coarsen()
}
